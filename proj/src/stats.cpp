#include "stylized/stats.hpp"

#include "stylized/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stylized {

LinearFit ols(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw ConfigError("ols: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw AnalysisError("ols: need at least two points");

    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw AnalysisError("ols: x values are all equal");

    LinearFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += r * r;
    }
    fit.sse = sse;
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.slope_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

double mean(std::span<const double> v)
{
    if (v.empty()) throw AnalysisError("mean of empty range");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v)
{
    if (v.size() < 2) throw AnalysisError("variance needs at least two values");
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double trapezoid(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw ConfigError("trapezoid: x and y differ in length");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

std::vector<std::size_t> log_spaced(std::size_t lo, std::size_t hi, std::size_t count)
{
    if (lo == 0 || hi < lo) throw ConfigError("log_spaced: need 0 < lo <= hi");
    std::vector<std::size_t> out;
    if (count <= 1 || hi == lo) {
        out.push_back(lo);
        if (hi != lo && count > 1) out.push_back(hi);
        return out;
    }
    const double a = std::log(static_cast<double>(lo));
    const double b = std::log(static_cast<double>(hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
        auto v = static_cast<std::size_t>(std::llround(std::exp(t)));
        v = std::clamp(v, lo, hi);
        if (out.empty() || v > out.back()) out.push_back(v);
    }
    if (out.back() != hi) out.push_back(hi);
    return out;
}

} // namespace stylized
