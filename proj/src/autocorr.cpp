#include "stylized/autocorr.hpp"

#include "stylized/error.hpp"
#include "stylized/stats.hpp"

#include <cmath>
#include <optional>

namespace stylized {

std::string to_string(AcfKind k)
{
    return k == AcfKind::sample ? "sample" : "chopping";
}

namespace {

// Sample ACF of one contiguous block; nullopt when the block has zero variance.
std::optional<std::vector<double>> block_acf(std::span<const double> x, std::size_t max_lag)
{
    const double m = mean(x);
    std::vector<double> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = x[i] - m;
    double denom = 0.0;
    for (double v : c) denom += v * v;
    if (!(denom > 0.0)) return std::nullopt;

    std::vector<double> out(max_lag + 1);
    out[0] = 1.0;
    for (std::size_t s = 1; s <= max_lag; ++s) {
        double num = 0.0;
        for (std::size_t t = 0; t + s < c.size(); ++t) num += c[t + s] * c[t];
        out[s] = num / denom;
    }
    return out;
}

} // namespace

AcfCurve sample_acf(std::span<const double> returns, std::size_t max_lag)
{
    if (returns.size() < 4) throw DataError("sample_acf: series too short");
    if (2 * max_lag >= returns.size())
        throw ConfigError("sample_acf: max_lag " + std::to_string(max_lag) + " must be below half the length " +
                          std::to_string(returns.size()));
    auto c = block_acf(returns, max_lag);
    if (!c) throw AnalysisError("sample_acf: zero variance");

    AcfCurve out;
    out.kind = AcfKind::sample;
    out.values = std::move(*c);
    out.lags.resize(max_lag + 1);
    for (std::size_t s = 0; s <= max_lag; ++s) out.lags[s] = s;
    return out;
}

AcfCurve chopped_acf(std::span<const double> returns, std::size_t segment_length, std::size_t max_lag)
{
    if (segment_length < 4) throw ConfigError("chopped_acf: segment_length must be at least 4");
    if (returns.size() < 2 * segment_length)
        throw ConfigError("chopped_acf: segment_length " + std::to_string(segment_length) +
                          " exceeds half the series length " + std::to_string(returns.size()));
    if (max_lag == 0) max_lag = segment_length / 2 - 1;
    if (2 * max_lag >= segment_length) throw ConfigError("chopped_acf: max_lag must be below half the segment length");

    const std::size_t count = returns.size() / segment_length;
    std::vector<std::vector<double>> curves;
    AcfCurve out;
    out.kind = AcfKind::chopping;
    for (std::size_t i = 0; i < count; ++i) {
        auto c = block_acf(returns.subspan(i * segment_length, segment_length), max_lag);
        if (c) curves.push_back(std::move(*c));
        else ++out.dropped_segments;
    }
    if (curves.size() < 2)
        throw AnalysisError("chopped_acf: fewer than 2 segments with non-zero variance (" +
                            std::to_string(out.dropped_segments) + " dropped)");

    const double k = static_cast<double>(curves.size());
    out.segments = curves.size();
    out.lags.resize(max_lag + 1);
    out.values.assign(max_lag + 1, 0.0);
    out.stderr_.assign(max_lag + 1, 0.0);
    for (std::size_t s = 0; s <= max_lag; ++s) {
        out.lags[s] = s;
        double m = 0.0;
        for (const auto& c : curves) m += c[s];
        m /= k;
        double ss = 0.0;
        for (const auto& c : curves) ss += (c[s] - m) * (c[s] - m);
        out.values[s] = m;
        out.stderr_[s] = std::sqrt(ss / (k - 1.0) / k);
    }
    return out;
}

AcfSlopeFit fit_abs_acf_slope(const AcfCurve& curve, std::size_t s_lo, std::size_t s_hi)
{
    if (s_lo < 1 || s_lo >= s_hi) throw ConfigError("fit_abs_acf_slope: need 1 <= s_lo < s_hi");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        const std::size_t s = curve.lags[i];
        if (s < s_lo || s > s_hi) continue;
        const double a = std::abs(curve.values[i]);
        if (!(a > 0.0)) throw AnalysisError("fit_abs_acf_slope: zero ACF value at lag " + std::to_string(s));
        lx.push_back(std::log(static_cast<double>(s)));
        ly.push_back(std::log(a));
    }
    if (lx.empty() || curve.lags.empty() || curve.lags.back() < s_hi)
        throw ConfigError("fit_abs_acf_slope: s_hi beyond the curve's maximum lag");
    const LinearFit fit = ols(lx, ly);
    return {fit.slope, fit.slope_stderr, fit.intercept};
}

double hurst_from_acf_slope(double slope)
{
    if (!(slope > -2.0 && slope < 0.0))
        throw AnalysisError("hurst_from_acf_slope: slope " + std::to_string(slope) + " outside (-2, 0)");
    return 1.0 + slope / 2.0;
}

double memory_time(const AcfCurve& curve, double cutoff)
{
    if (curve.values.empty() || curve.lags.size() != curve.values.size() || curve.lags.front() != 0)
        throw DataError("memory_time: curve must start at lag 0");
    const double c0 = curve.values.front();
    if (!(c0 > 0.0)) throw DataError("memory_time: C(0) must be positive");

    double integral = 0.0;
    for (std::size_t i = 1; i < curve.values.size(); ++i) {
        const double ds = static_cast<double>(curve.lags[i] - curve.lags[i - 1]);
        integral += 0.5 * ds * (curve.values[i] + curve.values[i - 1]);
        if (std::abs(curve.values[i]) < cutoff * c0) return integral / c0;
    }
    throw AnalysisError("memory_time: |C| never falls below " + std::to_string(cutoff) + " within the curve");
}

} // namespace stylized
