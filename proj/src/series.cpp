#include "stylized/series.hpp"

#include "stylized/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stylized {

ReturnSeries increments(std::span<const double> values, int dt_minutes, bool detrended)
{
    if (values.size() < 2) throw DataError("increments: series needs at least two values");
    ReturnSeries out;
    out.dt_minutes = dt_minutes;
    out.detrended = detrended;
    out.values.resize(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) out.values[i] = values[i + 1] - values[i];
    return out;
}

ReturnSeries increments(const PriceSeries& series)
{
    return increments(series.values, series.dt_minutes, false);
}

ReturnSeries increments(const TrendDecomposition& decomposition, int dt_minutes)
{
    return increments(decomposition.residual, dt_minutes, true);
}

ReturnEnsemble return_ensemble(std::span<const double> values, std::size_t lag)
{
    if (lag == 0) throw ConfigError("return_ensemble: lag must be positive");
    if (lag >= values.size())
        throw DataError("return_ensemble: lag " + std::to_string(lag) + " is not below series length " +
                        std::to_string(values.size()));
    ReturnEnsemble out;
    out.lag = lag;
    out.values.resize(values.size() - lag);
    for (std::size_t k = 0; k + lag < values.size(); ++k) out.values[k] = values[k + lag] - values[k];
    return out;
}

std::vector<double> rolling_volatility(const ReturnSeries& returns, std::size_t window)
{
    if (window < 2) throw ConfigError("rolling_volatility: window must be at least 2");
    const auto& x = returns.values;
    if (window > x.size())
        throw DataError("rolling_volatility: window " + std::to_string(window) + " exceeds series length " +
                        std::to_string(x.size()));

    std::vector<double> out(x.size() - window + 1);
    const double w = static_cast<double>(window);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double m = 0.0;
        for (std::size_t k = i; k < i + window; ++k) m += x[k];
        m /= w;
        double ss = 0.0;
        for (std::size_t k = i; k < i + window; ++k) ss += (x[k] - m) * (x[k] - m);
        out[i] = std::sqrt(ss / (w - 1.0));
    }
    return out;
}

TrendDecomposition moving_average_trend(std::span<const double> values, std::size_t window)
{
    const std::size_t n = values.size();
    if (window < 1 || window > n)
        throw ConfigError("moving_average_trend: window " + std::to_string(window) + " outside [1, " +
                          std::to_string(n) + "]");

    // 0-based: trend[i] averages values[i - back .. i + ahead], clipped.
    const std::size_t back = (window - 1) / 2;
    const std::size_t ahead = window / 2;  // ceil((window - 1) / 2)

    std::vector<long double> prefix(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + static_cast<long double>(values[i]);

    TrendDecomposition out;
    out.window = window;
    out.trend.resize(n);
    out.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= back ? i - back : 0;
        const std::size_t hi = std::min(n - 1, i + ahead);
        const long double sum = prefix[hi + 1] - prefix[lo];
        out.trend[i] = static_cast<double>(sum / static_cast<long double>(hi - lo + 1));
        out.residual[i] = values[i] - out.trend[i];
    }
    return out;
}

} // namespace stylized
