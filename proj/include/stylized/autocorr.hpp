#ifndef STYLIZED_AUTOCORR_HPP
#define STYLIZED_AUTOCORR_HPP

#include "stylized/series.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stylized {

enum class AcfKind { sample, chopping };
std::string to_string(AcfKind k);

struct AcfCurve {
    std::vector<std::size_t> lags;  // grid units
    std::vector<double> values;
    std::vector<double> stderr_;    // chopping only; empty for the sample ACF
    AcfKind kind = AcfKind::sample;
    std::size_t segments = 0;          // segments averaged (chopping)
    std::size_t dropped_segments = 0;  // zero-variance segments left out (chopping)
};

/// C(s) = sum_{t<n-s} (X_{t+s} - m)(X_t - m) / sum_t (X_t - m)^2 for s = 0..max_lag,
/// with the global mean m.
AcfCurve sample_acf(std::span<const double> returns, std::size_t max_lag);
inline AcfCurve sample_acf(const ReturnSeries& returns, std::size_t max_lag)
{
    return sample_acf(returns.values, max_lag);
}

/// Mean of the per-segment sample ACFs over floor(N/S) disjoint segments taken
/// from the start, with the cross-segment standard error. Zero-variance
/// segments are dropped and counted. `max_lag` defaults to S/2 - 1.
AcfCurve chopped_acf(std::span<const double> returns, std::size_t segment_length = 1000, std::size_t max_lag = 0);
inline AcfCurve chopped_acf(const ReturnSeries& returns, std::size_t segment_length = 1000, std::size_t max_lag = 0)
{
    return chopped_acf(returns.values, segment_length, max_lag);
}

struct AcfSlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    double intercept = 0.0;
};

/// OLS of ln|C(s)| on ln s over lags s_lo..s_hi inclusive.
AcfSlopeFit fit_abs_acf_slope(const AcfCurve& curve, std::size_t s_lo = 1, std::size_t s_hi = 10);

/// H = 1 + slope / 2 for a power-law ACF |C(s)| ~ s^(2H - 2); slope in (-2, 0).
double hurst_from_acf_slope(double slope);

/// Trapezoidal integral of C(s)/C(0) from lag 0 up to and including the first
/// lag where |C| < cutoff. Throws when the curve never decays below the cutoff.
double memory_time(const AcfCurve& curve, double cutoff = 0.01);

} // namespace stylized

#endif
