#ifndef STYLIZED_MFDFA_HPP
#define STYLIZED_MFDFA_HPP

#include "stylized/series.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stylized {

/// Mean-centered cumulative sum of the returns.
std::vector<double> profile(std::span<const double> returns);
inline std::vector<double> profile(const ReturnSeries& returns) { return profile(returns.values); }

/// F_w(s), one row per order.
struct FluctuationMatrix {
    std::vector<std::size_t> scales;
    std::vector<double> orders;
    std::vector<std::vector<double>> values;  // values[order][scale]
    std::vector<std::size_t> segments;        // segments used per scale
    std::vector<std::size_t> skipped;         // zero-residual segments per scale

    double at(std::size_t order_index, std::size_t scale_index) const { return values[order_index][scale_index]; }
};

/// `count` log-spaced scales from `min_scale` to n/4.
std::vector<std::size_t> default_scales(std::size_t n, std::size_t count = 24, std::size_t min_scale = 16);

/// Scales 16..n/16 for the h(w) fit. Above n/16 fewer than 16 segments remain
/// and the extreme orders are carried by one or two segments.
std::pair<std::size_t, std::size_t> default_fit_range(std::size_t n);

/// Orders -max..max in steps of `step`, 0 included.
std::vector<double> default_orders(double max_order = 10.0, double step = 0.5);

/// Per scale s: floor(N/s) disjoint segments from the start, each detrended by
/// its least-squares line; F^2(v, s) is the mean squared residual and
/// F_w(s) = {mean_v [F^2(v,s)]^(w/2)}^(1/w), with w = 0 taken as the
/// logarithmic average exp{mean_v ln F^2(v,s) / 2}.
FluctuationMatrix fluctuation_matrix(std::span<const double> profile, const std::vector<std::size_t>& scales,
                                     const std::vector<double>& orders);

/// h(w), its standard error and tau(w) = w h(w) - 1.
struct HurstProfile {
    std::vector<double> orders;
    std::vector<double> h;
    std::vector<double> stderr_;
    std::vector<double> tau;
};

/// Log-log slope of F_w(s) over the scales in [s_lo, s_hi]; needs at least six scales.
HurstProfile generalized_hurst(const FluctuationMatrix& matrix, std::size_t s_lo, std::size_t s_hi);

/// Builds a HurstProfile from given h values, tau derived.
HurstProfile make_hurst_profile(std::vector<double> orders, std::vector<double> h);

struct SpectrumPeak {
    double gamma = 0.0;
    double f = 0.0;
    double prominence = 0.0;
};

struct LegendreSpectrum {
    double beta = 0.0;
    std::vector<double> orders;  // w behind each point, same order as gamma
    std::vector<double> gamma;   // ascending
    std::vector<double> f;
    std::vector<SpectrumPeak> peaks;

    /// Width in gamma of the connected region around the global maximum where f >= level.
    double width(double level) const;
};

/// Regularized spectrum with h_beta(w) = beta w^3 + h(w):
///   gamma = h_beta - w dh_beta/dw,  f = w (gamma - h_beta) + 1.
/// dh/dw is taken by central differences (one-sided at the ends) and the
/// derivative of the cubic term analytically. Throws AnalysisError if gamma is
/// not strictly monotonic in w. Peaks are local maxima with prominence >= 0.02.
LegendreSpectrum legendre_spectrum(const HurstProfile& hurst, double beta, double min_prominence = 0.02);

enum class Fractality { monofractal, multifractal };
std::string to_string(Fractality f);

struct BetaSweep {
    std::vector<LegendreSpectrum> spectra;  // in the order of the given betas
    Fractality verdict = Fractality::monofractal;
};

/// Spectra for decreasing betas; multifractal when the smallest beta shows two or more peaks.
BetaSweep beta_sweep(const HurstProfile& hurst, const std::vector<double>& betas);

struct MultifractalityTest {
    Fractality verdict = Fractality::monofractal;
    double slope_negative = 0.0;
    double stderr_negative = 0.0;
    double slope_positive = 0.0;
    double stderr_positive = 0.0;
    double h_range = 0.0;
};

/// Separate lines through h(w) for w < 0 and w > 0. Multifractal when either
/// |slope| exceeds `slope_threshold` or max h - min h exceeds `range_threshold`.
MultifractalityTest multifractality_test(const HurstProfile& hurst, double slope_threshold = 0.01,
                                         double range_threshold = 0.05);

} // namespace stylized

#endif
