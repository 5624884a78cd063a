#ifndef STYLIZED_DIFFUSION_HPP
#define STYLIZED_DIFFUSION_HPP

#include "stylized/density.hpp"
#include "stylized/ingest.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stylized {

/// PDF peak and second moment of the return ensemble at each lag.
struct PeakScalingCurve {
    std::vector<std::size_t> lags;
    std::vector<double> peaks;  // P_max(t)
    std::vector<double> msd;    // <x^2>(t)
    std::vector<double> at_zero; // P(0, t), for comparison with the grid maximum
};

/// Builds the return ensemble at every lag, estimates its PDF and records the
/// maximum density and the raw second moment. Requires max(lags) < n / 4.
PeakScalingCurve peak_scaling(std::span<const double> index, const std::vector<std::size_t>& lags,
                              const KdeOptions& kde = {});
inline PeakScalingCurve peak_scaling(const PriceSeries& series, const std::vector<std::size_t>& lags,
                                     const KdeOptions& kde = {})
{
    return peak_scaling(series.values, lags, kde);
}

/// Default lag grid: `count` log-spaced lags from 1 to min(max_lag, n/4 - 1).
std::vector<std::size_t> default_lags(std::size_t series_length, std::size_t count = 48, std::size_t max_lag = 46000);

struct PowerLawFit {
    double h = 0.0;  // P_max ~ t^-h
    double stderr_ = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
};

/// Single-regime OLS of log P_max on log t with the sign flipped.
PowerLawFit fit_peak_power_law(const PeakScalingCurve& curve, std::size_t first = 0, std::size_t count = 0);

struct TwoRegimeFit {
    double h_short = 0.0;
    double h_long = 0.0;
    std::size_t breakpoint = 0;        // first lag of the long-time regime
    std::size_t breakpoint_index = 0;  // index of that lag in the curve
    double stderr_short = 0.0;
    double stderr_long = 0.0;
    double alpha_short = 0.0;  // 1 / h_short
    double alpha_long = 0.0;
    double sse = 0.0;
};

/// Grid search over breakpoints with at least `min_side` points per side,
/// minimizing the total SSE of the two log-log fits. Ties go to the smaller breakpoint.
TwoRegimeFit fit_two_regime(const PeakScalingCurve& curve, std::size_t min_side = 4);

enum class DiffusionRegime { subdiffusion, normal, superdiffusion };
std::string to_string(DiffusionRegime r);

/// alpha > 2 + tol: subdiffusion; alpha < 2 - tol: superdiffusion; otherwise normal.
DiffusionRegime classify_regime(double alpha, double tolerance = 0.05);

struct CollapseResult {
    std::vector<std::size_t> lags;
    std::vector<double> scale_factors;  // beta(t)
    std::vector<double> implied_d;      // beta(t)^(1/H) / t
    double master_q = 0.0;
    bool master_q_pinned = false;
    double collapse_distance = 0.0;     // max pairwise sup-distance of rescaled PDFs
    double scale_exponent = 0.0;        // slope of log beta against log t (0 for one PDF)
    std::vector<EmpiricalPdf> rescaled; // x / beta, density * beta
};

/// Shared-q semilog fit with a free scale per lag, then rescaling onto a master curve.
CollapseResult collapse_pdfs(const std::vector<std::pair<std::size_t, EmpiricalPdf>>& pdfs, double hurst,
                             const PdfFitOptions& options = {});

} // namespace stylized

#endif
