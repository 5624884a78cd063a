#ifndef STYLIZED_PLOTDATA_HPP
#define STYLIZED_PLOTDATA_HPP

#include "stylized/autocorr.hpp"
#include "stylized/density.hpp"
#include "stylized/diffusion.hpp"
#include "stylized/ingest.hpp"
#include "stylized/mfdfa.hpp"
#include "stylized/series.hpp"

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace stylized {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

// Plain CSV writers, one header row each. Lags are written both in grid units
// and in minutes where the grid step is known.

/// time, index, volatility (volatility of the window ending at that row; empty before the first full window).
void write_volatility_csv(std::ostream& out, const PriceSeries& series, const std::vector<double>& volatility,
                          std::size_t window);

/// x, density
void write_pdf_csv(std::ostream& out, const EmpiricalPdf& pdf);

/// x, density, q_gaussian, gaussian, tail: the estimate with its fitted curves.
void write_pdf_fits_csv(std::ostream& out, const EmpiricalPdf& pdf, const QGaussianFit& qfit, const GaussianFit& gfit,
                        const TailFit& tail);

/// lag, lag_minutes, p_max, p_at_zero, msd, fit_short, fit_long
void write_peak_scaling_csv(std::ostream& out, const PeakScalingCurve& curve, int dt_minutes,
                            const TwoRegimeFit* fit = nullptr);

/// s_minutes, C, stderr
void write_acf_csv(std::ostream& out, const AcfCurve& curve, int dt_minutes);

/// time, index, trend, residual
void write_detrend_csv(std::ostream& out, const PriceSeries& series, const TrendDecomposition& d);

/// Rescaled curves in long format: lag, x, density, master (g_q at the shared q).
void write_collapse_csv(std::ostream& out, const CollapseResult& c);

/// scale, w, F
void write_fluctuation_csv(std::ostream& out, const FluctuationMatrix& m);

/// w, h, stderr, tau
void write_hurst_csv(std::ostream& out, const HurstProfile& p);

/// w, gamma, f
void write_spectrum_csv(std::ostream& out, const LegendreSpectrum& s);

/// One spectrum file per beta, named <stem>_beta_<beta>.csv. Returns the paths written.
std::vector<std::filesystem::path> write_beta_sweep(const std::filesystem::path& dir, const std::string& stem,
                                                    const BetaSweep& sweep);

/// Opens `path` for writing (parents created) and hands the stream to `fn`.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fn);

} // namespace stylized

#endif
