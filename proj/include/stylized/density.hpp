#ifndef STYLIZED_DENSITY_HPP
#define STYLIZED_DENSITY_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stylized {

/// Density estimate on a uniform grid.
struct EmpiricalPdf {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
    std::size_t n_samples = 0;

    std::size_t peak_index() const;
    double peak() const { return density.at(peak_index()); }
    /// Linear interpolation on the grid, 0 outside it.
    double value_at(double x) const;
};

/// Gaussian-kernel density on a uniform grid spanning [min - 5h, max + 5h].
///
/// The grid has at least `grid_size` points and is refined until the spacing
/// does not exceed the bandwidth, so the trapezoidal integral stays within
/// 1e-3 of one. The point count is always odd.
EmpiricalPdf kde(std::span<const double> samples, double bandwidth, std::size_t grid_size = 2048);

/// Same as kde() with the bandwidth given in units of the sample standard deviation.
EmpiricalPdf kde_relative(std::span<const double> samples, double relative_bandwidth, std::size_t grid_size = 2048);

struct KdeOptions {
    double bandwidth = 0.05;   // in standard deviations when `relative`
    bool relative = true;
    std::size_t grid_size = 2048;
};

EmpiricalPdf estimate_pdf(std::span<const double> samples, const KdeOptions& options);

/// Normalization constant of the q-Gaussian, 1 < q < 3.
double q_gaussian_norm(double q);

/// Normalized q-Gaussian g_q(x) = [1 - (1-q) x^2]^(1/(1-q)) / C_q.
double g_q(double x, double q);

/// Scaled density (1/scale) g_q(x/scale).
double q_gaussian_pdf(double x, double q, double scale);

enum class FitMethod { semilog, tail };
std::string to_string(FitMethod m);

struct QGaussianFit {
    double q = 0.0;
    double scale = 0.0;      // beta: fitted density is (1/beta) g_q(x/beta)
    double r_squared = 0.0;  // in log-density space for semilog fits
    FitMethod method = FitMethod::semilog;
    bool pinned = false;     // q ended on an optimizer bound
    double sse = 0.0;
    std::size_t points = 0;
};

struct TailFit {
    double slope = 0.0;
    double intercept = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double stderr_ = 0.0;
    std::size_t points = 0;
};

/// Options shared by the fits on an EmpiricalPdf.
///
/// The fit support is the contiguous run of grid points around the peak whose
/// density corresponds to at least `min_count` expected samples within one
/// bandwidth on either side, i.e. density >= min_count / (2 n h).
struct PdfFitOptions {
    double min_count = 10.0;
    double q_min = 1.0 + 1e-4;
    double q_max = 3.0 - 1e-3;
    double tolerance = 1e-8;
    std::size_t max_iterations = 20000;
};

/// Index range [first, last] of the fit support.
std::pair<std::size_t, std::size_t> fit_support(const EmpiricalPdf& pdf, double min_count);

/// Least squares between ln(density) and ln((1/beta) g_q(x/beta)) over the fit
/// support, multi-started at q = 1.2, 1.5, 2.0.
QGaussianFit fit_q_gaussian_semilog(const EmpiricalPdf& pdf, const PdfFitOptions& options = {});

/// Semilog fit of the scale alone at fixed q.
QGaussianFit fit_q_gaussian_scale(const EmpiricalPdf& pdf, double q, const PdfFitOptions& options = {});

/// Sum of squared log residuals of (q, scale) over the fit support.
double q_gaussian_log_sse(const EmpiricalPdf& pdf, double q, double scale, double min_count);

/// OLS of ln(density) on ln(x) over the outer `tail_fraction` of the positive
/// part of the fit support.
TailFit fit_tail_exponent(const EmpiricalPdf& pdf, double tail_fraction = 0.25, double min_count = 10.0);

/// q = 1 - 2/m for a tail slope m < 0.
double q_from_tail(double slope);

struct GaussianFit {
    double mean = 0.0;
    double sigma = 0.0;
    double r_squared = 0.0;  // linear density space
};

/// Moment-matched Gaussian and its R^2 against the density on the grid.
GaussianFit fit_gaussian(const EmpiricalPdf& pdf);

} // namespace stylized

#endif
