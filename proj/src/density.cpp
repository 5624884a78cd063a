#include "stylized/density.hpp"

#include "optimize.hpp"
#include "stylized/error.hpp"
#include "stylized/stats.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace stylized {

namespace {

constexpr double kGridExtension = 5.0;   // grid padding, in bandwidths
constexpr double kKernelCutoff = 8.0;    // kernel truncation, in bandwidths
constexpr std::size_t kMaxGrid = std::size_t{1} << 22;

struct Support {
    std::vector<double> x;
    std::vector<double> log_density;
};

Support collect_support(const EmpiricalPdf& pdf, double min_count)
{
    const auto [first, last] = fit_support(pdf, min_count);
    Support s;
    for (std::size_t i = first; i <= last; ++i) {
        s.x.push_back(pdf.grid[i]);
        s.log_density.push_back(std::log(pdf.density[i]));
    }
    return s;
}

double log_sse(const Support& s, double q, double scale)
{
    const double offset = -std::log(scale) - std::log(q_gaussian_norm(q));
    double sse = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double u = s.x[i] / scale;
        const double r = s.log_density[i] - (offset - std::log1p((q - 1.0) * u * u) / (q - 1.0));
        sse += r * r;
    }
    return sse;
}

double log_sst(const Support& s)
{
    const double m = mean(s.log_density);
    double sst = 0.0;
    for (double v : s.log_density) sst += (v - m) * (v - m);
    return sst;
}

void check_pdf(const EmpiricalPdf& pdf)
{
    if (pdf.grid.size() != pdf.density.size() || pdf.grid.size() < 3)
        throw DataError("pdf grid and density must have equal length of at least 3");
    if (!(pdf.bandwidth > 0.0) || pdf.n_samples == 0) throw DataError("pdf lacks bandwidth/sample metadata");
}

} // namespace

std::size_t EmpiricalPdf::peak_index() const
{
    if (density.empty()) throw DataError("empty pdf");
    return static_cast<std::size_t>(std::max_element(density.begin(), density.end()) - density.begin());
}

double EmpiricalPdf::value_at(double x) const
{
    if (grid.empty() || x < grid.front() || x > grid.back()) return 0.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.end()) return density.back();
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return density[i - 1] + t * (density[i] - density[i - 1]);
}

EmpiricalPdf kde(std::span<const double> samples, double bandwidth, std::size_t grid_size)
{
    if (samples.size() < 10) throw DataError("kde: need at least 10 samples, got " + std::to_string(samples.size()));
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("kde: bandwidth must be positive");
    if (grid_size < 3) throw ConfigError("kde: grid_size must be at least 3");
    for (double v : samples)
        if (!std::isfinite(v)) throw DataError("kde: non-finite sample");

    const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *mn_it - kGridExtension * bandwidth;
    const double hi = *mx_it + kGridExtension * bandwidth;

    std::size_t points = std::max(grid_size, static_cast<std::size_t>(std::ceil((hi - lo) / bandwidth)) + 1);
    if (points % 2 == 0) ++points;
    if (points > kMaxGrid)
        throw ConfigError("kde: bandwidth " + std::to_string(bandwidth) + " is too small for the sample range");

    EmpiricalPdf pdf;
    pdf.bandwidth = bandwidth;
    pdf.n_samples = samples.size();
    pdf.grid.resize(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) pdf.grid[i] = lo + step * static_cast<double>(i);
    pdf.grid.back() = hi;

    // exp(-(u0 + k d)^2 / 2) by the recurrence e_{k+1} = e_k g_k, g_{k+1} = g_k exp(-d^2).
    std::vector<double> acc(points, 0.0);
    const double inv_h = 1.0 / bandwidth;
    const double d = step * inv_h;
    const double decay = std::exp(-d * d);
    const auto last = static_cast<long>(points) - 1;
    for (double s : samples) {
        const long first = std::max(0L, static_cast<long>(std::ceil((s - kKernelCutoff * bandwidth - lo) / step)));
        const long end = std::min(last, static_cast<long>(std::floor((s + kKernelCutoff * bandwidth - lo) / step)));
        if (first > end) continue;
        // Restarted every 32 points to keep the rounding drift near 1e-13.
        for (long block = first; block <= end; block += 32) {
            const double u0 = (pdf.grid[static_cast<std::size_t>(block)] - s) * inv_h;
            double e = std::exp(-0.5 * u0 * u0);
            double g = std::exp(-u0 * d - 0.5 * d * d);
            for (long i = block; i <= std::min(end, block + 31); ++i) {
                acc[static_cast<std::size_t>(i)] += e;
                e *= g;
                g *= decay;
            }
        }
    }
    const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
    pdf.density.resize(points);
    for (std::size_t i = 0; i < points; ++i) pdf.density[i] = acc[i] * norm;
    return pdf;
}

EmpiricalPdf estimate_pdf(std::span<const double> samples, const KdeOptions& options)
{
    return options.relative ? kde_relative(samples, options.bandwidth, options.grid_size)
                            : kde(samples, options.bandwidth, options.grid_size);
}

EmpiricalPdf kde_relative(std::span<const double> samples, double relative_bandwidth, std::size_t grid_size)
{
    if (samples.size() < 10) throw DataError("kde: need at least 10 samples, got " + std::to_string(samples.size()));
    const double sd = std::sqrt(sample_variance(samples));
    if (!(sd > 0.0)) throw AnalysisError("kde: samples have zero variance");
    return kde(samples, relative_bandwidth * sd, grid_size);
}

double q_gaussian_norm(double q)
{
    if (!(q > 1.0 && q < 3.0)) throw ConfigError("q-Gaussian requires 1 < q < 3, got " + std::to_string(q));
    const double a = (3.0 - q) / (2.0 * (q - 1.0));
    const double b = 1.0 / (q - 1.0);
    return std::exp(0.5 * std::log(std::numbers::pi / (q - 1.0)) + std::lgamma(a) - std::lgamma(b));
}

double g_q(double x, double q)
{
    const double c = q_gaussian_norm(q);
    return std::exp(-std::log1p((q - 1.0) * x * x) / (q - 1.0)) / c;
}

double q_gaussian_pdf(double x, double q, double scale)
{
    if (!(scale > 0.0)) throw ConfigError("q-Gaussian scale must be positive");
    return g_q(x / scale, q) / scale;
}

std::string to_string(FitMethod m)
{
    return m == FitMethod::semilog ? "semilog" : "tail";
}

std::pair<std::size_t, std::size_t> fit_support(const EmpiricalPdf& pdf, double min_count)
{
    check_pdf(pdf);
    const double floor = min_count / (2.0 * static_cast<double>(pdf.n_samples) * pdf.bandwidth);
    const std::size_t peak = pdf.peak_index();
    auto ok = [&](std::size_t i) { return pdf.density[i] > 0.0 && pdf.density[i] >= floor; };
    if (!ok(peak)) throw AnalysisError("pdf peak is below the fit support floor");
    std::size_t first = peak, last = peak;
    while (first > 0 && ok(first - 1)) --first;
    while (last + 1 < pdf.density.size() && ok(last + 1)) ++last;
    return {first, last};
}

double q_gaussian_log_sse(const EmpiricalPdf& pdf, double q, double scale, double min_count)
{
    return log_sse(collect_support(pdf, min_count), q, scale);
}

QGaussianFit fit_q_gaussian_semilog(const EmpiricalPdf& pdf, const PdfFitOptions& options)
{
    const Support s = collect_support(pdf, options.min_count);
    if (s.x.size() < 5) throw AnalysisError("semilog fit: fewer than 5 points in the fit support");
    const double peak = pdf.peak();
    const double sst = log_sst(s);

    std::function<double(const std::array<double, 2>&)> objective = [&](const std::array<double, 2>& p) {
        return log_sse(s, p[0], std::exp(p[1]));
    };

    QGaussianFit best;
    bool have = false;
    for (double q0 : {1.2, 1.5, 2.0}) {
        const double beta0 = 1.0 / (q_gaussian_norm(q0) * peak);
        const auto r = detail::nelder_mead<2>(objective, {q0, std::log(beta0)}, {0.1, 0.2},
                                              {options.q_min, std::log(beta0) - 30.0},
                                              {options.q_max, std::log(beta0) + 30.0}, options.tolerance, 1e-9,
                                              options.max_iterations);
        if (!r.converged) continue;
        const double q = r.x[0];
        const bool better = !have || r.value < best.sse * (1.0 - 1e-12) ||
                            (std::abs(r.value - best.sse) <= 1e-12 * std::max(1.0, best.sse) && q < best.q);
        if (better) {
            have = true;
            best.q = q;
            best.scale = std::exp(r.x[1]);
            best.sse = r.value;
        }
    }
    if (!have) throw AnalysisError("semilog q-Gaussian fit did not converge");

    best.method = FitMethod::semilog;
    best.points = s.x.size();
    best.r_squared = sst > 0.0 ? std::max(0.0, 1.0 - best.sse / sst) : 1.0;
    const double span = options.q_max - options.q_min;
    best.pinned = best.q - options.q_min <= 1e-6 * span || options.q_max - best.q <= 1e-6 * span;
    return best;
}

QGaussianFit fit_q_gaussian_scale(const EmpiricalPdf& pdf, double q, const PdfFitOptions& options)
{
    const Support s = collect_support(pdf, options.min_count);
    if (s.x.size() < 3) throw AnalysisError("scale fit: fewer than 3 points in the fit support");
    const double beta0 = 1.0 / (q_gaussian_norm(q) * pdf.peak());
    auto f = [&](double log_beta) { return log_sse(s, q, std::exp(log_beta)); };
    // The SSE is not unimodal in ln(beta): a very wide, flat model also scores
    // well. A coarse scan picks the basin before Brent refines it.
    const auto [lo, hi] = detail::bracket_minimum(f, std::log(beta0) - 5.0, std::log(beta0) + 5.0, 100);
    const auto [log_beta, sse] = boost::math::tools::brent_find_minima(f, lo, hi, 26);

    QGaussianFit fit;
    fit.q = q;
    fit.scale = std::exp(log_beta);
    fit.sse = sse;
    fit.points = s.x.size();
    fit.method = FitMethod::semilog;
    const double sst = log_sst(s);
    fit.r_squared = sst > 0.0 ? std::max(0.0, 1.0 - sse / sst) : 1.0;
    return fit;
}

TailFit fit_tail_exponent(const EmpiricalPdf& pdf, double tail_fraction, double min_count)
{
    if (!(tail_fraction > 0.0 && tail_fraction < 0.5)) throw ConfigError("tail_fraction must lie in (0, 0.5)");
    const auto [first, last] = fit_support(pdf, min_count);
    const double x_end = pdf.grid[last];
    if (!(x_end > 0.0)) throw AnalysisError("tail fit: no positive-x support");
    const double x_start = x_end * (1.0 - tail_fraction);

    std::vector<double> lx, ly;
    for (std::size_t i = first; i <= last; ++i) {
        const double x = pdf.grid[i];
        if (x <= 0.0 || x < x_start) continue;
        if (!(pdf.density[i] > 0.0)) throw AnalysisError("tail fit: zero density in the tail region");
        lx.push_back(std::log(x));
        ly.push_back(std::log(pdf.density[i]));
    }
    if (lx.size() < 10)
        throw AnalysisError("tail fit: only " + std::to_string(lx.size()) + " grid points in the tail (need 10)");

    const LinearFit fit = ols(lx, ly);
    if (!(fit.slope < 0.0)) throw AnalysisError("tail fit: non-negative slope");
    TailFit out;
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.x_lo = std::exp(lx.front());
    out.x_hi = std::exp(lx.back());
    out.stderr_ = fit.slope_stderr;
    out.points = lx.size();
    return out;
}

double q_from_tail(double slope)
{
    if (!(slope < 0.0)) throw ConfigError("q_from_tail: slope must be negative");
    return 1.0 - 2.0 / slope;
}

GaussianFit fit_gaussian(const EmpiricalPdf& pdf)
{
    check_pdf(pdf);
    const double mass = trapezoid(pdf.grid, pdf.density);
    if (!(mass > 0.0)) throw AnalysisError("gaussian fit: pdf has no mass");
    std::vector<double> m1(pdf.grid.size()), m2(pdf.grid.size());
    for (std::size_t i = 0; i < pdf.grid.size(); ++i) m1[i] = pdf.grid[i] * pdf.density[i];
    const double mu = trapezoid(pdf.grid, m1) / mass;
    for (std::size_t i = 0; i < pdf.grid.size(); ++i) m2[i] = (pdf.grid[i] - mu) * (pdf.grid[i] - mu) * pdf.density[i];
    const double var = trapezoid(pdf.grid, m2) / mass;
    if (!(var > 0.0)) throw AnalysisError("gaussian fit: zero variance");

    GaussianFit g;
    g.mean = mu;
    g.sigma = std::sqrt(var);
    const double dmean = mean(pdf.density);
    double sse = 0.0, sst = 0.0;
    const double c = 1.0 / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < pdf.grid.size(); ++i) {
        const double u = (pdf.grid[i] - mu) / g.sigma;
        const double r = pdf.density[i] - c * std::exp(-0.5 * u * u);
        sse += r * r;
        sst += (pdf.density[i] - dmean) * (pdf.density[i] - dmean);
    }
    g.r_squared = sst > 0.0 ? 1.0 - sse / sst : 0.0;
    return g;
}

} // namespace stylized
