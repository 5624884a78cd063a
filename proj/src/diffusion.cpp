#include "stylized/diffusion.hpp"

#include "optimize.hpp"
#include "stylized/error.hpp"
#include "stylized/series.hpp"
#include "stylized/stats.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace stylized {

std::vector<std::size_t> default_lags(std::size_t series_length, std::size_t count, std::size_t max_lag)
{
    if (series_length < 12) throw DataError("series too short for a lag grid");
    const std::size_t top = std::min(max_lag, (series_length - 1) / 4);
    if (top < 1) throw DataError("series too short for a lag grid");
    return log_spaced(1, top, count);
}

PeakScalingCurve peak_scaling(std::span<const double> index, const std::vector<std::size_t>& lags,
                              const KdeOptions& kde)
{
    if (lags.empty()) throw ConfigError("peak_scaling: empty lag list");
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] == 0) throw ConfigError("peak_scaling: lags must be positive");
        if (i > 0 && lags[i] <= lags[i - 1]) throw ConfigError("peak_scaling: lags must be strictly increasing");
    }
    if (4 * lags.back() >= index.size())
        throw DataError("peak_scaling: lag " + std::to_string(lags.back()) + " leaves too small an ensemble (need lag < " +
                        "n/4 with n = " + std::to_string(index.size()) + ")");

    PeakScalingCurve curve;
    curve.lags = lags;
    curve.peaks.resize(lags.size());
    curve.msd.resize(lags.size());
    curve.at_zero.resize(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const ReturnEnsemble ens = return_ensemble(index, lags[i]);
        const auto [mn, mx] = std::minmax_element(ens.values.begin(), ens.values.end());
        if (*mn == *mx)
            throw AnalysisError("peak_scaling: zero-variance ensemble at lag " + std::to_string(lags[i]));
        const EmpiricalPdf pdf = estimate_pdf(ens.values, kde);
        curve.peaks[i] = pdf.peak();
        curve.at_zero[i] = pdf.value_at(0.0);
        double m2 = 0.0;
        for (double x : ens.values) m2 += x * x;
        curve.msd[i] = m2 / static_cast<double>(ens.values.size());
    }
    return curve;
}

namespace {

void log_axes(const PeakScalingCurve& curve, std::vector<double>& lx, std::vector<double>& ly)
{
    if (curve.lags.size() != curve.peaks.size()) throw DataError("peak curve: lags and peaks differ in length");
    lx.resize(curve.lags.size());
    ly.resize(curve.lags.size());
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        if (!(curve.peaks[i] > 0.0)) throw DataError("peak curve: non-positive peak");
        lx[i] = std::log(static_cast<double>(curve.lags[i]));
        ly[i] = std::log(curve.peaks[i]);
    }
}

} // namespace

PowerLawFit fit_peak_power_law(const PeakScalingCurve& curve, std::size_t first, std::size_t count)
{
    std::vector<double> lx, ly;
    log_axes(curve, lx, ly);
    if (count == 0) count = lx.size() - std::min(first, lx.size());
    if (first + count > lx.size() || count < 2) throw ConfigError("fit_peak_power_law: bad point range");
    const LinearFit fit = ols(std::span(lx).subspan(first, count), std::span(ly).subspan(first, count));
    return {-fit.slope, fit.slope_stderr, fit.intercept, fit.sse};
}

TwoRegimeFit fit_two_regime(const PeakScalingCurve& curve, std::size_t min_side)
{
    std::vector<double> lx, ly;
    log_axes(curve, lx, ly);
    const std::size_t n = lx.size();
    if (min_side < 2) throw ConfigError("fit_two_regime: min_side must be at least 2");
    if (n < 2 * min_side)
        throw AnalysisError("fit_two_regime: " + std::to_string(n) + " points cannot give " + std::to_string(min_side) +
                            " per side");

    TwoRegimeFit best;
    bool have = false;
    LinearFit best_left, best_right;
    for (std::size_t b = min_side; b + min_side <= n; ++b) {
        const auto left = ols(std::span(lx).first(b), std::span(ly).first(b));
        const auto right = ols(std::span(lx).subspan(b), std::span(ly).subspan(b));
        const double sse = left.sse + right.sse;
        if (!have || sse < best.sse - 1e-9 * (1.0 + best.sse)) {
            have = true;
            best.sse = sse;
            best.breakpoint_index = b;
            best_left = left;
            best_right = right;
        }
    }

    best.breakpoint = curve.lags[best.breakpoint_index];
    best.h_short = -best_left.slope;
    best.h_long = -best_right.slope;
    best.stderr_short = best_left.slope_stderr;
    best.stderr_long = best_right.slope_stderr;
    if (!(best.h_short > 0.0) || !(best.h_long > 0.0))
        throw AnalysisError("fit_two_regime: peak does not decay in one of the regimes");
    best.alpha_short = 1.0 / best.h_short;
    best.alpha_long = 1.0 / best.h_long;
    return best;
}

std::string to_string(DiffusionRegime r)
{
    switch (r) {
    case DiffusionRegime::subdiffusion: return "subdiffusion";
    case DiffusionRegime::normal: return "normal";
    case DiffusionRegime::superdiffusion: return "superdiffusion";
    }
    return "unknown";
}

DiffusionRegime classify_regime(double alpha, double tolerance)
{
    if (!(alpha > 0.0)) throw ConfigError("classify_regime: alpha must be positive");
    if (alpha > 2.0 + tolerance) return DiffusionRegime::subdiffusion;
    if (alpha < 2.0 - tolerance) return DiffusionRegime::superdiffusion;
    return DiffusionRegime::normal;
}

namespace {

double interpolate(const EmpiricalPdf& pdf, double x)
{
    const auto& g = pdf.grid;
    if (x <= g.front()) return pdf.density.front();
    if (x >= g.back()) return pdf.density.back();
    const auto it = std::upper_bound(g.begin(), g.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - g.begin());
    const double t = (x - g[i - 1]) / (g[i] - g[i - 1]);
    return pdf.density[i - 1] + t * (pdf.density[i] - pdf.density[i - 1]);
}

} // namespace

CollapseResult collapse_pdfs(const std::vector<std::pair<std::size_t, EmpiricalPdf>>& pdfs, double hurst,
                             const PdfFitOptions& options)
{
    if (pdfs.empty()) throw ConfigError("collapse_pdfs: no PDFs");
    if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("collapse_pdfs: H must lie in (0, 1)");

    // Profile likelihood in q: each lag's scale is optimized for the trial q.
    auto total_sse = [&](double q) {
        double total = 0.0;
        for (const auto& [lag, pdf] : pdfs) total += fit_q_gaussian_scale(pdf, q, options).sse;
        return total;
    };
    const auto [q_lo, q_hi] = detail::bracket_minimum(total_sse, options.q_min, options.q_max, 40);
    const auto [q, sse] = boost::math::tools::brent_find_minima(total_sse, q_lo, q_hi, 26);
    (void)sse;

    CollapseResult out;
    out.master_q = q;
    const double span = options.q_max - options.q_min;
    out.master_q_pinned = q - options.q_min <= 1e-4 * span || options.q_max - q <= 1e-4 * span;
    for (const auto& [lag, pdf] : pdfs) {
        if (lag == 0) throw ConfigError("collapse_pdfs: lags must be positive");
        const QGaussianFit fit = fit_q_gaussian_scale(pdf, q, options);
        out.lags.push_back(lag);
        out.scale_factors.push_back(fit.scale);
        out.implied_d.push_back(std::pow(fit.scale, 1.0 / hurst) / static_cast<double>(lag));

        EmpiricalPdf r = pdf;
        for (auto& x : r.grid) x /= fit.scale;
        for (auto& d : r.density) d *= fit.scale;
        r.bandwidth = pdf.bandwidth / fit.scale;
        out.rescaled.push_back(std::move(r));
    }

    if (out.lags.size() >= 2) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < out.lags.size(); ++i) {
            lx.push_back(std::log(static_cast<double>(out.lags[i])));
            ly.push_back(std::log(out.scale_factors[i]));
        }
        bool distinct = false;
        for (double v : lx) distinct = distinct || v != lx.front();
        if (distinct) out.scale_exponent = ols(lx, ly).slope;
    }

    // Sup-distance on the common rescaled range.
    double lo = -1e300, hi = 1e300;
    for (const auto& r : out.rescaled) {
        lo = std::max(lo, r.grid.front());
        hi = std::min(hi, r.grid.back());
    }
    out.collapse_distance = 0.0;
    if (out.rescaled.size() >= 2 && hi > lo) {
        constexpr std::size_t kPoints = 2001;
        for (std::size_t k = 0; k < kPoints; ++k) {
            const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(kPoints - 1);
            double mn = 1e300, mx = -1e300;
            for (const auto& r : out.rescaled) {
                const double d = interpolate(r, x);
                mn = std::min(mn, d);
                mx = std::max(mx, d);
            }
            out.collapse_distance = std::max(out.collapse_distance, mx - mn);
        }
    }
    return out;
}

} // namespace stylized
