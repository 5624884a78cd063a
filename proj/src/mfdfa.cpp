#include "stylized/mfdfa.hpp"

#include "stylized/error.hpp"
#include "stylized/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stylized {

std::vector<double> profile(std::span<const double> returns)
{
    if (returns.size() < 16) throw DataError("profile: need at least 16 returns, got " + std::to_string(returns.size()));
    const double m = mean(returns);
    std::vector<double> out(returns.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        acc += returns[i] - m;
        out[i] = acc;
    }
    return out;
}

std::vector<std::size_t> default_scales(std::size_t n, std::size_t count, std::size_t min_scale)
{
    if (min_scale < 4) throw ConfigError("default_scales: min_scale must be at least 4");
    if (n / 4 < min_scale) throw DataError("series too short for MF-DFA scales");
    return log_spaced(min_scale, n / 4, count);
}

std::pair<std::size_t, std::size_t> default_fit_range(std::size_t n)
{
    if (n / 16 < 64) throw DataError("series too short for the default MF-DFA fit range");
    return {16, n / 16};
}

std::vector<double> default_orders(double max_order, double step)
{
    if (!(max_order > 0.0) || !(step > 0.0)) throw ConfigError("default_orders: bad range");
    const auto k = static_cast<long>(std::llround(max_order / step));
    std::vector<double> out;
    for (long i = -k; i <= k; ++i) out.push_back(static_cast<double>(i) * step);
    return out;
}

FluctuationMatrix fluctuation_matrix(std::span<const double> prof, const std::vector<std::size_t>& scales,
                                     const std::vector<double>& orders)
{
    const std::size_t n = prof.size();
    if (scales.empty() || orders.empty()) throw ConfigError("fluctuation_matrix: empty scales or orders");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < 4) throw ConfigError("fluctuation_matrix: scales must be at least 4");
        if (i > 0 && scales[i] <= scales[i - 1]) throw ConfigError("fluctuation_matrix: scales must increase");
    }
    if (scales.back() > n / 4)
        throw ConfigError("fluctuation_matrix: largest scale " + std::to_string(scales.back()) + " exceeds N/4 = " +
                          std::to_string(n / 4));

    FluctuationMatrix m;
    m.scales = scales;
    m.orders = orders;
    m.values.assign(orders.size(), std::vector<double>(scales.size(), 0.0));
    m.segments.resize(scales.size());
    m.skipped.resize(scales.size());

    for (std::size_t si = 0; si < scales.size(); ++si) {
        const std::size_t s = scales[si];
        const std::size_t count = n / s;
        const double ds = static_cast<double>(s);
        const double xbar = (ds + 1.0) / 2.0;
        const double sxx = ds * (ds * ds - 1.0) / 12.0;

        std::vector<double> log_f2;
        log_f2.reserve(count);
        for (std::size_t v = 0; v < count; ++v) {
            const auto seg = prof.subspan(v * s, s);
            const double ybar = mean(seg);
            double sxy = 0.0, scale2 = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                sxy += (static_cast<double>(i + 1) - xbar) * (seg[i] - ybar);
                scale2 += seg[i] * seg[i];
            }
            const double slope = sxy / sxx;
            double f2 = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                const double r = seg[i] - ybar - slope * (static_cast<double>(i + 1) - xbar);
                f2 += r * r;
            }
            f2 /= ds;
            if (!(f2 > 1e-24 * (scale2 / ds)) || f2 == 0.0) {
                ++m.skipped[si];
                continue;
            }
            log_f2.push_back(std::log(f2));
        }
        if (log_f2.empty())
            throw AnalysisError("fluctuation_matrix: every segment at scale " + std::to_string(s) +
                                " has zero residual variance");
        m.segments[si] = log_f2.size();

        const double k = static_cast<double>(log_f2.size());
        for (std::size_t oi = 0; oi < orders.size(); ++oi) {
            const double w = orders[oi];
            double log_fw = 0.0;
            if (w == 0.0) {
                log_fw = std::accumulate(log_f2.begin(), log_f2.end(), 0.0) / (2.0 * k);
            } else {
                // log of mean(exp(w/2 * ln F^2)), evaluated stably
                double top = -1e300;
                for (double l : log_f2) top = std::max(top, 0.5 * w * l);
                double acc = 0.0;
                for (double l : log_f2) acc += std::exp(0.5 * w * l - top);
                log_fw = (top + std::log(acc / k)) / w;
            }
            m.values[oi][si] = std::exp(log_fw);
        }
    }
    return m;
}

HurstProfile make_hurst_profile(std::vector<double> orders, std::vector<double> h)
{
    if (orders.size() != h.size()) throw ConfigError("hurst profile: orders and h differ in length");
    HurstProfile p;
    p.orders = std::move(orders);
    p.h = std::move(h);
    p.stderr_.assign(p.h.size(), 0.0);
    p.tau.resize(p.h.size());
    for (std::size_t i = 0; i < p.h.size(); ++i) p.tau[i] = p.orders[i] * p.h[i] - 1.0;
    return p;
}

HurstProfile generalized_hurst(const FluctuationMatrix& matrix, std::size_t s_lo, std::size_t s_hi)
{
    if (s_lo >= s_hi) throw ConfigError("generalized_hurst: need s_lo < s_hi");
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < matrix.scales.size(); ++i)
        if (matrix.scales[i] >= s_lo && matrix.scales[i] <= s_hi) picked.push_back(i);
    if (picked.size() < 6)
        throw ConfigError("generalized_hurst: only " + std::to_string(picked.size()) + " scales in [" +
                          std::to_string(s_lo) + ", " + std::to_string(s_hi) + "], need 6");

    std::vector<double> lx;
    for (std::size_t i : picked) lx.push_back(std::log(static_cast<double>(matrix.scales[i])));

    std::vector<double> h(matrix.orders.size()), se(matrix.orders.size());
    for (std::size_t oi = 0; oi < matrix.orders.size(); ++oi) {
        std::vector<double> ly;
        for (std::size_t i : picked) ly.push_back(std::log(matrix.values[oi][i]));
        const LinearFit fit = ols(lx, ly);
        h[oi] = fit.slope;
        se[oi] = fit.slope_stderr;
    }
    HurstProfile p = make_hurst_profile(matrix.orders, std::move(h));
    p.stderr_ = std::move(se);
    return p;
}

std::string to_string(Fractality f)
{
    return f == Fractality::monofractal ? "monofractal" : "multifractal";
}

double LegendreSpectrum::width(double level) const
{
    if (f.empty()) return 0.0;
    const std::size_t top = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
    if (f[top] < level) return 0.0;

    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double t = (f[inside] - level) / (f[inside] - f[outside]);
        return gamma[inside] + t * (gamma[outside] - gamma[inside]);
    };
    std::size_t lo = top, hi = top;
    while (lo > 0 && f[lo - 1] >= level) --lo;
    while (hi + 1 < f.size() && f[hi + 1] >= level) ++hi;
    const double left = lo > 0 ? crossing(lo, lo - 1) : gamma[lo];
    const double right = hi + 1 < f.size() ? crossing(hi, hi + 1) : gamma[hi];
    return right - left;
}

namespace {

std::vector<SpectrumPeak> find_peaks(const std::vector<double>& x, const std::vector<double>& y, double min_prominence)
{
    std::vector<SpectrumPeak> peaks;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;
        if (j + 1 < n && y[j + 1] < y[i]) {
            const double top = y[i];
            double left_min = top;
            for (std::size_t k = i; k-- > 0;) {
                if (y[k] > top) break;
                left_min = std::min(left_min, y[k]);
            }
            double right_min = top;
            for (std::size_t k = j + 1; k < n; ++k) {
                if (y[k] > top) break;
                right_min = std::min(right_min, y[k]);
            }
            const double prominence = top - std::max(left_min, right_min);
            if (prominence >= min_prominence) peaks.push_back({0.5 * (x[i] + x[j]), top, prominence});
        }
        i = j + 1;
    }
    return peaks;
}

} // namespace

LegendreSpectrum legendre_spectrum(const HurstProfile& hurst, double beta, double min_prominence)
{
    if (!(beta > 0.0)) throw ConfigError("legendre_spectrum: beta must be positive");
    const auto& w = hurst.orders;
    const auto& h = hurst.h;
    const std::size_t n = w.size();
    if (n < 3 || h.size() != n) throw ConfigError("legendre_spectrum: need at least 3 orders");
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !(w[i] > w[i - 1])) throw ConfigError("legendre_spectrum: orders must increase");
        if (std::abs(w[i] + w[n - 1 - i]) > 1e-9 * (1.0 + std::abs(w[i])))
            throw ConfigError("legendre_spectrum: order grid must be symmetric about 0");
    }

    std::vector<double> dh(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? n - 1 : i + 1;
        dh[i] = (h[b] - h[a]) / (w[b] - w[a]);
    }

    std::vector<double> g(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hb = beta * w[i] * w[i] * w[i] + h[i];
        const double dhb = 3.0 * beta * w[i] * w[i] + dh[i];
        g[i] = hb - w[i] * dhb;
        f[i] = w[i] * (g[i] - hb) + 1.0;
    }

    const bool decreasing = g[1] < g[0];
    for (std::size_t i = 1; i < n; ++i) {
        const bool ok = decreasing ? g[i] < g[i - 1] : g[i] > g[i - 1];
        if (!ok)
            throw AnalysisError("legendre_spectrum: gamma(w) is not monotonic at beta = " + std::to_string(beta) +
                                " near w = " + std::to_string(w[i]) + "; raise beta or refine the order grid");
    }

    LegendreSpectrum out;
    out.beta = beta;
    out.orders = w;
    out.gamma = std::move(g);
    out.f = std::move(f);
    if (decreasing) {
        std::reverse(out.orders.begin(), out.orders.end());
        std::reverse(out.gamma.begin(), out.gamma.end());
        std::reverse(out.f.begin(), out.f.end());
    }
    out.peaks = find_peaks(out.gamma, out.f, min_prominence);
    return out;
}

BetaSweep beta_sweep(const HurstProfile& hurst, const std::vector<double>& betas)
{
    if (betas.empty()) throw ConfigError("beta_sweep: no betas");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) throw ConfigError("beta_sweep: betas must be positive");
        if (i > 0 && !(betas[i] < betas[i - 1])) throw ConfigError("beta_sweep: betas must decrease");
    }
    BetaSweep sweep;
    for (double b : betas) sweep.spectra.push_back(legendre_spectrum(hurst, b));
    sweep.verdict = sweep.spectra.back().peaks.size() >= 2 ? Fractality::multifractal : Fractality::monofractal;
    return sweep;
}

MultifractalityTest multifractality_test(const HurstProfile& hurst, double slope_threshold, double range_threshold)
{
    std::vector<double> wn, hn, wp, hp;
    for (std::size_t i = 0; i < hurst.orders.size(); ++i) {
        if (hurst.orders[i] < 0.0) {
            wn.push_back(hurst.orders[i]);
            hn.push_back(hurst.h[i]);
        } else if (hurst.orders[i] > 0.0) {
            wp.push_back(hurst.orders[i]);
            hp.push_back(hurst.h[i]);
        }
    }
    if (wn.size() < 2 || wp.size() < 2)
        throw ConfigError("multifractality_test: need at least two negative and two positive orders");

    MultifractalityTest t;
    const LinearFit neg = ols(wn, hn);
    const LinearFit pos = ols(wp, hp);
    t.slope_negative = neg.slope;
    t.stderr_negative = neg.slope_stderr;
    t.slope_positive = pos.slope;
    t.stderr_positive = pos.slope_stderr;
    const auto [mn, mx] = std::minmax_element(hurst.h.begin(), hurst.h.end());
    t.h_range = *mx - *mn;
    const bool steep = std::max(std::abs(t.slope_negative), std::abs(t.slope_positive)) > slope_threshold;
    t.verdict = (steep || t.h_range > range_threshold) ? Fractality::multifractal : Fractality::monofractal;
    return t;
}

} // namespace stylized
