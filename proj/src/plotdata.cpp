#include "stylized/plotdata.hpp"

#include "stylized/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

namespace stylized {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string num(double v)
{
    return format_number(v);
}

} // namespace

void write_volatility_csv(std::ostream& out, const PriceSeries& series, const std::vector<double>& volatility,
                          std::size_t window)
{
    // volatility[i] covers returns i..i+window-1, i.e. prices i..i+window.
    out << "time,index,volatility\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_timestamp(series.time_at(i)) << ',' << num(series.values[i]) << ',';
        if (i >= window && i - window < volatility.size()) out << num(volatility[i - window]);
        out << '\n';
    }
}

void write_pdf_csv(std::ostream& out, const EmpiricalPdf& pdf)
{
    out << "x,density\n";
    for (std::size_t i = 0; i < pdf.grid.size(); ++i) out << num(pdf.grid[i]) << ',' << num(pdf.density[i]) << '\n';
}

void write_pdf_fits_csv(std::ostream& out, const EmpiricalPdf& pdf, const QGaussianFit& qfit, const GaussianFit& gfit,
                        const TailFit& tail)
{
    out << "x,density,q_gaussian,gaussian,tail\n";
    const double norm = 1.0 / (gfit.sigma * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < pdf.grid.size(); ++i) {
        const double x = pdf.grid[i];
        const double z = (x - gfit.mean) / gfit.sigma;
        out << num(x) << ',' << num(pdf.density[i]) << ',' << num(q_gaussian_pdf(x, qfit.q, qfit.scale)) << ','
            << num(norm * std::exp(-0.5 * z * z)) << ',';
        if (x >= tail.x_lo && x <= tail.x_hi && x > 0.0) out << num(std::exp(tail.intercept + tail.slope * std::log(x)));
        out << '\n';
    }
}

void write_peak_scaling_csv(std::ostream& out, const PeakScalingCurve& curve, int dt_minutes, const TwoRegimeFit* fit)
{
    out << "lag,lag_minutes,p_max,p_at_zero,msd,fit_short,fit_long\n";
    // OLS intercept of each regime: mean of ln P + h ln t over its points.
    double a_short = 0.0, a_long = 0.0;
    if (fit) {
        double ss = 0.0, sl = 0.0;
        std::size_t ns = 0, nl = 0;
        for (std::size_t i = 0; i < curve.lags.size(); ++i) {
            const double lt = std::log(static_cast<double>(curve.lags[i]));
            if (i < fit->breakpoint_index) {
                ss += std::log(curve.peaks[i]) + fit->h_short * lt;
                ++ns;
            } else {
                sl += std::log(curve.peaks[i]) + fit->h_long * lt;
                ++nl;
            }
        }
        a_short = ns ? ss / static_cast<double>(ns) : 0.0;
        a_long = nl ? sl / static_cast<double>(nl) : 0.0;
    }
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        const double t = static_cast<double>(curve.lags[i]);
        out << curve.lags[i] << ',' << num(t * dt_minutes) << ',' << num(curve.peaks[i]) << ','
            << (i < curve.at_zero.size() ? num(curve.at_zero[i]) : "") << ',' << num(curve.msd[i]) << ',';
        if (fit) out << num(std::exp(a_short - fit->h_short * std::log(t))) << ','
                     << num(std::exp(a_long - fit->h_long * std::log(t)));
        else out << ',';
        out << '\n';
    }
}

void write_acf_csv(std::ostream& out, const AcfCurve& curve, int dt_minutes)
{
    out << "s_minutes,C,stderr\n";
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        out << curve.lags[i] * static_cast<std::size_t>(dt_minutes) << ',' << num(curve.values[i]) << ',';
        if (i < curve.stderr_.size()) out << num(curve.stderr_[i]);
        out << '\n';
    }
}

void write_detrend_csv(std::ostream& out, const PriceSeries& series, const TrendDecomposition& d)
{
    out << "time,index,trend,residual\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << format_timestamp(series.time_at(i)) << ',' << num(series.values[i]) << ',' << num(d.trend[i]) << ','
            << num(d.residual[i]) << '\n';
}

void write_collapse_csv(std::ostream& out, const CollapseResult& c)
{
    out << "lag,x,density,master\n";
    for (std::size_t k = 0; k < c.rescaled.size(); ++k) {
        const auto& pdf = c.rescaled[k];
        for (std::size_t i = 0; i < pdf.grid.size(); ++i)
            out << c.lags[k] << ',' << num(pdf.grid[i]) << ',' << num(pdf.density[i]) << ','
                << num(g_q(pdf.grid[i], c.master_q)) << '\n';
    }
}

void write_fluctuation_csv(std::ostream& out, const FluctuationMatrix& m)
{
    out << "scale,w,F\n";
    for (std::size_t si = 0; si < m.scales.size(); ++si)
        for (std::size_t oi = 0; oi < m.orders.size(); ++oi)
            out << m.scales[si] << ',' << num(m.orders[oi]) << ',' << num(m.at(oi, si)) << '\n';
}

void write_hurst_csv(std::ostream& out, const HurstProfile& p)
{
    out << "w,h,stderr,tau\n";
    for (std::size_t i = 0; i < p.orders.size(); ++i)
        out << num(p.orders[i]) << ',' << num(p.h[i]) << ',' << num(p.stderr_[i]) << ',' << num(p.tau[i]) << '\n';
}

void write_spectrum_csv(std::ostream& out, const LegendreSpectrum& s)
{
    out << "w,gamma,f\n";
    for (std::size_t i = 0; i < s.gamma.size(); ++i)
        out << num(s.orders[i]) << ',' << num(s.gamma[i]) << ',' << num(s.f[i]) << '\n';
}

std::vector<std::filesystem::path> write_beta_sweep(const std::filesystem::path& dir, const std::string& stem,
                                                    const BetaSweep& sweep)
{
    std::vector<std::filesystem::path> paths;
    for (const auto& s : sweep.spectra) {
        auto path = dir / (stem + "_beta_" + format_number(s.beta) + ".csv");
        write_file(path, [&](std::ostream& out) { write_spectrum_csv(out, s); });
        paths.push_back(std::move(path));
    }
    return paths;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fn)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    fn(out);
    out.flush();
    if (!out) throw DataError("write failed for " + path.string());
}

} // namespace stylized
