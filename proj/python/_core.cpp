#include "stylized/autocorr.hpp"
#include "stylized/density.hpp"
#include "stylized/diffusion.hpp"
#include "stylized/error.hpp"
#include "stylized/mfdfa.hpp"
#include "stylized/pipeline.hpp"
#include "stylized/series.hpp"
#include "stylized/synth.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace stylized;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::span<const double> view(const Array& a)
{
    if (a.ndim() != 1) throw ConfigError("expected a one-dimensional array");
    return {a.data(), static_cast<std::size_t>(a.size())};
}

py::array_t<double> to_array(const std::vector<double>& v)
{
    return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

// Increments of a series handed over as a bare array.
ReturnSeries returns_of(const Array& a)
{
    const auto s = view(a);
    ReturnSeries r;
    r.values.assign(s.begin(), s.end());
    return r;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Stylized-facts analysis of high-frequency price series";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<AnalysisError>(m, "AnalysisError", base.ptr());

    // synthetic data
    m.def("gaussian_white", [](std::size_t n, double sigma, std::uint64_t seed) {
        return to_array(gaussian_white(n, sigma, Seed{seed}).values);
    }, py::arg("n"), py::arg("sigma") = 1.0, py::arg("seed") = 1);
    m.def("fgn", [](std::size_t n, double hurst, std::uint64_t seed) {
        return to_array(fgn(n, hurst, Seed{seed}).values);
    }, py::arg("n"), py::arg("hurst"), py::arg("seed") = 1);
    m.def("ar1", [](std::size_t n, double phi, std::uint64_t seed) {
        return to_array(ar1(n, phi, Seed{seed}).values);
    }, py::arg("n"), py::arg("phi"), py::arg("seed") = 1);
    m.def("q_gaussian_sample", [](std::size_t n, double q, std::uint64_t seed) {
        return to_array(q_gaussian_sample(n, q, Seed{seed}));
    }, py::arg("n"), py::arg("q"), py::arg("seed") = 1);
    m.def("cumulative", [](const Array& steps, double start) {
        const auto s = view(steps);
        return to_array(cumulative(std::vector<double>(s.begin(), s.end()), start));
    }, py::arg("steps"), py::arg("start") = 0.0);

    // series
    m.def("moving_average_trend", [](const Array& values, std::size_t window) {
        const auto d = moving_average_trend(view(values), window);
        return py::make_tuple(to_array(d.trend), to_array(d.residual));
    }, py::arg("values"), py::arg("window"), "Returns (trend, residual).");

    // density
    py::class_<EmpiricalPdf>(m, "EmpiricalPdf")
        .def_property_readonly("grid", [](const EmpiricalPdf& p) { return to_array(p.grid); })
        .def_property_readonly("density", [](const EmpiricalPdf& p) { return to_array(p.density); })
        .def_readonly("bandwidth", &EmpiricalPdf::bandwidth)
        .def_readonly("n_samples", &EmpiricalPdf::n_samples)
        .def("peak", &EmpiricalPdf::peak)
        .def("value_at", &EmpiricalPdf::value_at);
    m.def("estimate_pdf", [](const Array& samples, double bandwidth, bool relative, std::size_t grid_size) {
        return estimate_pdf(view(samples), KdeOptions{bandwidth, relative, grid_size});
    }, py::arg("samples"), py::arg("bandwidth") = 0.05, py::arg("relative") = true, py::arg("grid_size") = 2048);
    m.def("g_q", &g_q, py::arg("x"), py::arg("q"));
    m.def("q_gaussian_norm", &q_gaussian_norm, py::arg("q"));
    m.def("q_gaussian_pdf", &q_gaussian_pdf, py::arg("x"), py::arg("q"), py::arg("scale"));
    m.def("q_from_tail", &q_from_tail, py::arg("slope"));

    py::class_<QGaussianFit>(m, "QGaussianFit")
        .def_readonly("q", &QGaussianFit::q)
        .def_readonly("scale", &QGaussianFit::scale)
        .def_readonly("r_squared", &QGaussianFit::r_squared)
        .def_readonly("pinned", &QGaussianFit::pinned);
    py::class_<TailFit>(m, "TailFit")
        .def_readonly("slope", &TailFit::slope)
        .def_readonly("stderr", &TailFit::stderr_)
        .def_readonly("x_lo", &TailFit::x_lo)
        .def_readonly("x_hi", &TailFit::x_hi);
    m.def("fit_q_gaussian_semilog", [](const EmpiricalPdf& pdf) { return fit_q_gaussian_semilog(pdf); }, py::arg("pdf"));
    m.def("fit_tail_exponent", &fit_tail_exponent, py::arg("pdf"), py::arg("tail_fraction") = 0.25,
          py::arg("min_count") = 10.0);

    // diffusion
    py::class_<PeakScalingCurve>(m, "PeakScalingCurve")
        .def_readonly("lags", &PeakScalingCurve::lags)
        .def_property_readonly("peaks", [](const PeakScalingCurve& c) { return to_array(c.peaks); })
        .def_property_readonly("msd", [](const PeakScalingCurve& c) { return to_array(c.msd); });
    py::class_<TwoRegimeFit>(m, "TwoRegimeFit")
        .def_readonly("h_short", &TwoRegimeFit::h_short)
        .def_readonly("h_long", &TwoRegimeFit::h_long)
        .def_readonly("breakpoint", &TwoRegimeFit::breakpoint)
        .def_readonly("alpha_short", &TwoRegimeFit::alpha_short)
        .def_readonly("alpha_long", &TwoRegimeFit::alpha_long);
    m.def("default_lags", &default_lags, py::arg("series_length"), py::arg("count") = 48, py::arg("max_lag") = 46000);
    m.def("peak_scaling", [](const Array& index, const std::vector<std::size_t>& lags) {
        return peak_scaling(view(index), lags);
    }, py::arg("index"), py::arg("lags"));
    m.def("fit_peak_power_law", [](const PeakScalingCurve& c) { return fit_peak_power_law(c).h; }, py::arg("curve"),
          "Single power-law exponent h of P_max ~ t^-h.");
    m.def("fit_two_regime", &fit_two_regime, py::arg("curve"), py::arg("min_side") = 4);

    // autocorrelation
    py::class_<AcfCurve>(m, "AcfCurve")
        .def_readonly("lags", &AcfCurve::lags)
        .def_property_readonly("values", [](const AcfCurve& c) { return to_array(c.values); })
        .def_property_readonly("stderr", [](const AcfCurve& c) { return to_array(c.stderr_); })
        .def_readonly("segments", &AcfCurve::segments)
        .def_readonly("dropped_segments", &AcfCurve::dropped_segments);
    m.def("sample_acf", [](const Array& r, std::size_t max_lag) { return sample_acf(view(r), max_lag); },
          py::arg("returns"), py::arg("max_lag"));
    m.def("chopped_acf", [](const Array& r, std::size_t segment_length, std::size_t max_lag) {
        return chopped_acf(view(r), segment_length, max_lag);
    }, py::arg("returns"), py::arg("segment_length") = 1000, py::arg("max_lag") = 0);
    m.def("fit_abs_acf_slope", [](const AcfCurve& c, std::size_t lo, std::size_t hi) {
        const auto f = fit_abs_acf_slope(c, lo, hi);
        return py::make_tuple(f.slope, f.stderr_);
    }, py::arg("curve"), py::arg("s_lo") = 1, py::arg("s_hi") = 10, "Returns (slope, stderr).");
    m.def("hurst_from_acf_slope", &hurst_from_acf_slope, py::arg("slope"));
    m.def("memory_time", &memory_time, py::arg("curve"), py::arg("cutoff") = 0.01);

    // MF-DFA
    py::class_<HurstProfile>(m, "HurstProfile")
        .def(py::init(&make_hurst_profile), py::arg("orders"), py::arg("h"))
        .def_readonly("orders", &HurstProfile::orders)
        .def_readonly("h", &HurstProfile::h)
        .def_readonly("stderr", &HurstProfile::stderr_)
        .def_readonly("tau", &HurstProfile::tau);
    m.def("mfdfa", [](const Array& returns, std::vector<std::size_t> scales, std::vector<double> orders,
                      std::size_t fit_lo, std::size_t fit_hi) {
        const auto r = returns_of(returns);
        if (scales.empty()) scales = default_scales(r.size());
        if (orders.empty()) orders = default_orders();
        if (fit_lo == 0 && fit_hi == 0) std::tie(fit_lo, fit_hi) = default_fit_range(r.size());
        return generalized_hurst(fluctuation_matrix(profile(r), scales, orders), fit_lo, fit_hi);
    }, py::arg("returns"), py::arg("scales") = std::vector<std::size_t>{}, py::arg("orders") = std::vector<double>{},
       py::arg("fit_lo") = 0, py::arg("fit_hi") = 0,
       "Generalized Hurst profile h(w); empty arguments take the defaults.");

    py::class_<SpectrumPeak>(m, "SpectrumPeak")
        .def_readonly("gamma", &SpectrumPeak::gamma)
        .def_readonly("f", &SpectrumPeak::f)
        .def_readonly("prominence", &SpectrumPeak::prominence);
    py::class_<LegendreSpectrum>(m, "LegendreSpectrum")
        .def_readonly("beta", &LegendreSpectrum::beta)
        .def_readonly("gamma", &LegendreSpectrum::gamma)
        .def_readonly("f", &LegendreSpectrum::f)
        .def_readonly("peaks", &LegendreSpectrum::peaks)
        .def("width", &LegendreSpectrum::width, py::arg("level"));
    m.def("legendre_spectrum", &legendre_spectrum, py::arg("hurst"), py::arg("beta"), py::arg("min_prominence") = 0.02);
    m.def("beta_sweep", [](const HurstProfile& h, const std::vector<double>& betas) {
        const auto s = beta_sweep(h, betas);
        return py::make_tuple(s.spectra, to_string(s.verdict));
    }, py::arg("hurst"), py::arg("betas"), "Returns (spectra, verdict).");
    m.def("multifractality_test", [](const HurstProfile& h) {
        const auto t = multifractality_test(h);
        py::dict d;
        d["verdict"] = to_string(t.verdict);
        d["slope_negative"] = t.slope_negative;
        d["slope_positive"] = t.slope_positive;
        d["h_range"] = t.h_range;
        return d;
    }, py::arg("hurst"));

    // whole runs
    m.def("validate_config", [](const std::string& text) { validate(parse_config(text)); }, py::arg("json_text"));
    m.def("default_config", [] { return to_json(RunConfig{}); });
    m.def("run", [](const std::string& text) {
        const auto report = run(parse_config(text));
        return py::make_tuple(to_json(report), exit_code(report));
    }, py::arg("json_text"), "Runs a config given as JSON text. Returns (report_json, exit_code).");
}
