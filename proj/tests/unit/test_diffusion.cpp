#include <doctest.h>

#include "stylized/diffusion.hpp"
#include "stylized/error.hpp"
#include "stylized/stats.hpp"
#include "stylized/synth.hpp"

#include <cmath>
#include <numbers>

using namespace stylized;

namespace {

PeakScalingCurve power_curve(const std::vector<std::size_t>& lags, double h, double amplitude = 1.0)
{
    PeakScalingCurve c;
    c.lags = lags;
    for (auto t : lags) {
        c.peaks.push_back(amplitude * std::pow(static_cast<double>(t), -h));
        c.msd.push_back(std::pow(static_cast<double>(t), 2.0 * h));
    }
    return c;
}

// N(0, sigma^2) density on a uniform grid of +-12 sigma.
EmpiricalPdf gaussian_grid(double sigma, std::size_t points = 4001)
{
    EmpiricalPdf pdf;
    pdf.n_samples = std::size_t{1} << 40;
    const double half = 12.0 * sigma;
    pdf.bandwidth = 2.0 * half / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = -half + static_cast<double>(i) * pdf.bandwidth;
        pdf.grid.push_back(x);
        pdf.density.push_back(std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi)));
    }
    return pdf;
}

std::vector<double> log_of(const std::vector<double>& v)
{
    std::vector<double> out;
    for (double x : v) out.push_back(std::log(x));
    return out;
}

std::vector<double> log_lags(const std::vector<std::size_t>& lags)
{
    std::vector<double> out;
    for (auto t : lags) out.push_back(std::log(static_cast<double>(t)));
    return out;
}

} // namespace

TEST_SUITE("diffusion")
{
    TEST_CASE("random walk peak decays as t^-1/2")
    {
        const auto walk = cumulative(gaussian_white(1 << 16, 1.0, Seed{1}).values);
        const auto lags = default_lags(walk.size(), 24, 1000);
        const auto curve = peak_scaling(walk, lags);
        REQUIRE(curve.lags == lags);
        const auto fit = fit_peak_power_law(curve);
        CHECK(fit.h == doctest::Approx(0.5).epsilon(0.06));
        // Zero-mean symmetric ensembles peak close to x = 0.
        REQUIRE(curve.at_zero.size() == lags.size());
        for (std::size_t i = 0; i < lags.size(); ++i) CHECK(curve.at_zero[i] <= curve.peaks[i]);
        CHECK(curve.at_zero[0] == doctest::Approx(curve.peaks[0]).epsilon(0.05));
    }

    TEST_CASE("peak and second moment scale together on random walks")
    {
        // Points along one path are strongly correlated, so the spread is
        // taken across independent walks rather than from a single OLS fit.
        constexpr unsigned walks = 10;
        const auto lags = log_spaced(1, 128, 12);
        std::vector<double> slope_gap;
        std::vector<double> ratio(lags.size(), 0.0);
        for (unsigned w = 0; w < walks; ++w) {
            const auto walk = cumulative(gaussian_white(1 << 15, 1.0, Seed{100 + w}).values);
            const auto curve = peak_scaling(walk, lags);
            auto inv_peak = log_of(curve.peaks);
            for (auto& v : inv_peak) v = -v;
            auto root_msd = log_of(curve.msd);
            for (auto& v : root_msd) v *= 0.5;
            slope_gap.push_back(ols(log_lags(lags), inv_peak).slope - ols(log_lags(lags), root_msd).slope);
            for (std::size_t i = 0; i < lags.size(); ++i) ratio[i] += std::sqrt(curve.msd[i]) * curve.peaks[i] / walks;
        }

        SUBCASE("1/P_max and sqrt<x^2> keep a constant ratio within 5%")
        {
            const double m = mean(ratio);
            for (std::size_t i = 0; i < ratio.size(); ++i)
                CHECK_MESSAGE(std::abs(ratio[i] / m - 1.0) < 0.05, "lag " << lags[i]);
        }
        SUBCASE("peak and second-moment slopes agree within two standard errors")
        {
            const double stderr_gap = std::sqrt(sample_variance(slope_gap) / walks);
            CHECK(std::abs(mean(slope_gap)) <= 2.0 * stderr_gap);
        }
    }

    TEST_CASE("peak_scaling preconditions")
    {
        std::vector<double> ramp(400);
        for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 2.0 * static_cast<double>(i);
        CHECK_THROWS_AS(peak_scaling(ramp, {1, 2, 4}), AnalysisError);
        const auto walk = cumulative(gaussian_white(400, 1.0, Seed{2}).values);
        CHECK_THROWS_AS(peak_scaling(walk, {1, 2, 101}), DataError);
        CHECK_THROWS_AS(peak_scaling(walk, {2, 1}), ConfigError);
        CHECK_THROWS_AS(peak_scaling(walk, {0, 1}), ConfigError);
        CHECK_THROWS_AS(peak_scaling(walk, {}), ConfigError);
    }

    TEST_CASE("default lag grid")
    {
        const auto lags = default_lags(1 << 20);
        CHECK(lags.front() == 1);
        CHECK(lags.back() == 46000);
        CHECK(std::is_sorted(lags.begin(), lags.end()));
        CHECK(std::adjacent_find(lags.begin(), lags.end()) == lags.end());
        CHECK(default_lags(4000).back() < 1000);
    }

    TEST_CASE("two-regime fit of an exact single power law")
    {
        const auto curve = power_curve(log_spaced(1, 10000, 20), 0.5);
        const auto fit = fit_two_regime(curve);
        CHECK(fit.h_short == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fit.h_long == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fit.sse < 1e-20);
        CHECK(fit.alpha_short == doctest::Approx(2.0));
        // Every breakpoint ties; the smallest admissible one is taken.
        CHECK(fit.breakpoint_index == 4);
        CHECK(fit.breakpoint == curve.lags[4]);
    }

    TEST_CASE("two-regime fit recovers a broken power law")
    {
        const auto lags = log_spaced(1, 40000, 40);
        PeakScalingCurve c;
        c.lags = lags;
        const double tb = 300.0;
        for (auto t : lags) {
            const double x = static_cast<double>(t);
            c.peaks.push_back(x < tb ? std::pow(x, -0.415) : std::pow(tb, -0.415) * std::pow(x / tb, -0.61));
        }
        c.msd.assign(lags.size(), 1.0);
        const auto fit = fit_two_regime(c);
        CHECK(fit.h_short == doctest::Approx(0.415).epsilon(1e-9));
        CHECK(fit.h_long == doctest::Approx(0.61).epsilon(1e-9));
        CHECK(static_cast<double>(fit.breakpoint) >= tb);
        CHECK(static_cast<double>(lags[fit.breakpoint_index - 1]) < tb);
        CHECK(fit.alpha_short == doctest::Approx(1.0 / 0.415));
        CHECK(fit.alpha_long == doctest::Approx(1.0 / 0.61));

        SUBCASE("scale invariance")
        {
            auto scaled = c;
            for (auto& p : scaled.peaks) p *= 37.0;
            const auto g = fit_two_regime(scaled);
            CHECK(g.breakpoint == fit.breakpoint);
            CHECK(g.h_short == doctest::Approx(fit.h_short).epsilon(1e-12));
            CHECK(g.h_long == doctest::Approx(fit.h_long).epsilon(1e-12));
        }
    }

    TEST_CASE("two-regime errors")
    {
        CHECK_THROWS_AS(fit_two_regime(power_curve({1, 2, 3, 4, 5, 6, 7}, 0.5)), AnalysisError);
        CHECK_NOTHROW(fit_two_regime(power_curve({1, 2, 3, 4, 5, 6, 7, 8}, 0.5)));
        CHECK_THROWS_AS(fit_two_regime(power_curve({1, 2, 3, 4, 5, 6, 7, 8}, -0.5)), AnalysisError);
    }

    TEST_CASE("regime classification")
    {
        CHECK(classify_regime(2.41) == DiffusionRegime::subdiffusion);
        CHECK(classify_regime(2.0, 0.05) == DiffusionRegime::normal);
        CHECK(classify_regime(1.54) == DiffusionRegime::superdiffusion);
        CHECK(classify_regime(2.05) == DiffusionRegime::normal);
        CHECK(to_string(DiffusionRegime::subdiffusion) == "subdiffusion");
        CHECK_THROWS_AS(classify_regime(0.0), ConfigError);
        for (double h = 0.05; h < 1.0; h += 0.01) {
            const auto r = classify_regime(1.0 / h);
            if (1.0 / h > 2.05) CHECK(r == DiffusionRegime::subdiffusion);
            if (1.0 / h < 1.95) CHECK(r == DiffusionRegime::superdiffusion);
            if (r == DiffusionRegime::subdiffusion) CHECK(h < 0.5);
            if (r == DiffusionRegime::superdiffusion) CHECK(h > 0.5);
        }
    }

    TEST_CASE("Gaussian PDFs with sigma ~ t^1/2 collapse")
    {
        std::vector<std::pair<std::size_t, EmpiricalPdf>> pdfs;
        for (std::size_t t : {1u, 4u, 16u, 64u, 256u}) pdfs.emplace_back(t, gaussian_grid(std::sqrt(static_cast<double>(t))));
        const auto c = collapse_pdfs(pdfs, 0.5);
        CHECK(c.collapse_distance < 0.01);
        CHECK(c.scale_factors.size() == pdfs.size());
        CHECK(c.master_q < 1.01);
        CHECK(c.scale_exponent == doctest::Approx(0.5).epsilon(1e-3));
        // The q -> 1 limit is exp(-x^2)/sqrt(pi), so beta = sqrt(2) sigma and beta^2 / t = 2.
        for (double d : c.implied_d) CHECK(d == doctest::Approx(2.0).epsilon(1e-2));
    }

    TEST_CASE("collapse of a single PDF has zero distance")
    {
        const auto c = collapse_pdfs({{10, gaussian_grid(2.0)}}, 0.5);
        CHECK(c.collapse_distance == 0.0);
        CHECK(c.scale_factors.size() == 1);
        CHECK_THROWS_AS(collapse_pdfs({}, 0.5), ConfigError);
        CHECK_THROWS_AS(collapse_pdfs({{10, gaussian_grid(2.0)}}, 1.0), ConfigError);
    }

    TEST_CASE("mismatched scaling does not collapse")
    {
        std::vector<std::pair<std::size_t, EmpiricalPdf>> pdfs;
        pdfs.emplace_back(1, gaussian_grid(1.0));
        // Same scale, different shape: a q = 2 density cannot share the Gaussian's curve.
        EmpiricalPdf cauchy = gaussian_grid(1.0);
        for (std::size_t i = 0; i < cauchy.grid.size(); ++i) cauchy.density[i] = g_q(cauchy.grid[i], 2.0);
        pdfs.emplace_back(4, cauchy);
        CHECK(collapse_pdfs(pdfs, 0.5).collapse_distance > 0.05);
    }
}
