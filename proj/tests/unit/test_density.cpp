#include <doctest.h>

#include "stylized/density.hpp"
#include "stylized/error.hpp"
#include "stylized/stats.hpp"
#include "stylized/synth.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace stylized;

namespace {

// C_q evaluated with mpmath at 30 significant digits.
constexpr std::pair<double, double> norm_goldens[] = {
    {1.1, 1.8425738581962831193}, {1.25, 1.963495408493620774}, {1.5, 2.2214414690791831235},
    {2.0, 3.1415926535897932385}, {2.5, 5.9489548508043511229}, {2.9, 28.561040467845109821},
};

// Integral of f(x) g_q(x) over the real line, via x = tan(theta). Near the
// endpoints theta is rebuilt from its complement so tan and cos keep precision.
template <class F>
double integrate_against_gq(double q, F f)
{
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double half_pi = std::numbers::pi / 2.0;
    return integrator.integrate(
        [&](double theta, double complement) {
            double x, c;
            if (std::abs(theta) < 1.0) {
                x = std::tan(theta);
                c = std::cos(theta);
            } else {
                const double d = std::abs(complement);
                x = std::copysign(1.0 / std::tan(d), theta);
                c = std::sin(d);
            }
            const double g = std::isfinite(x) ? g_q(x, q) : 0.0;
            if (g == 0.0) return 0.0;
            return f(x) * (g / c) / c;
        },
        -half_pi, half_pi, 1e-13);
}

// Noise-free density sampled on a uniform grid.
EmpiricalPdf exact_pdf(double q, double scale, double half_width, std::size_t points, std::size_t n_samples)
{
    EmpiricalPdf pdf;
    pdf.bandwidth = 2.0 * half_width / static_cast<double>(points - 1);
    pdf.n_samples = n_samples;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = -half_width + static_cast<double>(i) * pdf.bandwidth;
        pdf.grid.push_back(x);
        pdf.density.push_back(q_gaussian_pdf(x, q, scale));
    }
    return pdf;
}

std::vector<double> normals(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = z(rng);
    return out;
}

} // namespace

TEST_SUITE("density")
{
    TEST_CASE("normalization constant against high-precision goldens")
    {
        for (auto [q, c] : norm_goldens) CHECK(q_gaussian_norm(q) == doctest::Approx(c).epsilon(1e-12));
        CHECK(std::abs(q_gaussian_norm(2.0) - std::numbers::pi) < 1e-10);
        // sqrt(2 pi) Gamma(1.5) / Gamma(2) = sqrt(2 pi) sqrt(pi) / 2.
        CHECK(q_gaussian_norm(1.5) == doctest::Approx(std::sqrt(2.0 * std::numbers::pi) * std::sqrt(std::numbers::pi) / 2.0));
        CHECK_THROWS_AS(q_gaussian_norm(1.0), ConfigError);
        CHECK_THROWS_AS(q_gaussian_norm(3.0), ConfigError);
    }

    TEST_CASE("g_q integrates to one")
    {
        for (double q : {1.1, 1.5, 2.0, 2.5}) {
            const double total = integrate_against_gq(q, [](double) { return 1.0; });
            CHECK_MESSAGE(std::abs(total - 1.0) < 1e-6, "q = " << q << " integral " << total);
        }
    }

    TEST_CASE("g_q special values")
    {
        CHECK(g_q(0.0, 1.0 + 1e-7) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-6));
        CHECK(g_q(0.0, 2.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
        CHECK(g_q(0.0, 1.5) == doctest::Approx(1.0 / 2.2214414690791831235).epsilon(1e-13));
        // Cauchy: 1 / (pi (1 + x^2)).
        CHECK(g_q(3.0, 2.0) == doctest::Approx(1.0 / (std::numbers::pi * 10.0)).epsilon(1e-13));
        for (double q : {1.1, 1.5, 2.9})
            for (double x : {0.1, 1.0, 7.5, 1e3}) CHECK(g_q(x, q) == g_q(-x, q));
        CHECK(q_gaussian_pdf(1.0, 1.5, 2.0) == doctest::Approx(0.5 * g_q(0.5, 1.5)));
        CHECK_THROWS_AS(g_q(0.0, 0.9), ConfigError);
    }

    TEST_CASE("variance of g_q for q = 1.3 equals the sampler's sample variance")
    {
        const double var = integrate_against_gq(1.3, [](double x) { return x * x; });
        const auto s = q_gaussian_sample(400000, 1.3, Seed{21});
        CHECK(sample_variance(s) == doctest::Approx(var).epsilon(0.03));
    }

    TEST_CASE("tail slope and q round trip")
    {
        CHECK(q_from_tail(-2.0) == doctest::Approx(2.0));
        CHECK(q_from_tail(-3.95) == doctest::Approx(1.506).epsilon(1e-3));
        CHECK(q_from_tail(-4.04) == doctest::Approx(1.495).epsilon(1e-3));
        for (double q : {1.01, 1.3, 1.5, 2.0, 2.7}) CHECK(q_from_tail(2.0 / (1.0 - q)) == doctest::Approx(q).epsilon(1e-15));
        CHECK_THROWS_AS(q_from_tail(0.0), ConfigError);
        CHECK_THROWS_AS(q_from_tail(1.0), ConfigError);
    }

    TEST_CASE("kde of standard normals")
    {
        const auto x = normals(100000, 1);
        const auto pdf = kde(x, 0.05);
        const double at0 = pdf.density[pdf.peak_index()];
        CHECK(at0 == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(0.03));
        CHECK(std::abs(trapezoid(pdf.grid, pdf.density) - 1.0) < 1e-3);
        CHECK(pdf.n_samples == 100000);
        CHECK(pdf.grid.size() % 2 == 1);
    }

    TEST_CASE("kde of identical samples is one kernel")
    {
        const std::vector<double> c(25, 3.0);
        const auto pdf = kde(c, 0.2);
        CHECK(pdf.peak() == doctest::Approx(1.0 / (0.2 * std::sqrt(2.0 * std::numbers::pi))).epsilon(1e-9));
        CHECK(pdf.grid[pdf.peak_index()] == doctest::Approx(3.0));
    }

    TEST_CASE("kde of two symmetric points")
    {
        std::vector<double> x(10, -1.0);
        x.insert(x.end(), 10, 1.0);
        const auto pdf = kde(x, 0.1);
        const std::size_t n = pdf.density.size();
        for (std::size_t i = 0; i < n; ++i) CHECK(pdf.density[i] == doctest::Approx(pdf.density[n - 1 - i]).epsilon(1e-12));
        CHECK(std::abs(trapezoid(pdf.grid, pdf.density) - 1.0) < 1e-3);
    }

    TEST_CASE("kde normalization and coverage, property sweep")
    {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            std::student_t_distribution<double> t(1.0 + trial * 0.3);
            std::vector<double> x(200 + 50 * trial);
            for (auto& v : x) v = t(rng);
            const double h = 0.01 * (1 + trial);
            const auto pdf = kde(x, h, 512);
            CHECK(std::abs(trapezoid(pdf.grid, pdf.density) - 1.0) < 1e-3);
            CHECK(pdf.grid.front() <= *std::min_element(x.begin(), x.end()) - 3.0 * h);
            CHECK(pdf.grid.back() >= *std::max_element(x.begin(), x.end()) + 3.0 * h);
            for (double d : pdf.density) CHECK(d >= 0.0);
        }
    }

    TEST_CASE("kde errors")
    {
        CHECK_THROWS_AS(kde(std::vector<double>(9, 1.0), 0.1), DataError);
        std::vector<double> x(20, 1.0);
        CHECK_THROWS_AS(kde(x, 0.0), ConfigError);
        x[3] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(kde(x, 0.1), DataError);
    }

    TEST_CASE("relative bandwidth")
    {
        auto x = normals(5000, 2);
        for (auto& v : x) v *= 40.0;
        const auto pdf = kde_relative(x, 0.05);
        CHECK(pdf.bandwidth == doctest::Approx(0.05 * std::sqrt(sample_variance(x))));
        const auto same = estimate_pdf(x, KdeOptions{0.05, true, 2048});
        CHECK(same.density == pdf.density);
    }

    TEST_CASE("semilog fit recovers noise-free parameters to four digits")
    {
        for (auto [q, scale] : {std::pair{1.3, 0.7}, std::pair{1.5, 1.0}, std::pair{1.8, 2.5}, std::pair{2.2, 0.01}}) {
            const auto pdf = exact_pdf(q, scale, 20.0 * scale, 4001, 1000000000);
            const auto fit = fit_q_gaussian_semilog(pdf);
            CHECK(fit.q == doctest::Approx(q).epsilon(1e-4));
            CHECK(fit.scale == doctest::Approx(scale).epsilon(1e-4));
            CHECK(fit.r_squared > 0.999999);
            CHECK(fit.method == FitMethod::semilog);
            CHECK_FALSE(fit.pinned);
        }
    }

    TEST_CASE("scale-only fit at known q")
    {
        const auto pdf = exact_pdf(1.6, 3.0, 60.0, 4001, 1000000000);
        const auto fit = fit_q_gaussian_scale(pdf, 1.6);
        CHECK(fit.scale == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(q_gaussian_log_sse(pdf, 1.6, 3.0, 10.0) < 1e-20);
    }

    TEST_CASE("semilog fit on q = 1.5 samples")
    {
        const auto x = q_gaussian_sample(1000000, 1.5, Seed{1});
        const auto fit = fit_q_gaussian_semilog(estimate_pdf(x, {}));
        CHECK(fit.q >= 1.45);
        CHECK(fit.q <= 1.55);
    }

    TEST_CASE("semilog fit on Gaussian samples lands near q = 1")
    {
        const auto pdf = estimate_pdf(normals(1000000, 3), {});
        const auto fit = fit_q_gaussian_semilog(pdf);
        CHECK(fit.q > 1.0);
        CHECK(fit.q < 1.1);
        const auto g = fit_gaussian(pdf);
        CHECK(g.sigma == doctest::Approx(1.0).epsilon(0.01));
        CHECK(g.r_squared > 0.999);
    }

    TEST_CASE("tail slope of an exact Cauchy density approaches -2 as the grid grows")
    {
        double previous = 0.0;
        for (double half : {50.0, 500.0, 5000.0}) {
            const auto pdf = exact_pdf(2.0, 1.0, half, 20001, std::size_t{1} << 62);
            const auto tail = fit_tail_exponent(pdf);
            CHECK(tail.slope < 0.0);
            CHECK(tail.x_lo < tail.x_hi);
            if (previous != 0.0) CHECK(std::abs(tail.slope + 2.0) < std::abs(previous + 2.0));
            previous = tail.slope;
        }
        CHECK(std::abs(previous + 2.0) < 1e-3);
    }

    TEST_CASE("tail slope on q = 1.5 samples is near -4")
    {
        const auto x = q_gaussian_sample(1000000, 1.5, Seed{2});
        const auto tail = fit_tail_exponent(estimate_pdf(x, {}));
        CHECK(tail.slope == doctest::Approx(-4.0).epsilon(0.1));
        CHECK(tail.stderr_ > 0.0);
        CHECK(tail.points >= 10);
    }

    TEST_CASE("fit support follows the count threshold")
    {
        const auto pdf = exact_pdf(1.5, 1.0, 50.0, 2001, 1000);
        const auto [lo, hi] = fit_support(pdf, 10.0);
        const double floor = 10.0 / (2.0 * 1000.0 * pdf.bandwidth);
        CHECK(pdf.density[lo] >= floor);
        CHECK(pdf.density[hi] >= floor);
        CHECK(pdf.density[lo - 1] < floor);
        CHECK(pdf.density[hi + 1] < floor);
    }

    TEST_CASE("interpolated density value")
    {
        EmpiricalPdf pdf;
        pdf.grid = {-1.0, 0.0, 1.0};
        pdf.density = {0.0, 1.0, 0.0};
        CHECK(pdf.value_at(0.0) == 1.0);
        CHECK(pdf.value_at(0.25) == 0.75);
        CHECK(pdf.value_at(-0.5) == 0.5);
        CHECK(pdf.value_at(1.0) == 0.0);
        CHECK(pdf.value_at(1.5) == 0.0);
    }

    TEST_CASE("method names")
    {
        CHECK(to_string(FitMethod::semilog) == "semilog");
        CHECK(to_string(FitMethod::tail) == "tail");
    }
}
