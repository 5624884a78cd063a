#include <doctest.h>

#include "stylized/autocorr.hpp"
#include "stylized/density.hpp"
#include "stylized/error.hpp"
#include "stylized/mfdfa.hpp"
#include "stylized/stats.hpp"
#include "stylized/synth.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace stylized;

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p)
{
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < sorted.size() ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac : sorted[i];
}

// CDF of g_q by adaptive quadrature of the density itself; far out only the tail is integrated.
double g_q_cdf(double x, double q)
{
    const auto density = [q](double t) { return g_q(t, q); };
    const double a = std::abs(x);
    double half = 0.0;
    if (a <= 1.0) {
        half = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, 0.0, a, 10, 1e-13);
    } else {
        boost::math::quadrature::exp_sinh<double> tail;
        half = 0.5 - tail.integrate(density, a, std::numeric_limits<double>::infinity());
    }
    return x < 0.0 ? 0.5 - half : 0.5 + half;
}

} // namespace

TEST_SUITE("synth")
{
    TEST_CASE("same seed, same stream")
    {
        CHECK(gaussian_white(100, 1.0, Seed{9}).values == gaussian_white(100, 1.0, Seed{9}).values);
        CHECK(gaussian_white(100, 1.0, Seed{9}).values != gaussian_white(100, 1.0, Seed{10}).values);
        CHECK(fgn(256, 0.3, Seed{1}).values == fgn(256, 0.3, Seed{1}).values);
        CHECK(q_gaussian_sample(50, 1.5, Seed{2}) == q_gaussian_sample(50, 1.5, Seed{2}));
    }

    TEST_CASE("white noise scales linearly in sigma")
    {
        const auto a = gaussian_white(1000, 1.0, Seed{3});
        const auto b = gaussian_white(1000, 2.5, Seed{3});
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(b.values[i] == 2.5 * a.values[i]);
        const auto big = gaussian_white(200000, 2.0, Seed{4});
        CHECK(mean(big.values) == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
        CHECK(std::sqrt(sample_variance(big.values)) == doctest::Approx(2.0).epsilon(0.01));
    }

    TEST_CASE("white noise moments at n = 1e6")
    {
        const auto x = gaussian_white(1000000, 1.0, Seed{11});
        CHECK(std::abs(mean(x.values)) <= 0.004);
        const double sd = std::sqrt(sample_variance(x.values));
        CHECK(sd >= 0.997);
        CHECK(sd <= 1.003);
    }

    TEST_CASE("fGn autocovariance")
    {
        CHECK(fgn_autocovariance(0, 0.7) == 1.0);
        CHECK(fgn_autocovariance(1, 0.7) == doctest::Approx(0.319507910772894).epsilon(1e-13));
        for (std::size_t k = 0; k < 20; ++k) CHECK(fgn_autocovariance(k, 0.5) == doctest::Approx(k == 0 ? 1.0 : 0.0).scale(1.0));
        for (std::size_t k = 1; k < 20; ++k) {
            CHECK(fgn_autocovariance(k, 0.3) < 0.0);
            CHECK(fgn_autocovariance(k, 0.8) > 0.0);
        }
    }

    TEST_CASE("fGn sample ACF follows the model")
    {
        for (double h : {0.3, 0.7}) {
            const auto x = fgn(1 << 18, h, Seed{5});
            CHECK(sample_variance(x.values) == doctest::Approx(1.0).epsilon(0.03));
            const auto c = sample_acf(x, 5);
            for (std::size_t k = 1; k <= 5; ++k)
                CHECK_MESSAGE(std::abs(c.values[k] - fgn_autocovariance(k, h)) < 0.02, "H " << h << " lag " << k);
        }
    }

    TEST_CASE("fGn special cases")
    {
        const std::size_t n = 1 << 16;
        const auto white = sample_acf(fgn(n, 0.5, Seed{12}), 1);
        CHECK(std::abs(white.values[1]) <= 3.0 / std::sqrt(static_cast<double>(n)));
        const auto x = fgn(n, 0.7, Seed{13});
        CHECK(std::abs(sample_acf(x, 1).values[1] - (std::pow(2.0, 1.4) - 2.0) / 2.0) <= 0.01);

        const auto p = profile(x);
        const auto m = fluctuation_matrix(p, default_scales(p.size()), {2.0});
        const auto [lo, hi] = default_fit_range(p.size());
        const double h2 = generalized_hurst(m, lo, hi).h[0];
        CHECK(h2 >= 0.65);
        CHECK(h2 <= 0.75);
    }

    TEST_CASE("fGn marginals pass a KS test against N(0,1)")
    {
        const auto ks = [](std::vector<double> x) {
            std::sort(x.begin(), x.end());
            const double n = static_cast<double>(x.size());
            double d = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double f = 0.5 * boost::math::erfc(-x[i] / std::sqrt(2.0));
                d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
            }
            return d;
        };
        const std::size_t n = 1 << 14;
        const double critical = 1.63 / std::sqrt(static_cast<double>(n));
        // Along one path the iid critical value only holds without long memory:
        // at H = 0.7 the path mean alone wanders by n^(H-1) ~ 0.05.
        for (double h : {0.3, 0.5}) {
            const double d = ks(fgn(n, h, Seed{14}).values);
            CHECK_MESSAGE(d < critical, "H " << h << " D " << d);
        }
        // One value from each of n independent realizations is an iid sample of the marginal.
        for (double h : {0.3, 0.5, 0.7}) {
            std::vector<double> pooled;
            for (std::size_t r = 0; r < n; ++r) pooled.push_back(fgn(64, h, Seed{1000 + r}).values[17]);
            const double d = ks(pooled);
            CHECK_MESSAGE(d < critical, "pooled H " << h << " D " << d);
        }
    }

    TEST_CASE("fGn preconditions")
    {
        CHECK_THROWS_AS(fgn(1000, 0.5, Seed{1}), ConfigError);
        CHECK_THROWS_AS(fgn(1024, 1.0, Seed{1}), ConfigError);
        CHECK_THROWS_AS(fgn(1024, 0.0, Seed{1}), ConfigError);
        CHECK_NOTHROW(fgn(1024, 0.05, Seed{1}));
        CHECK_NOTHROW(fgn(1024, 0.95, Seed{1}));
    }

    TEST_CASE("q near 1 approaches exp(-x^2)/sqrt(pi)")
    {
        const auto x = q_gaussian_sample(200000, 1.01, Seed{15});
        CHECK(std::sqrt(sample_variance(x)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
    }

    TEST_CASE("q = 2 is Cauchy-like: median 0 and IQR 2")
    {
        // g_2 = 1 / (pi (1 + x^2)), quartiles at +-1.
        auto x = q_gaussian_sample(400000, 2.0, Seed{6});
        std::sort(x.begin(), x.end());
        CHECK(std::abs(quantile_sorted(x, 0.5)) < 0.01);
        CHECK(quantile_sorted(x, 0.75) - quantile_sorted(x, 0.25) == doctest::Approx(2.0).epsilon(0.02));
    }

    TEST_CASE("q-Gaussian sampler passes a KS test against the integrated density")
    {
        for (double q : {1.2, 1.5, 2.5}) {
            const std::size_t n = 20000;
            auto x = q_gaussian_sample(n, q, Seed{7});
            std::sort(x.begin(), x.end());
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double f = g_q_cdf(x[i], q);
                d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
            }
            // 1% critical value of the one-sample KS statistic.
            CHECK_MESSAGE(d < 1.63 / std::sqrt(static_cast<double>(n)), "q " << q << " D " << d);
        }
        CHECK_THROWS_AS(q_gaussian_sample(10, 1.0, Seed{1}), ConfigError);
        CHECK_THROWS_AS(q_gaussian_sample(10, 3.0, Seed{1}), ConfigError);
    }

    TEST_CASE("AR(1) moments")
    {
        const double phi = 0.6;
        const auto x = ar1(500000, phi, Seed{8});
        CHECK(sample_variance(x.values) == doctest::Approx(1.0 / (1.0 - phi * phi)).epsilon(0.02));
        const auto c = sample_acf(x, 3);
        for (std::size_t k = 1; k <= 3; ++k) CHECK(c.values[k] == doctest::Approx(std::pow(phi, k)).epsilon(0.02));
        CHECK_THROWS_AS(ar1(10, 1.0, Seed{1}), ConfigError);
        CHECK(ar1(1000, 0.0, Seed{16}).values == gaussian_white(1000, 1.0, Seed{16}).values);
        CHECK(sample_acf(ar1(200000, -0.5, Seed{17}), 1).values[1] == doctest::Approx(-0.5).epsilon(0.02));
    }

    TEST_CASE("cumulative sums")
    {
        const auto c = cumulative({1.0, -2.0, 0.5}, 10.0);
        REQUIRE(c.size() == 4);
        CHECK(c == std::vector<double>{10.0, 11.0, 9.0, 9.5});
        CHECK(cumulative({}, 3.0) == std::vector<double>{3.0});
    }
}
