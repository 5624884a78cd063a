#include <doctest.h>

#include "stylized/plotdata.hpp"

#include <cmath>
#include <sstream>

using namespace stylized;

namespace {

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST_SUITE("plotdata")
{
    TEST_CASE("numbers read back exactly")
    {
        for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
            CHECK(std::stod(format_number(v)) == v);
        CHECK(format_number(1.0) == "1");
        CHECK(format_number(std::nan("")) == "nan");
    }

    TEST_CASE("ACF rows carry minutes and standard errors")
    {
        AcfCurve c;
        c.lags = {0, 1, 2};
        c.values = {1.0, 0.5, 0.25};
        std::ostringstream out;
        write_acf_csv(out, c, 10);
        CHECK(lines(out.str()) == std::vector<std::string>{"s_minutes,C,stderr", "0,1,", "10,0.5,", "20,0.25,"});
        c.stderr_ = {0.0, 0.1, 0.2};
        std::ostringstream out2;
        write_acf_csv(out2, c, 10);
        CHECK(lines(out2.str())[2] == "10,0.5,0.1");
    }

    TEST_CASE("volatility aligns each window with its last price")
    {
        PriceSeries s;
        s.start = *parse_timestamp("2021-01-01T00:00Z");
        s.values = {1, 2, 4, 8};
        std::ostringstream out;
        write_volatility_csv(out, s, {0.5, 0.25}, 2);
        const auto l = lines(out.str());
        REQUIRE(l.size() == 5);
        CHECK(l[1] == "2021-01-01T00:00:00Z,1,");
        CHECK(l[2] == "2021-01-01T00:10:00Z,2,");
        CHECK(l[3] == "2021-01-01T00:20:00Z,4,0.5");
        CHECK(l[4] == "2021-01-01T00:30:00Z,8,0.25");
    }

    TEST_CASE("peak scaling with fit lines through the regimes")
    {
        PeakScalingCurve c;
        for (std::size_t t = 1; t <= 8; ++t) {
            c.lags.push_back(t);
            c.peaks.push_back(std::pow(static_cast<double>(t), -0.5));
            c.msd.push_back(static_cast<double>(t));
            c.at_zero.push_back(c.peaks.back());
        }
        const auto fit = fit_two_regime(c);
        std::ostringstream out;
        write_peak_scaling_csv(out, c, 10, &fit);
        const auto l = lines(out.str());
        REQUIRE(l.size() == 9);
        CHECK(l[0] == "lag,lag_minutes,p_max,p_at_zero,msd,fit_short,fit_long");
        // An exact power law is reproduced by both fit lines.
        std::istringstream row(l[4]);
        std::vector<double> f;
        for (std::string cell; std::getline(row, cell, ',');) f.push_back(std::stod(cell));
        CHECK(f[5] == doctest::Approx(f[2]).epsilon(1e-12));
        CHECK(f[6] == doctest::Approx(f[2]).epsilon(1e-12));
    }

    TEST_CASE("beta sweep writes one file per beta")
    {
        std::vector<double> w, h;
        for (int i = -20; i <= 20; ++i) {
            w.push_back(0.5 * i);
            h.push_back(0.5);
        }
        const auto sweep = beta_sweep(make_hurst_profile(w, h), {1.0, 0.1, 0.01, 0.001});
        const auto dir = std::filesystem::temp_directory_path() / "stylized_test_sweep";
        std::filesystem::remove_all(dir);
        const auto paths = write_beta_sweep(dir, "spectrum", sweep);
        REQUIRE(paths.size() == 4);
        CHECK(paths[0].filename() == "spectrum_beta_1.csv");
        CHECK(paths[3].filename() == "spectrum_beta_0.001.csv");
        for (const auto& p : paths) CHECK(std::filesystem::file_size(p) > 0);
    }

    TEST_CASE("hurst and fluctuation tables")
    {
        const auto p = make_hurst_profile({-1.0, 0.0, 1.0}, {0.6, 0.5, 0.4});
        std::ostringstream out;
        write_hurst_csv(out, p);
        CHECK(lines(out.str()) == std::vector<std::string>{"w,h,stderr,tau", "-1,0.6,0,-1.6", "0,0.5,0,-1", "1,0.4,0,-0.6"});

        FluctuationMatrix m;
        m.scales = {16, 32};
        m.orders = {-2.0, 2.0};
        m.values = {{1.0, 2.0}, {3.0, 4.0}};
        std::ostringstream f;
        write_fluctuation_csv(f, m);
        CHECK(lines(f.str()) == std::vector<std::string>{"scale,w,F", "16,-2,1", "16,2,3", "32,-2,2", "32,2,4"});
    }
}
