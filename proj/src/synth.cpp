#include "stylized/synth.hpp"

#include "stylized/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <random>
#include <string>

namespace stylized {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Forward DFT of a complex vector in place.
void dft(std::vector<std::complex<double>>& data)
{
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE));
    }
    if (!plan) throw AnalysisError("fft planning failed");
    fftw_execute(plan.get());
}

bool power_of_two(std::size_t n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

} // namespace

ReturnSeries gaussian_white(std::size_t n, double sigma, Seed seed)
{
    if (n == 0) throw ConfigError("gaussian_white: n must be positive");
    if (!(sigma > 0.0)) throw ConfigError("gaussian_white: sigma must be positive");
    std::mt19937_64 rng(seed.value);
    std::normal_distribution<double> normal(0.0, 1.0);
    ReturnSeries out;
    out.values.resize(n);
    for (auto& v : out.values) v = sigma * normal(rng);
    return out;
}

double fgn_autocovariance(std::size_t k, double hurst)
{
    const double two_h = 2.0 * hurst;
    const double kk = static_cast<double>(k);
    return 0.5 * (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) + std::pow(std::abs(kk - 1.0), two_h));
}

ReturnSeries fgn(std::size_t n, double hurst, Seed seed)
{
    if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("fgn: H must lie in (0, 1)");
    if (!power_of_two(n)) throw ConfigError("fgn: n must be a power of two, got " + std::to_string(n));

    // Eigenvalues of the 2n circulant whose first row embeds rho(0..n).
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocovariance(k, hurst);
    for (std::size_t k = n + 1; k < m; ++k) row[k] = row[m - k];
    dft(row);
    std::vector<double> lambda(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double l = row[k].real();
        if (l < -1e-9 * static_cast<double>(m)) throw AnalysisError("fgn: circulant embedding is not non-negative");
        lambda[k] = std::max(l, 0.0);
    }

    std::mt19937_64 rng(seed.value);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double dm = static_cast<double>(m);
    std::vector<std::complex<double>> v(m);
    v[0] = std::sqrt(lambda[0] / dm) * normal(rng);
    v[n] = std::sqrt(lambda[n] / dm) * normal(rng);
    for (std::size_t k = 1; k < n; ++k) {
        const double a = normal(rng);
        const double b = normal(rng);
        const double s = std::sqrt(lambda[k] / (2.0 * dm));
        v[k] = s * std::complex<double>(a, b);
        v[m - k] = std::conj(v[k]);
    }
    dft(v);

    ReturnSeries out;
    out.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) out.values[j] = v[j].real();
    return out;
}

std::vector<double> q_gaussian_sample(std::size_t n, double q, Seed seed)
{
    if (!(q > 1.0 && q < 3.0)) throw ConfigError("q_gaussian_sample: q must lie in (1, 3)");
    const double dof = (3.0 - q) / (q - 1.0);
    const double scale = 1.0 / std::sqrt(3.0 - q);
    std::mt19937_64 rng(seed.value);
    std::student_t_distribution<double> t(dof);
    std::vector<double> out(n);
    for (auto& x : out) x = scale * t(rng);
    return out;
}

ReturnSeries ar1(std::size_t n, double phi, Seed seed)
{
    if (!(phi > -1.0 && phi < 1.0)) throw ConfigError("ar1: |phi| must be below 1");
    if (n == 0) throw ConfigError("ar1: n must be positive");
    std::mt19937_64 rng(seed.value);
    std::normal_distribution<double> normal(0.0, 1.0);
    ReturnSeries out;
    out.values.resize(n);
    out.values[0] = normal(rng) / std::sqrt(1.0 - phi * phi);
    for (std::size_t t = 1; t < n; ++t) out.values[t] = phi * out.values[t - 1] + normal(rng);
    return out;
}

std::vector<double> cumulative(const std::vector<double>& steps, double start)
{
    std::vector<double> out(steps.size() + 1);
    out[0] = start;
    for (std::size_t i = 0; i < steps.size(); ++i) out[i + 1] = out[i] + steps[i];
    return out;
}

} // namespace stylized
