#ifndef STYLIZED_SYNTH_HPP
#define STYLIZED_SYNTH_HPP

#include "stylized/series.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stylized {

/// Generator seed. A seed fixes the output bit-for-bit for a given build.
struct Seed {
    std::uint64_t value = 0;
};

/// iid N(0, sigma^2). Draws standard normals and scales them, so
/// gaussian_white(n, k*s, seed) == k * gaussian_white(n, s, seed).
ReturnSeries gaussian_white(std::size_t n, double sigma, Seed seed);

/// Exact fractional Gaussian noise (Davies-Harte circulant embedding) with
/// autocovariance rho(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2 and unit variance.
/// n must be a power of two.
ReturnSeries fgn(std::size_t n, double hurst, Seed seed);

/// Autocovariance of unit-variance fGn at lag k.
double fgn_autocovariance(std::size_t k, double hurst);

/// iid draws with density g_q, 1 < q < 3. Uses the identity that
/// t / sqrt(3 - q) is q-Gaussian when t is Student-t with (3-q)/(q-1) degrees of freedom.
/// For q >= 5/3 the variance is infinite; check such samples through quantiles.
std::vector<double> q_gaussian_sample(std::size_t n, double q, Seed seed);

/// X_{t+1} = phi X_t + eps_t with eps ~ N(0,1) and X_0 drawn from the stationary law.
ReturnSeries ar1(std::size_t n, double phi, Seed seed);

/// Cumulative sum starting at `start`: a price-like index whose increments are `steps`.
std::vector<double> cumulative(const std::vector<double>& steps, double start = 0.0);

} // namespace stylized

#endif
