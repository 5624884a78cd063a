#ifndef STYLIZED_STATS_HPP
#define STYLIZED_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace stylized {

/// Ordinary least squares result for y = intercept + slope * x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double sse = 0.0;        // residual sum of squares
    double r_squared = 0.0;  // 1 when y is constant and fitted exactly
    std::size_t n = 0;
};

/// Requires at least two points with distinct x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);

/// Sample variance with divisor N-1. Requires at least two values.
double sample_variance(std::span<const double> v);

/// Trapezoidal integral of y over the (not necessarily uniform) grid x.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Roughly log-uniform integers in [lo, hi], strictly increasing, both ends included.
std::vector<std::size_t> log_spaced(std::size_t lo, std::size_t hi, std::size_t count);

} // namespace stylized

#endif
