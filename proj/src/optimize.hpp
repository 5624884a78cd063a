#ifndef STYLIZED_SRC_OPTIMIZE_HPP
#define STYLIZED_SRC_OPTIMIZE_HPP

// Bounded Nelder-Mead used by the density fits.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <utility>

namespace stylized::detail {

template <std::size_t N>
struct SimplexResult {
    std::array<double, N> x{};
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Minimizes f inside the box [lower, upper]; trial points are clamped onto the box.
/// Converges when the spread of simplex values falls below `ftol` and the simplex
/// is smaller than `xtol` in every coordinate. Restarts once from the best vertex.
template <std::size_t N>
SimplexResult<N> nelder_mead(const std::function<double(const std::array<double, N>&)>& f,
                             std::array<double, N> start, std::array<double, N> step,
                             std::array<double, N> lower, std::array<double, N> upper, double ftol,
                             double xtol, std::size_t max_evaluations)
{
    using Point = std::array<double, N>;
    auto clamp = [&](Point p) {
        for (std::size_t i = 0; i < N; ++i) p[i] = std::clamp(p[i], lower[i], upper[i]);
        return p;
    };

    SimplexResult<N> result;
    std::size_t evals = 0;
    auto eval = [&](const Point& p) {
        ++evals;
        return f(p);
    };

    Point best = clamp(start);
    double best_value = 0.0;
    bool converged = false;
    for (int pass = 0; pass < 2; ++pass) {
        std::array<Point, N + 1> pts;
        std::array<double, N + 1> val;
        pts[0] = best;
        for (std::size_t i = 0; i < N; ++i) {
            Point p = best;
            p[i] += step[i];
            if (p[i] > upper[i]) p[i] = best[i] - step[i];
            pts[i + 1] = clamp(p);
        }
        for (std::size_t i = 0; i <= N; ++i) val[i] = eval(pts[i]);

        converged = false;
        while (evals < max_evaluations) {
            std::array<std::size_t, N + 1> order;
            for (std::size_t i = 0; i <= N; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
            const std::size_t lo = order[0], hi = order[N], second = order[N - 1];

            bool small = true;
            for (std::size_t d = 0; d < N && small; ++d) {
                double mn = pts[0][d], mx = pts[0][d];
                for (std::size_t i = 1; i <= N; ++i) {
                    mn = std::min(mn, pts[i][d]);
                    mx = std::max(mx, pts[i][d]);
                }
                small = (mx - mn) <= xtol;
            }
            if (val[hi] - val[lo] <= ftol && small) {
                converged = true;
                break;
            }

            Point centroid{};
            for (std::size_t i = 0; i <= N; ++i)
                if (i != hi)
                    for (std::size_t d = 0; d < N; ++d) centroid[d] += pts[i][d] / static_cast<double>(N);

            auto along = [&](double t) {
                Point p;
                for (std::size_t d = 0; d < N; ++d) p[d] = centroid[d] + t * (pts[hi][d] - centroid[d]);
                return clamp(p);
            };

            const Point reflected = along(-1.0);
            const double fr = eval(reflected);
            if (fr < val[lo]) {
                const Point expanded = along(-2.0);
                const double fe = eval(expanded);
                if (fe < fr) {
                    pts[hi] = expanded;
                    val[hi] = fe;
                } else {
                    pts[hi] = reflected;
                    val[hi] = fr;
                }
            } else if (fr < val[second]) {
                pts[hi] = reflected;
                val[hi] = fr;
            } else {
                const bool outside = fr < val[hi];
                const Point contracted = along(outside ? -0.5 : 0.5);
                const double fc = eval(contracted);
                if (fc < (outside ? fr : val[hi])) {
                    pts[hi] = contracted;
                    val[hi] = fc;
                } else {
                    for (std::size_t i = 0; i <= N; ++i) {
                        if (i == lo) continue;
                        for (std::size_t d = 0; d < N; ++d) pts[i][d] = pts[lo][d] + 0.5 * (pts[i][d] - pts[lo][d]);
                        pts[i] = clamp(pts[i]);
                        val[i] = eval(pts[i]);
                    }
                }
            }
        }
        std::size_t arg = 0;
        for (std::size_t i = 1; i <= N; ++i)
            if (val[i] < val[arg]) arg = i;
        best = pts[arg];
        best_value = val[arg];
        for (auto& s : step) s *= 0.1;
    }
    result.x = best;
    result.value = best_value;
    result.evaluations = evals;
    result.converged = converged;
    return result;
}

// Evaluates f on `steps` + 1 evenly spaced points of [lo, hi] and returns the
// interval spanning the neighbours of the smallest value.
template <class F>
std::pair<double, double> bracket_minimum(F&& f, double lo, double hi, std::size_t steps)
{
    std::size_t best = 0;
    double best_value = 0.0;
    const double h = (hi - lo) / static_cast<double>(steps);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double v = f(lo + h * static_cast<double>(i));
        if (i == 0 || v < best_value) {
            best = i;
            best_value = v;
        }
    }
    const double a = lo + h * static_cast<double>(best == 0 ? 0 : best - 1);
    const double b = lo + h * static_cast<double>(std::min(best + 1, steps));
    return {a, b};
}

} // namespace stylized::detail

#endif
