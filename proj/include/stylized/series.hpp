#ifndef STYLIZED_SERIES_HPP
#define STYLIZED_SERIES_HPP

#include "stylized/ingest.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace stylized {

/// Consecutive increments x*(t) or X*(t).
struct ReturnSeries {
    std::vector<double> values;
    int dt_minutes = 10;
    bool detrended = false;

    std::size_t size() const { return values.size(); }
};

/// All returns X(t0, t) = I(t0 + t) - I(t0) for a fixed lag t.
struct ReturnEnsemble {
    std::size_t lag = 1;
    std::vector<double> values;
};

/// I = trend + residual, element-wise.
struct TrendDecomposition {
    std::vector<double> trend;
    std::vector<double> residual;
    std::size_t window = 1;
};

ReturnSeries increments(const PriceSeries& series);
ReturnSeries increments(std::span<const double> values, int dt_minutes = 10, bool detrended = false);
/// Increments of the detrended index (x* built from the residual).
ReturnSeries increments(const TrendDecomposition& decomposition, int dt_minutes = 10);

ReturnEnsemble return_ensemble(std::span<const double> values, std::size_t lag);
inline ReturnEnsemble return_ensemble(const PriceSeries& series, std::size_t lag)
{
    return return_ensemble(series.values, lag);
}

/// Sample standard deviation (divisor N-1) of each window returns[i .. i+window).
std::vector<double> rolling_volatility(const ReturnSeries& returns, std::size_t window = 6);

/// Centered moving average with truncated windows at both ends.
///
/// For 1-based t the window is I(t+k), k in [-floor((tw-1)/2), ceil((tw-1)/2)],
/// clipped to [1, N]. Near the start this is the sum from k = -t+1, near the end
/// the sum up to k = N-t, which are the three pieces of the classic formulation.
/// Every piece is normalized by the number of samples it actually averages; for
/// even tw this equals the printed prefactors (tw+2t)/2 and (2N-2t+tw)/2.
TrendDecomposition moving_average_trend(std::span<const double> values, std::size_t window);
inline TrendDecomposition moving_average_trend(const PriceSeries& series, std::size_t window)
{
    return moving_average_trend(series.values, window);
}

} // namespace stylized

#endif
