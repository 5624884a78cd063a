#ifndef STYLIZED_PIPELINE_HPP
#define STYLIZED_PIPELINE_HPP

#include "stylized/density.hpp"
#include "stylized/ingest.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stylized {

/// Everything a run needs. Lags, windows and scales are in grid units.
struct RunConfig {
    std::string input;
    std::string output_dir = "stylized-out";
    ColumnMap columns;
    int dt_minutes = 10;
    std::size_t max_gap = 6;
    double jump_threshold = 0.0;  // 0 disables the jump filter
    std::vector<PeriodSpec> periods;  // empty: one period "all" over the whole series

    std::size_t volatility_window = 6;
    KdeOptions kde;

    struct Density {
        std::size_t lag = 1;
        double tail_fraction = 0.25;
        double min_count = 10.0;
        bool operator==(const Density&) const = default;
    } density;

    struct Diffusion {
        std::vector<std::size_t> lags;  // empty: default_lags(n, lag_count, max_lag)
        std::size_t lag_count = 48;
        std::size_t max_lag = 46000;
        double regime_tolerance = 0.05;
        std::size_t min_side = 4;
        bool operator==(const Diffusion&) const = default;
    } diffusion;

    struct Acf {
        std::size_t max_lag = 499;
        std::size_t segment_length = 1000;
        std::size_t fit_lo = 1;
        std::size_t fit_hi = 10;
        double memory_cutoff = 0.01;
        bool operator==(const Acf&) const = default;
    } acf;

    struct Detrend {
        std::size_t window = 1008;
        std::vector<std::size_t> sweep;          // empty: 1 hour to 26 weeks
        std::vector<std::size_t> collapse_lags;  // empty: 5 lags from window/64 to window/4
        std::optional<double> collapse_hurst;    // empty: short-time H from peak scaling
        double r2_threshold = 0.95;
        bool operator==(const Detrend&) const = default;
    } detrend;

    struct Mfdfa {
        std::vector<std::size_t> scales;  // empty: default_scales(n, scale_count, min_scale)
        std::size_t scale_count = 24;
        std::size_t min_scale = 16;
        double max_order = 10.0;
        double order_step = 0.5;
        std::size_t fit_lo = 0;  // 0: default_fit_range
        std::size_t fit_hi = 0;
        std::vector<double> betas{1.0, 0.1, 0.01, 0.001};
        bool use_detrended = false;  // run on increments of the detrended index
        bool operator==(const Mfdfa&) const = default;
    } mfdfa;

    bool operator==(const RunConfig& o) const;
};

/// JSON text of the config; parse_config(to_json(c)) == c.
std::string to_json(const RunConfig& config);

/// Unknown keys and wrong types are ConfigErrors. Missing keys keep their defaults.
RunConfig parse_config(std::string_view json_text);

/// Reads a config file, then applies STYLIZED_INPUT and STYLIZED_OUTPUT_DIR when set.
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the first violated precondition. Does not touch the input file.
void validate(const RunConfig& config);

struct SectionError {
    std::string section;
    std::string kind;  // config, data, analysis, other
    std::string message;
};

struct RegimeSummary {
    double h = 0.0;
    double stderr_ = 0.0;
    double alpha = 0.0;
    std::string regime;
    std::optional<double> implied_xi;  // H (3 - q) with the semilog q
};

struct VolatilitySummary {
    std::size_t window = 0;
    double mean = 0.0;
    double max = 0.0;
};

struct DiffusionSummary {
    std::size_t lag_count = 0;
    std::size_t breakpoint_lag = 0;
    double breakpoint_minutes = 0.0;
    RegimeSummary short_time;
    RegimeSummary long_time;
    double peak_vs_zero_max_rel_diff = 0.0;  // max over lags of |P_max - P(0,t)| / P_max
};

struct DensitySummary {
    std::size_t lag = 0;
    double tail_slope = 0.0;
    double tail_slope_stderr = 0.0;
    double tail_q = 0.0;
    double semilog_q = 0.0;
    double semilog_scale = 0.0;
    double semilog_r_squared = 0.0;
    bool semilog_pinned = false;
    double bandwidth = 0.0;
};

struct AcfSummary {
    double sample_slope = 0.0;
    double sample_slope_stderr = 0.0;
    std::optional<double> hurst;  // empty when the slope is outside (-2, 0)
    std::optional<double> chopping_slope;
    std::optional<double> chopping_hurst;
    std::size_t fit_lo = 0;
    std::size_t fit_hi = 0;
    double memory_time_lags = 0.0;
    double memory_time_minutes = 0.0;
    std::size_t segments = 0;
    std::size_t dropped_segments = 0;
};

struct DetrendSummary {
    std::size_t window = 0;
    double window_minutes = 0.0;
    double residual_std = 0.0;
};

struct CollapseSummary {
    double hurst_used = 0.0;
    std::vector<std::size_t> lags;
    std::vector<double> scale_factors;
    std::vector<double> implied_d;
    double master_q = 0.0;
    bool master_q_pinned = false;
    double distance = 0.0;
    double scale_exponent = 0.0;
};

struct MfdfaSummary {
    std::string input;  // "returns" or "detrended returns"
    std::size_t fit_lo = 0;
    std::size_t fit_hi = 0;
    double h2 = 0.0;
    double fractal_dimension = 0.0;  // 2 - h(2)
    double slope_negative = 0.0;
    double stderr_negative = 0.0;
    double slope_positive = 0.0;
    double stderr_positive = 0.0;
    double h_range = 0.0;
    std::string verdict;        // from the slope/range test
    std::string sweep_verdict;  // from the peak count at the smallest beta
    std::vector<double> betas;
    std::vector<std::size_t> peaks_per_beta;
};

struct PeriodReport {
    std::string name;
    std::string start;
    std::string end;
    std::size_t samples = 0;
    std::size_t gap_fills = 0;
    std::optional<VolatilitySummary> volatility;
    std::optional<DiffusionSummary> diffusion;
    std::optional<DensitySummary> density;
    std::optional<AcfSummary> acf;
    std::optional<DetrendSummary> detrend;
    std::optional<CollapseSummary> collapse;
    std::optional<MfdfaSummary> mfdfa;
    std::vector<SectionError> errors;
    std::vector<std::string> notes;
    std::vector<std::string> files;  // relative to the output directory
};

struct StylizedFactsReport {
    static constexpr int schema_version = 1;
    std::string input;
    int dt_minutes = 10;
    std::size_t rows = 0;
    std::size_t rejected_jumps = 0;
    std::vector<PeriodReport> periods;
    std::vector<std::string> notes;

    bool has_failures() const;
};

/// Versioned JSON document. Identical inputs give identical text.
std::string to_json(const StylizedFactsReport& report);

/// Fixed-width summary table, one column per period.
std::string to_table(const StylizedFactsReport& report);

/// Full analysis of an already gridded series. Artifacts go to `output_dir`
/// when it is non-empty. Section failures are recorded, never thrown.
StylizedFactsReport analyze(const PriceSeries& series, const RunConfig& config,
                            const std::filesystem::path& output_dir = {});

/// validate, ingest, analyze, then write report.json and report.txt next to the plot files.
/// Throws ConfigError or DataError before any analysis starts.
StylizedFactsReport run(const RunConfig& config);

/// 0 success, 1 config error, 2 data error, 3 at least one failed section.
int exit_code(const StylizedFactsReport& report);

struct SweepRow {
    std::size_t window = 0;
    std::vector<std::size_t> lags;
    std::vector<double> r_squared;
    double min_r_squared = 0.0;
    bool passes = false;  // every lag reaches the threshold
};

/// For each candidate window: detrend, estimate the residual's increment PDF at
/// each lag, fit a moment-matched Gaussian and record its R^2.
std::vector<SweepRow> sweep_detrend_window(const PriceSeries& series, const std::vector<std::size_t>& candidates,
                                           const std::vector<std::size_t>& lags, const KdeOptions& kde = {},
                                           double threshold = 0.95);

/// Candidate windows from 1 hour to 26 weeks on a grid of `dt_minutes`.
std::vector<std::size_t> default_sweep_windows(int dt_minutes);

/// Collapse lags used when the config leaves them empty.
std::vector<std::size_t> default_collapse_lags(std::size_t window);

/// Reads, filters and grids the configured input.
PriceSeries load_series(const RunConfig& config, std::size_t* rows = nullptr, std::size_t* rejected = nullptr);

} // namespace stylized

#endif
