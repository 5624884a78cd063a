#ifndef STYLIZED_INGEST_HPP
#define STYLIZED_INGEST_HPP

#include <chrono>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stylized {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses RFC 3339 ("2021-01-01T00:10Z", "2021-01-01T00:10:00+02:00") or
/// "YYYY-MM-DD HH:MM[:SS]" (taken as UTC). Offsets are folded into UTC.
/// Fractional seconds are truncated. Returns nullopt on malformed input.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Parses "YYYY-MM-DD".
std::optional<Date> parse_date(std::string_view text);

std::string format_timestamp(Timestamp t);  // "YYYY-MM-DDTHH:MM:SSZ"
std::string format_date(Date d);

struct Tick {
    Timestamp time;
    double price = 0.0;
    std::string pair;
};

struct RawTickTable {
    std::vector<Tick> rows;  // input order

    bool strictly_increasing() const;
};

struct ColumnMap {
    std::string timestamp = "ts";
    std::string price = "price";
    std::string pair;  // empty: no currency-pair column
};

/// Reads a headed CSV. Errors name the 1-based line of the offending row.
RawTickTable parse_price_csv(std::istream& in, const ColumnMap& columns = {});

struct JumpFilterResult {
    RawTickTable table;
    std::size_t rejected = 0;
};

/// Drops ticks whose price moves by more than `threshold` from the last kept tick.
JumpFilterResult filter_jumps(const RawTickTable& table, double threshold);

/// Uniformly gridded index values I(t).
struct PriceSeries {
    Timestamp start;
    int dt_minutes = 10;
    std::vector<double> values;
    std::vector<bool> gap_mask;  // true where the value was carried forward

    std::size_t size() const { return values.size(); }
    Timestamp time_at(std::size_t i) const
    {
        return start + std::chrono::minutes(static_cast<long>(dt_minutes) * static_cast<long>(i));
    }
    std::size_t filled_count() const;
};

/// Last observation at or before each grid instant. A grid point with no tick
/// in (t - dt, t] is filled from the previous value; a run of more than
/// `max_gap` filled points is a DataError naming the gap window.
PriceSeries resample_to_grid(const RawTickTable& table, int dt_minutes = 10, std::size_t max_gap = 6);

struct PeriodSpec {
    std::string name;
    Date start;  // inclusive
    Date end;    // inclusive
};

/// Each output covers [start 00:00, end + 1 day 00:00) intersected with the grid.
std::map<std::string, PriceSeries> split_periods(const PriceSeries& series,
                                                 const std::vector<PeriodSpec>& specs);

/// Throws ConfigError on an inverted range, duplicate names or overlapping periods.
void validate_periods(const std::vector<PeriodSpec>& specs);

} // namespace stylized

#endif
