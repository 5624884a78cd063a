#include "stylized/ingest.hpp"

#include "stylized/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace stylized {

namespace {

using namespace std::chrono;

// Reads exactly `width` digits at `pos`.
bool read_int(std::string_view s, std::size_t& pos, std::size_t width, int& out)
{
    if (pos + width > s.size()) return false;
    for (std::size_t i = 0; i < width; ++i)
        if (s[pos + i] < '0' || s[pos + i] > '9') return false;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + width, out);
    if (ec != std::errc{}) return false;
    pos += width;
    return true;
}

bool expect(std::string_view s, std::size_t& pos, char c)
{
    if (pos >= s.size() || s[pos] != c) return false;
    ++pos;
    return true;
}

std::optional<sys_days> read_date(std::string_view s, std::size_t& pos)
{
    int y = 0, m = 0, d = 0;
    if (!read_int(s, pos, 4, y) || !expect(s, pos, '-') || !read_int(s, pos, 2, m) ||
        !expect(s, pos, '-') || !read_int(s, pos, 2, d))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == ',' && !quoted) {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(line.substr(start)));
    return out;
}

std::string line_error(std::size_t line, const std::string& what)
{
    return "line " + std::to_string(line) + ": " + what;
}

} // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s)
{
    s = trim(s);
    std::size_t pos = 0;
    auto date = read_date(s, pos);
    if (!date) return std::nullopt;
    if (pos >= s.size() || (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ')) return std::nullopt;
    ++pos;

    int hh = 0, mm = 0, ss = 0;
    if (!read_int(s, pos, 2, hh) || !expect(s, pos, ':') || !read_int(s, pos, 2, mm)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') {
        ++pos;
        if (!read_int(s, pos, 2, ss)) return std::nullopt;
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            const std::size_t digits = pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
            if (pos == digits) return std::nullopt;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;

    seconds offset{0};
    if (pos < s.size()) {
        const char z = s[pos];
        if (z == 'Z' || z == 'z') {
            ++pos;
        } else if (z == '+' || z == '-') {
            ++pos;
            int oh = 0, om = 0;
            if (!read_int(s, pos, 2, oh) || !expect(s, pos, ':') || !read_int(s, pos, 2, om))
                return std::nullopt;
            offset = hours{oh} + minutes{om};
            if (z == '-') offset = -offset;
        } else {
            return std::nullopt;
        }
    }
    if (pos != s.size()) return std::nullopt;
    return Timestamp{*date} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::optional<Date> parse_date(std::string_view s)
{
    s = trim(s);
    std::size_t pos = 0;
    auto d = read_date(s, pos);
    if (!d || pos != s.size()) return std::nullopt;
    return *d;
}

std::string format_timestamp(Timestamp t)
{
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss<seconds> tod{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

std::string format_date(Date d)
{
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool RawTickTable::strictly_increasing() const
{
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].time <= rows[i - 1].time) return false;
    return true;
}

RawTickTable parse_price_csv(std::istream& in, const ColumnMap& columns)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError("missing header row");
    ++line_no;
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_fields(line);
    auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto ts_col = find_column(columns.timestamp);
    const auto px_col = find_column(columns.price);
    if (!ts_col) throw DataError("header has no timestamp column '" + columns.timestamp + "'");
    if (!px_col) throw DataError("header has no price column '" + columns.price + "'");
    std::optional<std::size_t> pair_col;
    if (!columns.pair.empty()) {
        pair_col = find_column(columns.pair);
        if (!pair_col) throw DataError("header has no pair column '" + columns.pair + "'");
    }

    RawTickTable table;
    std::map<Timestamp, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw DataError(line_error(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                                    std::to_string(fields.size())));

        const auto ts = parse_timestamp(fields[*ts_col]);
        if (!ts) throw DataError(line_error(line_no, "unparseable timestamp '" + std::string(fields[*ts_col]) + "'"));

        const std::string_view px_text = fields[*px_col];
        double price = 0.0;
        auto [p, ec] = std::from_chars(px_text.data(), px_text.data() + px_text.size(), price);
        if (ec != std::errc{} || p != px_text.data() + px_text.size() || !std::isfinite(price))
            throw DataError(line_error(line_no, "malformed price '" + std::string(px_text) + "'"));
        if (price <= 0.0) throw DataError(line_error(line_no, "non-positive price " + std::string(px_text)));

        if (auto [it, fresh] = seen.emplace(*ts, line_no); !fresh)
            throw DataError(line_error(line_no, "duplicate timestamp " + format_timestamp(*ts) + " (first on line " +
                                                    std::to_string(it->second) + ")"));

        table.rows.push_back({*ts, price, pair_col ? std::string(fields[*pair_col]) : std::string{}});
    }
    if (table.rows.empty()) throw DataError("no data rows");
    return table;
}

JumpFilterResult filter_jumps(const RawTickTable& table, double threshold)
{
    if (!(threshold > 0.0)) throw ConfigError("jump threshold must be positive");
    JumpFilterResult out;
    for (const auto& row : table.rows) {
        if (!out.table.rows.empty() && std::abs(row.price - out.table.rows.back().price) > threshold) {
            ++out.rejected;
            continue;
        }
        out.table.rows.push_back(row);
    }
    return out;
}

std::size_t PriceSeries::filled_count() const
{
    return static_cast<std::size_t>(std::count(gap_mask.begin(), gap_mask.end(), true));
}

PriceSeries resample_to_grid(const RawTickTable& table, int dt_minutes, std::size_t max_gap)
{
    if (dt_minutes <= 0) throw ConfigError("dt_minutes must be positive");
    if (table.rows.empty()) throw DataError("no data rows");
    if (!table.strictly_increasing()) throw DataError("tick timestamps are not strictly increasing");

    const seconds step = minutes{dt_minutes};
    const auto& rows = table.rows;
    const auto since_epoch = [](Timestamp t) { return t.time_since_epoch(); };

    // First grid instant at or after the first tick; last at or before the final tick.
    const long long first = since_epoch(rows.front().time).count();
    long long q = first / step.count();  // truncation is a ceiling for negative values
    if (first > 0 && first % step.count() != 0) ++q;
    const Timestamp grid_start{seconds{q * step.count()}};
    const Timestamp last = rows.back().time;
    if (grid_start > last) throw DataError("data span is shorter than one grid step");

    PriceSeries out;
    out.start = grid_start;
    out.dt_minutes = dt_minutes;

    std::size_t j = 0;  // rows[0, j) are at or before the current grid instant
    std::size_t run = 0;
    for (Timestamp g = grid_start; g <= last; g += step) {
        while (j < rows.size() && rows[j].time <= g) ++j;
        const Tick& current = rows[j - 1];
        const bool filled = current.time <= g - step;
        if (filled) {
            ++run;
            if (run > max_gap) {
                const Timestamp gap_from = current.time;
                const Timestamp gap_to = j < rows.size() ? rows[j].time : last;
                throw DataError("gap of more than " + std::to_string(max_gap) + " grid steps between " +
                                format_timestamp(gap_from) + " and " + format_timestamp(gap_to));
            }
        } else {
            run = 0;
        }
        out.values.push_back(current.price);
        out.gap_mask.push_back(filled);
    }
    if (out.values.size() < 2) throw DataError("fewer than two grid points after resampling");
    return out;
}

void validate_periods(const std::vector<PeriodSpec>& specs)
{
    if (specs.empty()) throw ConfigError("no period specs");
    for (const auto& s : specs)
        if (!(s.start < s.end)) throw ConfigError("period '" + s.name + "': start date must precede end date");
    for (std::size_t a = 0; a < specs.size(); ++a)
        for (std::size_t b = a + 1; b < specs.size(); ++b) {
            if (specs[a].name == specs[b].name) throw ConfigError("duplicate period name '" + specs[a].name + "'");
            if (specs[a].start <= specs[b].end && specs[b].start <= specs[a].end)
                throw ConfigError("periods '" + specs[a].name + "' and '" + specs[b].name + "' overlap");
        }
}

std::map<std::string, PriceSeries> split_periods(const PriceSeries& series, const std::vector<PeriodSpec>& specs)
{
    validate_periods(specs);
    const auto step = seconds{minutes{series.dt_minutes}}.count();
    const auto n = static_cast<long long>(series.size());

    // Index of the first grid point at or after t.
    auto first_at_or_after = [&](Timestamp t) {
        const long long d = (t - series.start).count();
        long long idx = d >= 0 ? (d + step - 1) / step : -((-d) / step);
        return std::clamp(idx, 0LL, n);
    };

    std::map<std::string, PriceSeries> out;
    for (const auto& spec : specs) {
        const long long lo = first_at_or_after(Timestamp{spec.start});
        const long long hi = first_at_or_after(Timestamp{spec.end + days{1}});
        if (hi - lo < 2)
            throw DataError("period '" + spec.name + "' (" + format_date(spec.start) + ".." + format_date(spec.end) +
                            ") lies outside the data span");
        PriceSeries part;
        part.start = series.time_at(static_cast<std::size_t>(lo));
        part.dt_minutes = series.dt_minutes;
        part.values.assign(series.values.begin() + lo, series.values.begin() + hi);
        part.gap_mask.assign(series.gap_mask.begin() + lo, series.gap_mask.begin() + hi);
        out.emplace(spec.name, std::move(part));
    }
    return out;
}

} // namespace stylized
