#include "stylized/pipeline.hpp"

#include "stylized/autocorr.hpp"
#include "stylized/diffusion.hpp"
#include "stylized/error.hpp"
#include "stylized/mfdfa.hpp"
#include "stylized/plotdata.hpp"
#include "stylized/series.hpp"
#include "stylized/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

namespace stylized {

using json = nlohmann::ordered_json;

bool RunConfig::operator==(const RunConfig& o) const
{
    auto same_periods = [](const std::vector<PeriodSpec>& a, const std::vector<PeriodSpec>& b) {
        return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const PeriodSpec& x, const PeriodSpec& y) {
            return x.name == y.name && x.start == y.start && x.end == y.end;
        });
    };
    return input == o.input && output_dir == o.output_dir && columns.timestamp == o.columns.timestamp &&
           columns.price == o.columns.price && columns.pair == o.columns.pair && dt_minutes == o.dt_minutes &&
           max_gap == o.max_gap && jump_threshold == o.jump_threshold && same_periods(periods, o.periods) &&
           volatility_window == o.volatility_window && kde.bandwidth == o.kde.bandwidth &&
           kde.relative == o.kde.relative && kde.grid_size == o.kde.grid_size && density == o.density &&
           diffusion == o.diffusion && acf == o.acf && detrend == o.detrend && mfdfa == o.mfdfa;
}

// ---------------------------------------------------------------- config I/O

std::string to_json(const RunConfig& c)
{
    json periods = json::array();
    for (const auto& p : c.periods)
        periods.push_back({{"name", p.name}, {"start", format_date(p.start)}, {"end", format_date(p.end)}});
    json j = {
        {"input", c.input},
        {"output_dir", c.output_dir},
        {"columns", {{"timestamp", c.columns.timestamp}, {"price", c.columns.price}, {"pair", c.columns.pair}}},
        {"dt_minutes", c.dt_minutes},
        {"max_gap", c.max_gap},
        {"jump_threshold", c.jump_threshold},
        {"periods", periods},
        {"volatility_window", c.volatility_window},
        {"kde", {{"bandwidth", c.kde.bandwidth}, {"relative", c.kde.relative}, {"grid_size", c.kde.grid_size}}},
        {"density",
         {{"lag", c.density.lag}, {"tail_fraction", c.density.tail_fraction}, {"min_count", c.density.min_count}}},
        {"diffusion",
         {{"lags", c.diffusion.lags},
          {"lag_count", c.diffusion.lag_count},
          {"max_lag", c.diffusion.max_lag},
          {"regime_tolerance", c.diffusion.regime_tolerance},
          {"min_side", c.diffusion.min_side}}},
        {"acf",
         {{"max_lag", c.acf.max_lag},
          {"segment_length", c.acf.segment_length},
          {"fit_lo", c.acf.fit_lo},
          {"fit_hi", c.acf.fit_hi},
          {"memory_cutoff", c.acf.memory_cutoff}}},
        {"detrend",
         {{"window", c.detrend.window},
          {"sweep", c.detrend.sweep},
          {"collapse_lags", c.detrend.collapse_lags},
          {"collapse_hurst", c.detrend.collapse_hurst ? json(*c.detrend.collapse_hurst) : json(nullptr)},
          {"r2_threshold", c.detrend.r2_threshold}}},
        {"mfdfa",
         {{"scales", c.mfdfa.scales},
          {"scale_count", c.mfdfa.scale_count},
          {"min_scale", c.mfdfa.min_scale},
          {"max_order", c.mfdfa.max_order},
          {"order_step", c.mfdfa.order_step},
          {"fit_lo", c.mfdfa.fit_lo},
          {"fit_hi", c.mfdfa.fit_hi},
          {"betas", c.mfdfa.betas},
          {"use_detrended", c.mfdfa.use_detrended}}},
    };
    return j.dump(2) + "\n";
}

namespace {

// Strict reader: every key must be known and every value of the expected kind.
class Reader {
public:
    Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where))
    {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    // Call once every key has been read.
    void done() const
    {
        for (const auto& [key, value] : obj_.items())
            if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void get(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string()) fail(key, "a string");
            out = v->get<std::string>();
        }
    }
    void get(const std::string& key, bool& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) fail(key, "true or false");
            out = v->get<bool>();
        }
    }
    void get(const std::string& key, double& out)
    {
        if (const json* v = find(key)) out = number(*v, key);
    }
    void get(const std::string& key, int& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) fail(key, "an integer");
            out = v->get<int>();
        }
    }
    void get(const std::string& key, std::size_t& out)
    {
        if (const json* v = find(key)) out = count(*v, key);
    }
    void get(const std::string& key, std::vector<std::size_t>& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_array()) fail(key, "an array of non-negative integers");
            out.clear();
            for (const auto& e : *v) out.push_back(count(e, key));
        }
    }
    void get(const std::string& key, std::vector<double>& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_array()) fail(key, "an array of numbers");
            out.clear();
            for (const auto& e : *v) out.push_back(number(e, key));
        }
    }
    void get(const std::string& key, std::optional<double>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) out.reset();
            else out = number(*v, key);
        }
    }

private:
    [[noreturn]] void fail(const std::string& key, const char* what) const
    {
        throw ConfigError(where_ + "." + key + ": expected " + what);
    }
    double number(const json& v, const std::string& key) const
    {
        if (!v.is_number()) fail(key, "a number");
        return v.get<double>();
    }
    std::size_t count(const json& v, const std::string& key) const
    {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(key, "a non-negative integer");
        return v.get<std::size_t>();
    }

    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

Date date_field(const json& v, const std::string& where)
{
    if (!v.is_string()) throw ConfigError(where + ": expected a date string YYYY-MM-DD");
    const auto d = parse_date(v.get<std::string>());
    if (!d) throw ConfigError(where + ": malformed date '" + v.get<std::string>() + "'");
    return *d;
}

} // namespace

RunConfig parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig c;
    Reader r(root, "config");
    r.get("input", c.input);
    r.get("output_dir", c.output_dir);
    if (const json* v = r.find("columns")) {
        Reader cr(*v, "config.columns");
        cr.get("timestamp", c.columns.timestamp);
        cr.get("price", c.columns.price);
        cr.get("pair", c.columns.pair);
        cr.done();
    }
    r.get("dt_minutes", c.dt_minutes);
    r.get("max_gap", c.max_gap);
    r.get("jump_threshold", c.jump_threshold);
    if (const json* v = r.find("periods")) {
        if (!v->is_array()) throw ConfigError("config.periods: expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string where = "config.periods[" + std::to_string(i) + "]";
            Reader pr((*v)[i], where);
            PeriodSpec p;
            pr.get("name", p.name);
            const json* s = pr.find("start");
            const json* e = pr.find("end");
            if (!s || !e) throw ConfigError(where + ": start and end are required");
            p.start = date_field(*s, where + ".start");
            p.end = date_field(*e, where + ".end");
            pr.done();
            c.periods.push_back(std::move(p));
        }
    }
    r.get("volatility_window", c.volatility_window);
    if (const json* v = r.find("kde")) {
        Reader kr(*v, "config.kde");
        kr.get("bandwidth", c.kde.bandwidth);
        kr.get("relative", c.kde.relative);
        kr.get("grid_size", c.kde.grid_size);
        kr.done();
    }
    if (const json* v = r.find("density")) {
        Reader dr(*v, "config.density");
        dr.get("lag", c.density.lag);
        dr.get("tail_fraction", c.density.tail_fraction);
        dr.get("min_count", c.density.min_count);
        dr.done();
    }
    if (const json* v = r.find("diffusion")) {
        Reader dr(*v, "config.diffusion");
        dr.get("lags", c.diffusion.lags);
        dr.get("lag_count", c.diffusion.lag_count);
        dr.get("max_lag", c.diffusion.max_lag);
        dr.get("regime_tolerance", c.diffusion.regime_tolerance);
        dr.get("min_side", c.diffusion.min_side);
        dr.done();
    }
    if (const json* v = r.find("acf")) {
        Reader ar(*v, "config.acf");
        ar.get("max_lag", c.acf.max_lag);
        ar.get("segment_length", c.acf.segment_length);
        ar.get("fit_lo", c.acf.fit_lo);
        ar.get("fit_hi", c.acf.fit_hi);
        ar.get("memory_cutoff", c.acf.memory_cutoff);
        ar.done();
    }
    if (const json* v = r.find("detrend")) {
        Reader dr(*v, "config.detrend");
        dr.get("window", c.detrend.window);
        dr.get("sweep", c.detrend.sweep);
        dr.get("collapse_lags", c.detrend.collapse_lags);
        dr.get("collapse_hurst", c.detrend.collapse_hurst);
        dr.get("r2_threshold", c.detrend.r2_threshold);
        dr.done();
    }
    if (const json* v = r.find("mfdfa")) {
        Reader mr(*v, "config.mfdfa");
        mr.get("scales", c.mfdfa.scales);
        mr.get("scale_count", c.mfdfa.scale_count);
        mr.get("min_scale", c.mfdfa.min_scale);
        mr.get("max_order", c.mfdfa.max_order);
        mr.get("order_step", c.mfdfa.order_step);
        mr.get("fit_lo", c.mfdfa.fit_lo);
        mr.get("fit_hi", c.mfdfa.fit_hi);
        mr.get("betas", c.mfdfa.betas);
        mr.get("use_detrended", c.mfdfa.use_detrended);
        mr.done();
    }
    r.done();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig c = parse_config(buf.str());
    if (const char* v = std::getenv("STYLIZED_INPUT"); v && *v) c.input = v;
    if (const char* v = std::getenv("STYLIZED_OUTPUT_DIR"); v && *v) c.output_dir = v;
    return c;
}

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) throw ConfigError("config: " + what);
}

bool strictly_increasing(const std::vector<std::size_t>& v)
{
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

bool near_integer(double x)
{
    return std::abs(x - std::round(x)) < 1e-9;
}

} // namespace

void validate(const RunConfig& c)
{
    require(!c.input.empty(), "input path is empty");
    require(!c.output_dir.empty(), "output_dir is empty");
    require(!c.columns.timestamp.empty() && !c.columns.price.empty(), "columns.timestamp and columns.price are required");
    require(c.dt_minutes > 0, "dt_minutes must be positive");
    require(std::isfinite(c.jump_threshold) && c.jump_threshold >= 0.0, "jump_threshold must be >= 0");
    if (!c.periods.empty()) {
        for (const auto& p : c.periods) require(!p.name.empty(), "every period needs a name");
        validate_periods(c.periods);
    }
    require(c.volatility_window >= 2, "volatility_window must be at least 2");
    require(c.kde.bandwidth > 0.0 && std::isfinite(c.kde.bandwidth), "kde.bandwidth must be positive");
    require(c.kde.grid_size >= 3, "kde.grid_size must be at least 3");

    require(c.density.lag >= 1, "density.lag must be positive");
    require(c.density.tail_fraction > 0.0 && c.density.tail_fraction < 1.0, "density.tail_fraction must lie in (0, 1)");
    require(c.density.min_count > 0.0, "density.min_count must be positive");

    const auto& d = c.diffusion;
    require(d.min_side >= 2, "diffusion.min_side must be at least 2");
    require(d.regime_tolerance >= 0.0, "diffusion.regime_tolerance must be >= 0");
    if (d.lags.empty()) {
        require(d.lag_count >= 2 * d.min_side, "diffusion.lag_count must give min_side lags per regime");
        require(d.max_lag >= 1, "diffusion.max_lag must be positive");
    } else {
        require(d.lags.front() >= 1 && strictly_increasing(d.lags), "diffusion.lags must be positive and increasing");
        require(d.lags.size() >= 2 * d.min_side, "diffusion.lags must give min_side lags per regime");
    }

    const auto& a = c.acf;
    require(a.segment_length >= 4, "acf.segment_length must be at least 4");
    require(2 * a.max_lag < a.segment_length, "acf.max_lag must be below half of acf.segment_length");
    require(a.fit_lo >= 1 && a.fit_lo < a.fit_hi && a.fit_hi <= a.max_lag,
            "acf fit range needs 1 <= fit_lo < fit_hi <= max_lag");
    require(a.memory_cutoff > 0.0 && a.memory_cutoff < 1.0, "acf.memory_cutoff must lie in (0, 1)");

    const auto& t = c.detrend;
    require(t.window >= 1, "detrend.window must be positive");
    for (auto w : t.sweep) require(w >= 1, "detrend.sweep windows must be positive");
    if (!t.collapse_lags.empty())
        require(t.collapse_lags.front() >= 1 && strictly_increasing(t.collapse_lags),
                "detrend.collapse_lags must be positive and increasing");
    if (t.collapse_hurst) require(*t.collapse_hurst > 0.0 && *t.collapse_hurst < 1.0, "detrend.collapse_hurst must lie in (0, 1)");
    require(t.r2_threshold > 0.0 && t.r2_threshold <= 1.0, "detrend.r2_threshold must lie in (0, 1]");

    const auto& m = c.mfdfa;
    if (!m.scales.empty()) {
        require(m.scales.front() >= 4 && strictly_increasing(m.scales), "mfdfa.scales must be >= 4 and increasing");
        require(m.scales.size() >= 6, "mfdfa.scales needs at least 6 entries");
    } else {
        require(m.scale_count >= 6, "mfdfa.scale_count must be at least 6");
        require(m.min_scale >= 4, "mfdfa.min_scale must be at least 4");
    }
    require(m.max_order > 0.0 && m.order_step > 0.0 && near_integer(m.max_order / m.order_step),
            "mfdfa orders need max_order a positive multiple of order_step");
    require(m.max_order >= 2.0 && near_integer(2.0 / m.order_step), "mfdfa orders must include w = 2");
    require(2.0 * m.max_order / m.order_step >= 6.0, "mfdfa orders need at least two on each side of 0");
    require((m.fit_lo == 0) == (m.fit_hi == 0), "mfdfa.fit_lo and fit_hi are set together");
    if (m.fit_hi != 0) require(m.fit_lo < m.fit_hi, "mfdfa.fit_lo must be below fit_hi");
    require(!m.betas.empty(), "mfdfa.betas is empty");
    for (std::size_t i = 0; i < m.betas.size(); ++i) {
        require(m.betas[i] > 0.0, "mfdfa.betas must be positive");
        if (i > 0) require(m.betas[i] < m.betas[i - 1], "mfdfa.betas must decrease");
    }
}

// ---------------------------------------------------------------- analysis

std::vector<std::size_t> default_sweep_windows(int dt_minutes)
{
    if (dt_minutes <= 0) throw ConfigError("dt_minutes must be positive");
    // 1 h, 6 h, 1 d, 1 w, 4 w, 13 w, 26 w
    const long minutes[] = {60, 360, 1440, 10080, 40320, 131040, 262080};
    std::vector<std::size_t> out;
    for (long m : minutes) {
        const auto w = static_cast<std::size_t>(std::max(1L, m / dt_minutes));
        if (out.empty() || w > out.back()) out.push_back(w);
    }
    return out;
}

std::vector<std::size_t> default_collapse_lags(std::size_t window)
{
    const std::size_t hi = std::max<std::size_t>(window / 4, 5);
    const std::size_t lo = std::clamp<std::size_t>(window / 64, 1, hi - 4);
    return log_spaced(lo, hi, 5);
}

std::vector<SweepRow> sweep_detrend_window(const PriceSeries& series, const std::vector<std::size_t>& candidates,
                                           const std::vector<std::size_t>& lags, const KdeOptions& kde,
                                           double threshold)
{
    if (candidates.empty()) throw ConfigError("sweep_detrend_window: no candidate windows");
    if (lags.empty()) throw ConfigError("sweep_detrend_window: no lags");
    for (auto w : candidates)
        if (w < 1 || w > series.size())
            throw ConfigError("sweep_detrend_window: window " + std::to_string(w) + " outside 1.." +
                              std::to_string(series.size()));
    if (4 * lags.back() >= series.size()) throw DataError("sweep_detrend_window: largest lag needs n > 4 lag");

    std::vector<SweepRow> rows;
    for (auto w : candidates) {
        const TrendDecomposition d = moving_average_trend(series.values, w);
        SweepRow row;
        row.window = w;
        row.lags = lags;
        for (auto lag : lags) {
            const ReturnEnsemble ens = return_ensemble(d.residual, lag);
            row.r_squared.push_back(fit_gaussian(estimate_pdf(ens.values, kde)).r_squared);
        }
        row.min_r_squared = *std::min_element(row.r_squared.begin(), row.r_squared.end());
        row.passes = row.min_r_squared >= threshold;
        rows.push_back(std::move(row));
    }
    return rows;
}

PriceSeries load_series(const RunConfig& config, std::size_t* rows, std::size_t* rejected)
{
    std::ifstream in(config.input, std::ios::binary);
    if (!in) throw DataError("cannot read input " + config.input);
    RawTickTable table = parse_price_csv(in, config.columns);
    if (rows) *rows = table.rows.size();
    if (config.jump_threshold > 0.0) {
        auto filtered = filter_jumps(table, config.jump_threshold);
        if (rejected) *rejected = filtered.rejected;
        table = std::move(filtered.table);
    } else if (rejected) {
        *rejected = 0;
    }
    return resample_to_grid(table, config.dt_minutes, config.max_gap);
}

namespace {

std::string error_kind(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e)) return "config";
    if (dynamic_cast<const DataError*>(&e)) return "data";
    if (dynamic_cast<const AnalysisError*>(&e)) return "analysis";
    return "other";
}

RegimeSummary regime(double h, double stderr_, double tolerance)
{
    RegimeSummary r;
    r.h = h;
    r.stderr_ = stderr_;
    r.alpha = 1.0 / h;
    r.regime = to_string(classify_regime(r.alpha, tolerance));
    return r;
}

std::size_t order_index(const std::vector<double>& orders, double w)
{
    for (std::size_t i = 0; i < orders.size(); ++i)
        if (std::abs(orders[i] - w) < 1e-9) return i;
    throw ConfigError("order " + format_number(w) + " not in the order grid");
}

class PeriodRunner {
public:
    PeriodRunner(std::string name, const RunConfig& config, std::filesystem::path root)
        : config_(config), root_(std::move(root))
    {
        report_.name = std::move(name);
        if (!root_.empty()) dir_ = root_ / report_.name;
    }

    PeriodReport run(const PriceSeries& series)
    {
        report_.samples = series.size();
        report_.gap_fills = series.filled_count();
        if (series.size() > 0) {
            report_.start = format_timestamp(series.time_at(0));
            report_.end = format_timestamp(series.time_at(series.size() - 1));
        }
        if (series.size() > 0 && static_cast<double>(report_.gap_fills) > 0.001 * static_cast<double>(series.size())) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "ingest: %zu of %zu grid points (%.3f%%) carried forward from the last tick",
                          report_.gap_fills, series.size(), 100.0 * report_.gap_fills / series.size());
            report_.notes.emplace_back(buf);
        }

        std::optional<ReturnSeries> returns;
        section("returns", [&] { returns = increments(series); });
        if (!returns) return std::move(report_);

        section("volatility", [&] { volatility(series, *returns); });
        section("diffusion", [&] { diffusion(series); });
        section("density", [&] { density(series); });
        section("acf", [&] { acf(*returns); });
        section("detrend", [&] { detrend(series); });
        section("collapse", [&] { collapse(); });
        section("mfdfa", [&] { mfdfa(*returns); });
        section("legendre", [&] { legendre(); });

        if (report_.diffusion && report_.density) {
            const double q = report_.density->semilog_q;
            report_.diffusion->short_time.implied_xi = report_.diffusion->short_time.h * (3.0 - q);
            report_.diffusion->long_time.implied_xi = report_.diffusion->long_time.h * (3.0 - q);
        }
        return std::move(report_);
    }

private:
    template<class Fn>
    void section(const char* name, Fn&& fn)
    {
        try {
            fn();
        } catch (const std::exception& e) {
            report_.errors.push_back({name, error_kind(e), e.what()});
        }
    }

    void emit(const std::string& file, const std::function<void(std::ostream&)>& fn)
    {
        if (dir_.empty()) return;
        write_file(dir_ / file, fn);
        report_.files.push_back((std::filesystem::path(report_.name) / file).generic_string());
    }

    void volatility(const PriceSeries& series, const ReturnSeries& returns)
    {
        const auto vol = rolling_volatility(returns, config_.volatility_window);
        VolatilitySummary s;
        s.window = config_.volatility_window;
        s.mean = mean(vol);
        s.max = *std::max_element(vol.begin(), vol.end());
        report_.volatility = s;
        emit("volatility.csv", [&](std::ostream& o) { write_volatility_csv(o, series, vol, s.window); });
    }

    void diffusion(const PriceSeries& series)
    {
        const auto& cfg = config_.diffusion;
        const auto lags = cfg.lags.empty() ? default_lags(series.size(), cfg.lag_count, cfg.max_lag) : cfg.lags;
        const auto curve = peak_scaling(series.values, lags, config_.kde);
        const auto fit = fit_two_regime(curve, cfg.min_side);
        DiffusionSummary s;
        s.lag_count = lags.size();
        s.breakpoint_lag = fit.breakpoint;
        s.breakpoint_minutes = static_cast<double>(fit.breakpoint) * config_.dt_minutes;
        s.short_time = regime(fit.h_short, fit.stderr_short, cfg.regime_tolerance);
        s.long_time = regime(fit.h_long, fit.stderr_long, cfg.regime_tolerance);
        for (std::size_t i = 0; i < curve.peaks.size(); ++i)
            s.peak_vs_zero_max_rel_diff =
                std::max(s.peak_vs_zero_max_rel_diff, std::abs(curve.peaks[i] - curve.at_zero[i]) / curve.peaks[i]);
        report_.diffusion = s;
        emit("peak_scaling.csv", [&](std::ostream& o) { write_peak_scaling_csv(o, curve, config_.dt_minutes, &fit); });
    }

    void density(const PriceSeries& series)
    {
        const auto& cfg = config_.density;
        const auto ens = return_ensemble(series.values, cfg.lag);
        const auto pdf = estimate_pdf(ens.values, config_.kde);
        PdfFitOptions opts;
        opts.min_count = cfg.min_count;
        const auto tail = fit_tail_exponent(pdf, cfg.tail_fraction, cfg.min_count);
        const auto semi = fit_q_gaussian_semilog(pdf, opts);
        DensitySummary s;
        s.lag = cfg.lag;
        s.tail_slope = tail.slope;
        s.tail_slope_stderr = tail.stderr_;
        s.tail_q = q_from_tail(tail.slope);
        s.semilog_q = semi.q;
        s.semilog_scale = semi.scale;
        s.semilog_r_squared = semi.r_squared;
        s.semilog_pinned = semi.pinned;
        s.bandwidth = pdf.bandwidth;
        report_.density = s;
        if (semi.pinned) report_.notes.push_back("density: semilog q ended on its search bound");
        const auto gauss = fit_gaussian(pdf);
        emit("pdf_lag" + std::to_string(cfg.lag) + ".csv",
             [&](std::ostream& o) { write_pdf_fits_csv(o, pdf, semi, gauss, tail); });
    }

    void acf(const ReturnSeries& returns)
    {
        const auto& cfg = config_.acf;
        const auto sample = sample_acf(returns, cfg.max_lag);
        const auto fit = fit_abs_acf_slope(sample, cfg.fit_lo, cfg.fit_hi);
        AcfSummary s;
        s.sample_slope = fit.slope;
        s.sample_slope_stderr = fit.stderr_;
        if (fit.slope > -2.0 && fit.slope < 0.0) s.hurst = hurst_from_acf_slope(fit.slope);
        else report_.notes.push_back("acf: slope " + format_number(fit.slope) + " has no power-law decay reading");
        s.fit_lo = cfg.fit_lo;
        s.fit_hi = cfg.fit_hi;
        s.memory_time_lags = memory_time(sample, cfg.memory_cutoff);
        s.memory_time_minutes = s.memory_time_lags * config_.dt_minutes;
        emit("acf_sample.csv", [&](std::ostream& o) { write_acf_csv(o, sample, config_.dt_minutes); });

        try {
            const auto chop = chopped_acf(returns, cfg.segment_length, cfg.max_lag);
            s.segments = chop.segments;
            s.dropped_segments = chop.dropped_segments;
            if (chop.dropped_segments > 0)
                report_.notes.push_back("acf: " + std::to_string(chop.dropped_segments) +
                                        " zero-variance segments left out of the chopping ACF");
            emit("acf_chopping.csv", [&](std::ostream& o) { write_acf_csv(o, chop, config_.dt_minutes); });
            const auto cfit = fit_abs_acf_slope(chop, cfg.fit_lo, cfg.fit_hi);
            s.chopping_slope = cfit.slope;
            s.chopping_hurst = hurst_from_acf_slope(cfit.slope);
        } catch (const Error& e) {
            report_.notes.push_back(std::string("acf: chopping estimate incomplete: ") + e.what());
        }
        report_.acf = s;
    }

    void detrend(const PriceSeries& series)
    {
        const std::size_t w = config_.detrend.window;
        if (w > series.size())
            throw ConfigError("detrend window " + std::to_string(w) + " exceeds the period length " +
                              std::to_string(series.size()));
        decomposition_ = moving_average_trend(series.values, w);
        DetrendSummary s;
        s.window = w;
        s.window_minutes = static_cast<double>(w) * config_.dt_minutes;
        s.residual_std = std::sqrt(sample_variance(decomposition_->residual));
        report_.detrend = s;
        emit("detrend.csv", [&](std::ostream& o) { write_detrend_csv(o, series, *decomposition_); });
    }

    void collapse()
    {
        if (!decomposition_) throw AnalysisError("collapse needs the detrended series");
        double h = 0.0;
        if (config_.detrend.collapse_hurst) h = *config_.detrend.collapse_hurst;
        else if (report_.diffusion) h = report_.diffusion->short_time.h;
        else throw AnalysisError("collapse needs H from peak scaling or detrend.collapse_hurst");
        if (!(h > 0.0 && h < 1.0)) throw AnalysisError("collapse: H = " + format_number(h) + " outside (0, 1)");

        const auto lags = config_.detrend.collapse_lags.empty() ? default_collapse_lags(config_.detrend.window)
                                                                : config_.detrend.collapse_lags;
        if (4 * lags.back() >= decomposition_->residual.size())
            throw DataError("collapse: lag " + std::to_string(lags.back()) + " too large for the period");
        std::vector<std::pair<std::size_t, EmpiricalPdf>> pdfs;
        for (auto lag : lags)
            pdfs.emplace_back(lag, estimate_pdf(return_ensemble(decomposition_->residual, lag).values, config_.kde));
        PdfFitOptions opts;
        opts.min_count = config_.density.min_count;
        const auto c = collapse_pdfs(pdfs, h, opts);
        CollapseSummary s;
        s.hurst_used = h;
        s.lags = c.lags;
        s.scale_factors = c.scale_factors;
        s.implied_d = c.implied_d;
        s.master_q = c.master_q;
        s.master_q_pinned = c.master_q_pinned;
        s.distance = c.collapse_distance;
        s.scale_exponent = c.scale_exponent;
        report_.collapse = s;
        emit("collapse.csv", [&](std::ostream& o) { write_collapse_csv(o, c); });
    }

    void mfdfa(const ReturnSeries& returns)
    {
        const auto& cfg = config_.mfdfa;
        ReturnSeries input = returns;
        if (cfg.use_detrended) {
            if (!decomposition_) throw AnalysisError("mfdfa on detrended returns needs the detrend section");
            input = increments(*decomposition_, config_.dt_minutes);
        }
        const auto prof = profile(input);
        const auto scales = cfg.scales.empty() ? default_scales(prof.size(), cfg.scale_count, cfg.min_scale) : cfg.scales;
        const auto orders = default_orders(cfg.max_order, cfg.order_step);
        const auto matrix = fluctuation_matrix(prof, scales, orders);
        const auto [lo, hi] = cfg.fit_hi == 0 ? default_fit_range(prof.size()) : std::pair{cfg.fit_lo, cfg.fit_hi};
        hurst_ = generalized_hurst(matrix, lo, hi);
        const auto test = multifractality_test(*hurst_);

        MfdfaSummary s;
        s.input = cfg.use_detrended ? "detrended returns" : "returns";
        s.fit_lo = lo;
        s.fit_hi = hi;
        s.h2 = hurst_->h[order_index(orders, 2.0)];
        s.fractal_dimension = 2.0 - s.h2;
        s.slope_negative = test.slope_negative;
        s.stderr_negative = test.stderr_negative;
        s.slope_positive = test.slope_positive;
        s.stderr_positive = test.stderr_positive;
        s.h_range = test.h_range;
        s.verdict = to_string(test.verdict);
        report_.mfdfa = s;
        emit("fluctuation.csv", [&](std::ostream& o) { write_fluctuation_csv(o, matrix); });
        emit("hurst.csv", [&](std::ostream& o) { write_hurst_csv(o, *hurst_); });
    }

    void legendre()
    {
        if (!hurst_ || !report_.mfdfa) throw AnalysisError("legendre needs h(w) from the mfdfa section");
        const auto sweep = beta_sweep(*hurst_, config_.mfdfa.betas);
        auto& s = *report_.mfdfa;
        s.sweep_verdict = to_string(sweep.verdict);
        for (const auto& spec : sweep.spectra) {
            s.betas.push_back(spec.beta);
            s.peaks_per_beta.push_back(spec.peaks.size());
        }
        if (!dir_.empty())
            for (const auto& p : write_beta_sweep(dir_, "spectrum", sweep))
                report_.files.push_back((std::filesystem::path(report_.name) / p.filename()).generic_string());
    }

    const RunConfig& config_;
    std::filesystem::path root_;
    std::filesystem::path dir_;
    PeriodReport report_;
    std::optional<TrendDecomposition> decomposition_;
    std::optional<HurstProfile> hurst_;
};

const char* const interpretation_notes[] = {
    "acf: H = 1 + slope/2 from |C(s)| ~ s^(2H-2) fitted to the sample ACF",
    "diffusion: P_max is the maximum of the KDE grid; peak_vs_zero_max_rel_diff compares it with P(0, t)",
    "diffusion: implied_xi = H (3 - q) with the semilog q of the density section",
    "mfdfa: each segment of the profile is detrended by its least-squares line",
    "legendre: gamma = h_beta - w dh_beta/dw with h_beta = beta w^3 + h",
};

} // namespace

StylizedFactsReport analyze(const PriceSeries& series, const RunConfig& config, const std::filesystem::path& output_dir)
{
    validate(config);
    StylizedFactsReport report;
    report.input = config.input;
    report.dt_minutes = config.dt_minutes;
    for (const char* n : interpretation_notes) report.notes.emplace_back(n);

    std::vector<PeriodSpec> specs = config.periods;
    const bool whole = specs.empty();
    if (whole) specs.push_back({"all", {}, {}});

    // Periods run concurrently; results are collected in config order.
    std::vector<std::future<PeriodReport>> jobs;
    for (const auto& spec : specs) {
        jobs.push_back(std::async(std::launch::async, [&series, &config, &output_dir, spec, whole] {
            PeriodRunner runner(spec.name, config, output_dir);
            std::optional<PriceSeries> part;
            try {
                part = whole ? series : split_periods(series, {spec}).at(spec.name);
            } catch (const std::exception& e) {
                PeriodReport failed;
                failed.name = spec.name;
                failed.errors.push_back({"split", error_kind(e), e.what()});
                return failed;
            }
            return runner.run(*part);
        }));
    }
    for (auto& j : jobs) report.periods.push_back(j.get());
    return report;
}

StylizedFactsReport run(const RunConfig& config)
{
    validate(config);
    std::size_t rows = 0, rejected = 0;
    const PriceSeries series = load_series(config, &rows, &rejected);
    const std::filesystem::path out = config.output_dir;
    StylizedFactsReport report = analyze(series, config, out);
    report.rows = rows;
    report.rejected_jumps = rejected;
    write_file(out / "report.json", [&](std::ostream& o) { o << to_json(report); });
    write_file(out / "report.txt", [&](std::ostream& o) { o << to_table(report); });
    return report;
}

bool StylizedFactsReport::has_failures() const
{
    return std::any_of(periods.begin(), periods.end(), [](const PeriodReport& p) { return !p.errors.empty(); });
}

int exit_code(const StylizedFactsReport& report)
{
    return report.has_failures() ? 3 : 0;
}

// ---------------------------------------------------------------- report output

namespace {

json opt(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json regime_json(const RegimeSummary& r)
{
    return {{"H", r.h}, {"stderr", r.stderr_}, {"alpha", r.alpha}, {"regime", r.regime}, {"implied_xi", opt(r.implied_xi)}};
}

json period_json(const PeriodReport& p)
{
    json j = {{"name", p.name}, {"start", p.start}, {"end", p.end}, {"samples", p.samples}, {"gap_fills", p.gap_fills}};
    j["volatility"] = p.volatility ? json{{"window", p.volatility->window}, {"mean", p.volatility->mean},
                                          {"max", p.volatility->max}}
                                   : json(nullptr);
    if (p.diffusion) {
        const auto& d = *p.diffusion;
        j["diffusion"] = {{"lag_count", d.lag_count},
                          {"breakpoint_lag", d.breakpoint_lag},
                          {"breakpoint_minutes", d.breakpoint_minutes},
                          {"short", regime_json(d.short_time)},
                          {"long", regime_json(d.long_time)},
                          {"peak_vs_zero_max_rel_diff", d.peak_vs_zero_max_rel_diff}};
    } else {
        j["diffusion"] = nullptr;
    }
    if (p.density) {
        const auto& d = *p.density;
        j["density"] = {{"lag", d.lag},
                        {"tail_slope", d.tail_slope},
                        {"tail_slope_stderr", d.tail_slope_stderr},
                        {"tail_q", d.tail_q},
                        {"semilog_q", d.semilog_q},
                        {"semilog_scale", d.semilog_scale},
                        {"semilog_r_squared", d.semilog_r_squared},
                        {"semilog_pinned", d.semilog_pinned},
                        {"bandwidth", d.bandwidth}};
    } else {
        j["density"] = nullptr;
    }
    if (p.acf) {
        const auto& a = *p.acf;
        j["acf"] = {{"sample_slope", a.sample_slope},
                    {"sample_slope_stderr", a.sample_slope_stderr},
                    {"H", opt(a.hurst)},
                    {"chopping_slope", opt(a.chopping_slope)},
                    {"chopping_H", opt(a.chopping_hurst)},
                    {"fit_lo", a.fit_lo},
                    {"fit_hi", a.fit_hi},
                    {"memory_time_lags", a.memory_time_lags},
                    {"memory_time_minutes", a.memory_time_minutes},
                    {"segments", a.segments},
                    {"dropped_segments", a.dropped_segments}};
    } else {
        j["acf"] = nullptr;
    }
    j["detrend"] = p.detrend ? json{{"window", p.detrend->window}, {"window_minutes", p.detrend->window_minutes},
                                    {"residual_std", p.detrend->residual_std}}
                             : json(nullptr);
    if (p.collapse) {
        const auto& c = *p.collapse;
        j["collapse"] = {{"H", c.hurst_used},         {"lags", c.lags},
                         {"scale_factors", c.scale_factors}, {"implied_d", c.implied_d},
                         {"master_q", c.master_q},    {"master_q_pinned", c.master_q_pinned},
                         {"distance", c.distance},    {"scale_exponent", c.scale_exponent}};
    } else {
        j["collapse"] = nullptr;
    }
    if (p.mfdfa) {
        const auto& m = *p.mfdfa;
        j["mfdfa"] = {{"input", m.input},
                      {"fit_lo", m.fit_lo},
                      {"fit_hi", m.fit_hi},
                      {"h2", m.h2},
                      {"fractal_dimension", m.fractal_dimension},
                      {"slope_negative", m.slope_negative},
                      {"stderr_negative", m.stderr_negative},
                      {"slope_positive", m.slope_positive},
                      {"stderr_positive", m.stderr_positive},
                      {"h_range", m.h_range},
                      {"verdict", m.verdict},
                      {"sweep_verdict", m.sweep_verdict.empty() ? json(nullptr) : json(m.sweep_verdict)},
                      {"betas", m.betas},
                      {"peaks_per_beta", m.peaks_per_beta}};
    } else {
        j["mfdfa"] = nullptr;
    }
    json errors = json::array();
    for (const auto& e : p.errors) errors.push_back({{"section", e.section}, {"kind", e.kind}, {"message", e.message}});
    j["errors"] = errors;
    j["notes"] = p.notes;
    j["files"] = p.files;
    return j;
}

} // namespace

std::string to_json(const StylizedFactsReport& r)
{
    json periods = json::array();
    for (const auto& p : r.periods) periods.push_back(period_json(p));
    json j = {{"schema", "stylized-facts-report"},
              {"schema_version", StylizedFactsReport::schema_version},
              {"input", r.input},
              {"dt_minutes", r.dt_minutes},
              {"rows", r.rows},
              {"rejected_jumps", r.rejected_jumps},
              {"periods", periods},
              {"notes", r.notes}};
    return j.dump(2) + "\n";
}

std::string to_table(const StylizedFactsReport& r)
{
    using Cell = std::function<std::string(const PeriodReport&)>;
    auto fixed = [](double v, int digits) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        return std::string(buf);
    };
    auto pm = [&](double v, double e, int digits) { return fixed(v, digits) + " +- " + fixed(e, digits); };
    const std::string na = "-";
    const std::vector<std::pair<std::string, Cell>> rows = {
        {"samples", [](const PeriodReport& p) { return std::to_string(p.samples); }},
        {"gap fills", [](const PeriodReport& p) { return std::to_string(p.gap_fills); }},
        {"tail slope", [&](const PeriodReport& p) { return p.density ? pm(p.density->tail_slope, p.density->tail_slope_stderr, 2) : na; }},
        {"q (tail)", [&](const PeriodReport& p) { return p.density ? fixed(p.density->tail_q, 3) : na; }},
        {"q (semilog)", [&](const PeriodReport& p) { return p.density ? fixed(p.density->semilog_q, 3) : na; }},
        {"H short", [&](const PeriodReport& p) { return p.diffusion ? pm(p.diffusion->short_time.h, p.diffusion->short_time.stderr_, 3) : na; }},
        {"alpha short", [&](const PeriodReport& p) { return p.diffusion ? fixed(p.diffusion->short_time.alpha, 2) + " " + p.diffusion->short_time.regime : na; }},
        {"H long", [&](const PeriodReport& p) { return p.diffusion ? pm(p.diffusion->long_time.h, p.diffusion->long_time.stderr_, 3) : na; }},
        {"alpha long", [&](const PeriodReport& p) { return p.diffusion ? fixed(p.diffusion->long_time.alpha, 2) + " " + p.diffusion->long_time.regime : na; }},
        {"breakpoint (min)", [&](const PeriodReport& p) { return p.diffusion ? fixed(p.diffusion->breakpoint_minutes, 0) : na; }},
        {"ACF slope", [&](const PeriodReport& p) { return p.acf ? pm(p.acf->sample_slope, p.acf->sample_slope_stderr, 2) : na; }},
        {"H from ACF", [&](const PeriodReport& p) { return p.acf && p.acf->hurst ? fixed(*p.acf->hurst, 3) : na; }},
        {"memory time (min)", [&](const PeriodReport& p) { return p.acf ? fixed(p.acf->memory_time_minutes, 1) : na; }},
        {"detrend window (min)", [&](const PeriodReport& p) { return p.detrend ? fixed(p.detrend->window_minutes, 0) : na; }},
        {"collapse q", [&](const PeriodReport& p) { return p.collapse ? fixed(p.collapse->master_q, 3) : na; }},
        {"collapse distance", [&](const PeriodReport& p) { return p.collapse ? fixed(p.collapse->distance, 4) : na; }},
        {"h(2)", [&](const PeriodReport& p) { return p.mfdfa ? fixed(p.mfdfa->h2, 3) : na; }},
        {"h(w) slope w<0", [&](const PeriodReport& p) { return p.mfdfa ? pm(p.mfdfa->slope_negative, p.mfdfa->stderr_negative, 3) : na; }},
        {"h(w) slope w>0", [&](const PeriodReport& p) { return p.mfdfa ? pm(p.mfdfa->slope_positive, p.mfdfa->stderr_positive, 3) : na; }},
        {"fractality", [&](const PeriodReport& p) { return p.mfdfa ? p.mfdfa->verdict : na; }},
        {"spectrum peaks", [&](const PeriodReport& p) { return p.mfdfa && !p.mfdfa->peaks_per_beta.empty() ? std::to_string(p.mfdfa->peaks_per_beta.back()) + " (" + p.mfdfa->sweep_verdict + ")" : na; }},
        {"failed sections", [](const PeriodReport& p) {
             std::string s;
             for (const auto& e : p.errors) s += (s.empty() ? "" : ",") + e.section;
             return s.empty() ? std::string("none") : s;
         }},
    };

    std::vector<std::vector<std::string>> cells;
    std::size_t label_width = 0;
    std::vector<std::size_t> widths;
    for (const auto& p : r.periods) widths.push_back(p.name.size());
    for (const auto& [label, cell] : rows) {
        label_width = std::max(label_width, label.size());
        std::vector<std::string> line;
        for (std::size_t i = 0; i < r.periods.size(); ++i) {
            line.push_back(cell(r.periods[i]));
            widths[i] = std::max(widths[i], line.back().size());
        }
        cells.push_back(std::move(line));
    }

    std::ostringstream out;
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - std::min(w, s.size()), ' '); };
    out << pad("", label_width);
    for (std::size_t i = 0; i < r.periods.size(); ++i) out << "  " << pad(r.periods[i].name, widths[i]);
    out << '\n';
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out << pad(rows[k].first, label_width);
        for (std::size_t i = 0; i < r.periods.size(); ++i) out << "  " << pad(cells[k][i], widths[i]);
        out << '\n';
    }
    for (const auto& p : r.periods) {
        for (const auto& e : p.errors) out << "\n[" << p.name << "] " << e.section << " failed (" << e.kind << "): " << e.message;
        for (const auto& n : p.notes) out << "\n[" << p.name << "] note: " << n;
    }
    if (r.has_failures() || std::any_of(r.periods.begin(), r.periods.end(), [](const auto& p) { return !p.notes.empty(); }))
        out << '\n';
    return out.str();
}

} // namespace stylized
