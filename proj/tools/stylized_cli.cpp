// Command-line front end: run, sweep-detrend, synth, validate.

#include "stylized/error.hpp"
#include "stylized/pipeline.hpp"
#include "stylized/plotdata.hpp"
#include "stylized/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace stylized;

namespace {

int code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    return 3;
}

int cmd_run(const std::string& config_path)
{
    const RunConfig config = load_config(config_path);
    const auto report = run(config);
    std::cout << to_table(report);
    std::cout << "report: " << (std::filesystem::path(config.output_dir) / "report.json").string() << '\n';
    return exit_code(report);
}

int cmd_validate(const std::string& config_path)
{
    const RunConfig config = load_config(config_path);
    validate(config);
    if (!std::filesystem::exists(config.input)) throw DataError("input " + config.input + " does not exist");
    std::cout << "config ok\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, std::vector<std::size_t> windows, std::vector<std::size_t> lags)
{
    const RunConfig config = load_config(config_path);
    validate(config);
    if (windows.empty()) windows = config.detrend.sweep;
    if (windows.empty()) windows = default_sweep_windows(config.dt_minutes);
    if (lags.empty()) lags = config.detrend.collapse_lags;
    if (lags.empty()) lags = default_collapse_lags(config.detrend.window);

    const PriceSeries series = load_series(config);
    std::vector<std::pair<std::string, PriceSeries>> parts;
    if (config.periods.empty()) parts.emplace_back("all", series);
    else
        for (const auto& spec : config.periods) parts.emplace_back(spec.name, split_periods(series, {spec}).at(spec.name));

    for (const auto& [name, part] : parts) {
        std::vector<std::size_t> usable;
        for (auto w : windows)
            if (w <= part.size()) usable.push_back(w);
            else std::cerr << name << ": window " << w << " longer than the period, skipped\n";
        if (usable.empty()) throw ConfigError("no sweep window fits period " + name);

        std::vector<SweepRow> rows;
        std::vector<double> seconds;
        for (auto w : usable) {
            const auto t0 = std::chrono::steady_clock::now();
            rows.push_back(sweep_detrend_window(part, {w}, lags, config.kde, config.detrend.r2_threshold).front());
            seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }

        const auto path = std::filesystem::path(config.output_dir) / name / "detrend_sweep.csv";
        write_file(path, [&](std::ostream& out) {
            out << "window,window_minutes,lag,r_squared,min_r_squared,passes\n";
            for (const auto& r : rows)
                for (std::size_t i = 0; i < r.lags.size(); ++i)
                    out << r.window << ',' << r.window * static_cast<std::size_t>(config.dt_minutes) << ',' << r.lags[i]
                        << ',' << format_number(r.r_squared[i]) << ',' << format_number(r.min_r_squared) << ','
                        << (r.passes ? 1 : 0) << '\n';
        });

        std::printf("%s  (lags:", name.c_str());
        for (auto l : lags) std::printf(" %zu", l);
        std::printf(")\n%10s %12s %10s %7s %9s\n", "window", "minutes", "min R^2", "passes", "seconds");
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::printf("%10zu %12zu %10.4f %7s %9.3f\n", rows[i].window,
                        rows[i].window * static_cast<std::size_t>(config.dt_minutes), rows[i].min_r_squared,
                        rows[i].passes ? "yes" : "no", seconds[i]);
        std::printf("written: %s\n", path.string().c_str());
    }
    return 0;
}

struct SynthOptions {
    std::string generator;
    std::size_t n = 1 << 16;
    std::uint64_t seed = 1;
    double sigma = 1.0;
    double hurst = 0.5;
    double q = 1.5;
    double phi = 0.5;
    double start_price = 10000.0;
    int dt_minutes = 10;
    std::string start = "2021-01-01T00:00:00Z";
    bool values_only = false;
    std::string output;
};

int cmd_synth(const SynthOptions& o)
{
    std::vector<double> x;
    if (o.generator == "white") x = gaussian_white(o.n, o.sigma, Seed{o.seed}).values;
    else if (o.generator == "fgn") x = fgn(o.n, o.hurst, Seed{o.seed}).values;
    else if (o.generator == "qgauss") x = q_gaussian_sample(o.n, o.q, Seed{o.seed});
    else if (o.generator == "ar1") x = ar1(o.n, o.phi, Seed{o.seed}).values;
    else throw ConfigError("unknown generator '" + o.generator + "'");
    if (o.generator != "white" && o.sigma != 1.0)
        for (auto& v : x) v *= o.sigma;

    auto emit = [&](std::ostream& out) {
        if (o.values_only) {
            out << "i,value\n";
            for (std::size_t i = 0; i < x.size(); ++i) out << i << ',' << format_number(x[i]) << '\n';
            return;
        }
        const auto t0 = parse_timestamp(o.start);
        if (!t0) throw ConfigError("bad --start timestamp '" + o.start + "'");
        const auto price = cumulative(x, o.start_price);
        out << "ts,price\n";
        for (std::size_t i = 0; i < price.size(); ++i)
            out << format_timestamp(*t0 + std::chrono::minutes(static_cast<long>(o.dt_minutes) * static_cast<long>(i)))
                << ',' << format_number(price[i]) << '\n';
    };
    if (o.output.empty() || o.output == "-") emit(std::cout);
    else write_file(o.output, emit);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stylized facts of high-frequency price series"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run the full analysis described by a config file");
    run_cmd->add_option("config", config_path, "JSON config")->required();

    auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running it");
    validate_cmd->add_option("config", config_path, "JSON config")->required();

    std::vector<std::size_t> windows, lags;
    auto* sweep_cmd = app.add_subcommand("sweep-detrend", "Gaussian R^2 of the detrended increments per window");
    sweep_cmd->add_option("config", config_path, "JSON config")->required();
    sweep_cmd->add_option("--windows", windows, "candidate windows in grid units (default: config, then 1 h..26 w)");
    sweep_cmd->add_option("--lags", lags, "lags of the increment PDFs (default: config collapse lags)");

    SynthOptions so;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic series as CSV");
    synth_cmd->add_option("generator", so.generator, "white | fgn | qgauss | ar1")
        ->required()
        ->check(CLI::IsMember({"white", "fgn", "qgauss", "ar1"}));
    synth_cmd->add_option("-n,--n", so.n, "number of increments")->capture_default_str();
    synth_cmd->add_option("--seed", so.seed, "generator seed")->capture_default_str();
    synth_cmd->add_option("--sigma", so.sigma, "increment scale")->capture_default_str();
    synth_cmd->add_option("--hurst", so.hurst, "fgn Hurst exponent")->capture_default_str();
    synth_cmd->add_option("--q", so.q, "qgauss entropic index")->capture_default_str();
    synth_cmd->add_option("--phi", so.phi, "ar1 coefficient")->capture_default_str();
    synth_cmd->add_option("--start-price", so.start_price, "index value before the first increment")->capture_default_str();
    synth_cmd->add_option("--dt", so.dt_minutes, "grid step in minutes")->capture_default_str();
    synth_cmd->add_option("--start", so.start, "first timestamp")->capture_default_str();
    synth_cmd->add_flag("--values", so.values_only, "write the raw increments instead of a price CSV");
    synth_cmd->add_option("-o,--output", so.output, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*run_cmd) return cmd_run(config_path);
        if (*validate_cmd) return cmd_validate(config_path);
        if (*sweep_cmd) return cmd_sweep(config_path, windows, lags);
        if (*synth_cmd) return cmd_synth(so);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return code_for(e);
    }
    return 1;
}
