#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "disagg/errors.hpp"
#include "disagg/io.hpp"
#include "disagg/metrics.hpp"
#include "disagg/pipeline.hpp"
#include "disagg/synth.hpp"

namespace {

using nlohmann::ordered_json;

struct DisaggArgs {
    std::string power_csv;
    std::string library_json;
    std::string out_dir;
    std::optional<std::string> config_file;
    std::optional<std::uint64_t> seed;
    int granularity = 1;
    int parallel_days = 1;
};

struct SynthArgs {
    std::string spec_json;
    std::string out_dir;
};

struct EvalArgs {
    std::string measured_csv;
    std::string reconstructed_csv;
    int granularity = 1;
};

struct HistArgs {
    std::string states_csv;
    std::string out_dir;
    int window_minutes = 30;
    int granularity = 1;
};

ordered_json input_digest(const std::string& path) {
    ordered_json entry;
    entry["path"] = path;
    entry["fnv1a64"] = disagg::fnv1a64_file(path);
    return entry;
}

std::string day_dir_name(std::size_t index) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "day_%03zu", index);
    return buffer;
}

void warn_missing(const std::string& path, const disagg::CsvLoadStats& stats) {
    if (stats.missing_warning)
        std::cerr << "warning: " << path << ": " << stats.rows_filled
                  << " samples forward-filled (" << stats.missing_fraction * 100.0
                  << " % of the series)\n";
}

ordered_json aggregate_metric(const std::vector<disagg::MetricsReport>& reports,
                              const std::function<std::optional<double>(
                                  const disagg::MetricsReport&)>& get) {
    std::vector<double> values;
    for (const disagg::MetricsReport& report : reports)
        if (const std::optional<double> value = get(report)) values.push_back(*value);
    if (values.empty()) return nullptr;

    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());

    ordered_json entry;
    entry["mean"] = mean;
    if (values.size() >= 2) {
        double sq = 0.0;
        for (double v : values) sq += (v - mean) * (v - mean);
        entry["std"] = std::sqrt(sq / static_cast<double>(values.size() - 1));
    } else {
        entry["std"] = nullptr;
    }
    entry["days"] = values.size();
    return entry;
}

int run_disagg(const DisaggArgs& args) {
    disagg::PsoConfig cfg =
        args.config_file ? disagg::load_pso_config(*args.config_file) : disagg::PsoConfig{};
    if (args.seed) cfg.rng_seed = *args.seed;
    if (args.parallel_days < 1) throw disagg::ConfigError("--parallel-days must be positive");

    disagg::CsvLoadStats stats;
    const disagg::PowerSeries series =
        disagg::load_power_csv(args.power_csv, args.granularity, &stats);
    warn_missing(args.power_csv, stats);
    const disagg::DeviceLibrary library = disagg::load_device_library(args.library_json);

    const std::vector<disagg::PowerSeries> days = disagg::split_days(series);

    std::vector<std::optional<disagg::DayResult>> results(days.size());
    const auto process = [&](std::size_t index) {
        std::mt19937_64 rng = disagg::make_day_rng(cfg.rng_seed, index);
        results[index] = disagg::disaggregate_day(days[index], library, cfg, rng);
    };

    const auto workers =
        std::min<std::size_t>(static_cast<std::size_t>(args.parallel_days), days.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < days.size(); ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> failures(days.size());
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t index = next.fetch_add(1);
                    if (index >= days.size()) return;
                    try {
                        process(index);
                    } catch (...) {
                        failures[index] = std::current_exception();
                    }
                }
            });
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& failure : failures)
            if (failure) std::rethrow_exception(failure);
    }

    const std::filesystem::path out_dir(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw disagg::IoError("cannot create " + out_dir.string() + ": " + ec.message());

    ordered_json summary;
    summary["days"] = ordered_json::array();
    std::vector<disagg::MetricsReport> reports;
    for (std::size_t i = 0; i < days.size(); ++i) {
        const disagg::DayResult& result = *results[i];
        const disagg::MetricsReport metrics = disagg::compute_metrics(
            disagg::total_active(days[i]), disagg::total_active(result.reconstructed));
        disagg::save_day_result(out_dir / day_dir_name(i), result, metrics);
        reports.push_back(metrics);

        ordered_json day;
        day["index"] = i;
        day["dir"] = day_dir_name(i);
        day["start_time"] = days[i].start_time;
        day["samples"] = days[i].size();
        day["metrics"] = disagg::metrics_to_json(metrics);
        summary["days"].push_back(std::move(day));
    }

    ordered_json aggregate;
    aggregate["rmse"] = aggregate_metric(reports, [](const auto& r) {
        return std::optional<double>(r.rmse);
    });
    aggregate["mae"] = aggregate_metric(reports, [](const auto& r) {
        return std::optional<double>(r.mae);
    });
    aggregate["mape"] = aggregate_metric(reports, [](const auto& r) { return r.mape; });
    aggregate["energy_error"] =
        aggregate_metric(reports, [](const auto& r) { return r.energy_error; });
    aggregate["energy_error_signed"] =
        aggregate_metric(reports, [](const auto& r) { return r.energy_error_signed; });
    aggregate["rmse_over_mean_power"] =
        aggregate_metric(reports, [](const auto& r) { return r.rmse_over_mean_power; });
    summary["aggregate"] = std::move(aggregate);
    disagg::save_json(out_dir / "summary.json", summary);

    ordered_json run;
    run["command"] = "disagg";
    run["seed"] = cfg.rng_seed;
    run["config"] = disagg::pso_config_to_json(cfg);
    run["granularity"] = args.granularity;
    run["parallel_days"] = args.parallel_days;
    run["inputs"] = ordered_json::object();
    run["inputs"]["power_csv"] = input_digest(args.power_csv);
    run["inputs"]["library_json"] = input_digest(args.library_json);
    run["inputs"]["config_file"] =
        args.config_file ? input_digest(*args.config_file) : ordered_json(nullptr);
    disagg::save_json(out_dir / "run.json", run);

    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_synth(const SynthArgs& args) {
    const disagg::ScenarioSpec spec = disagg::load_scenario_spec(args.spec_json);
    const disagg::Scenario scenario = disagg::generate_scenario(spec);

    const std::filesystem::path out_dir(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw disagg::IoError("cannot create " + out_dir.string() + ": " + ec.message());

    disagg::save_power_csv(out_dir / "power.csv", scenario.power);
    disagg::save_device_library(out_dir / "library.json", scenario.library);
    disagg::save_states_csv(out_dir / "true_states.csv", scenario.true_states);
    disagg::save_json(out_dir / "scenario.json", disagg::scenario_spec_to_json(spec));

    ordered_json run;
    run["command"] = "synth";
    run["seed"] = spec.rng_seed;
    run["scenario"] = disagg::scenario_spec_to_json(spec);
    run["inputs"] = ordered_json::object();
    run["inputs"]["spec_json"] = input_digest(args.spec_json);
    disagg::save_json(out_dir / "run.json", run);

    std::cout << disagg::scenario_spec_to_json(spec).dump(2) << '\n';
    return 0;
}

int run_eval(const EvalArgs& args) {
    disagg::CsvLoadStats measured_stats;
    disagg::CsvLoadStats reconstructed_stats;
    const disagg::PowerSeries measured =
        disagg::load_power_csv(args.measured_csv, args.granularity, &measured_stats);
    const disagg::PowerSeries reconstructed =
        disagg::load_power_csv(args.reconstructed_csv, args.granularity, &reconstructed_stats);
    warn_missing(args.measured_csv, measured_stats);
    warn_missing(args.reconstructed_csv, reconstructed_stats);

    const disagg::MetricsReport metrics = disagg::compute_metrics(
        disagg::total_active(measured), disagg::total_active(reconstructed));
    std::cout << disagg::metrics_to_json(metrics).dump(2) << '\n';
    return 0;
}

int run_hist(const HistArgs& args) {
    const std::vector<disagg::StateEvent> events = disagg::load_states_csv(args.states_csv);
    const disagg::StateChangeMatrix states = disagg::to_state_matrix(events);

    const std::filesystem::path out_dir(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw disagg::IoError("cannot create " + out_dir.string() + ": " + ec.message());

    for (std::size_t device = 0; device < states.cols(); ++device) {
        const disagg::OnEventHistogram histogram =
            disagg::on_event_histogram(states, device, args.window_minutes, args.granularity);
        char name[40];
        std::snprintf(name, sizeof name, "hist_device_%03zu.csv", device);
        disagg::save_histogram_csv(out_dir / name, histogram);
    }

    ordered_json run;
    run["command"] = "hist";
    run["window_minutes"] = args.window_minutes;
    run["granularity"] = args.granularity;
    run["devices"] = states.cols();
    run["inputs"] = ordered_json::object();
    run["inputs"]["states_csv"] = input_digest(args.states_csv);
    disagg::save_json(out_dir / "run.json", run);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy disaggregation of aggregate power signals via particle swarm "
                 "optimization"};
    app.require_subcommand(1);

    DisaggArgs disagg_args;
    CLI::App* disagg_cmd =
        app.add_subcommand("disagg", "Disaggregate a power CSV into device state changes");
    disagg_cmd->add_option("power_csv", disagg_args.power_csv, "Aggregate power CSV")
        ->required();
    disagg_cmd->add_option("library_json", disagg_args.library_json, "Device library JSON")
        ->required();
    disagg_cmd->add_option("out_dir", disagg_args.out_dir, "Output directory")->required();
    disagg_cmd->add_option("--config", disagg_args.config_file, "Optimizer config JSON");
    disagg_cmd->add_option("--seed", disagg_args.seed, "Override the config's rng_seed");
    disagg_cmd->add_option("--granularity", disagg_args.granularity, "Seconds per sample")
        ->check(CLI::PositiveNumber);
    disagg_cmd->add_option("--parallel-days", disagg_args.parallel_days,
                           "Worker threads over independent days")
        ->check(CLI::PositiveNumber);

    SynthArgs synth_args;
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "Generate a synthetic scenario with ground truth");
    synth_cmd->add_option("spec_json", synth_args.spec_json, "Scenario spec JSON")->required();
    synth_cmd->add_option("out_dir", synth_args.out_dir, "Output directory")->required();

    EvalArgs eval_args;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Power-domain metrics between two power CSVs");
    eval_cmd->add_option("measured_csv", eval_args.measured_csv, "Measured power CSV")
        ->required();
    eval_cmd
        ->add_option("reconstructed_csv", eval_args.reconstructed_csv, "Reconstructed power CSV")
        ->required();
    eval_cmd->add_option("--granularity", eval_args.granularity, "Seconds per sample")
        ->check(CLI::PositiveNumber);

    HistArgs hist_args;
    CLI::App* hist_cmd =
        app.add_subcommand("hist", "Per-device switch-on histograms from a states CSV");
    hist_cmd->add_option("states_csv", hist_args.states_csv, "State changes CSV")->required();
    hist_cmd->add_option("out_dir", hist_args.out_dir, "Output directory")->required();
    hist_cmd->add_option("--window-minutes", hist_args.window_minutes, "Window size in minutes")
        ->check(CLI::PositiveNumber);
    hist_cmd->add_option("--granularity", hist_args.granularity, "Seconds per matrix row")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        return app.exit(error);
    }

    try {
        if (disagg_cmd->parsed()) return run_disagg(disagg_args);
        if (synth_cmd->parsed()) return run_synth(synth_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (hist_cmd->parsed()) return run_hist(hist_args);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
