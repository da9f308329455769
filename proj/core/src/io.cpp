#include "disagg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "disagg/errors.hpp"

namespace disagg {

namespace {

using nlohmann::ordered_json;

std::string line_context(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string() + " for reading");
    return file;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    return file;
}

void finish_output(std::ofstream& file, const std::filesystem::path& path) {
    file.flush();
    if (!file) throw IoError("failed writing " + path.string());
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(begin));
            return fields;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

double parse_double_field(const std::string& field, const std::filesystem::path& path,
                          std::size_t line) {
    double value = 0.0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("bad number '" + field + "' at " + line_context(path, line));
    return value;
}

std::int64_t parse_int_field(const std::string& field, const std::filesystem::path& path,
                             std::size_t line) {
    std::int64_t value = 0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("bad integer '" + field + "' at " + line_context(path, line));
    return value;
}

// Days between 1970-01-01 and the given civil date (proleptic Gregorian).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t parse_timestamp(const std::string& field, const std::filesystem::path& path,
                             std::size_t line) {
    if (field.find(':') == std::string::npos) return parse_int_field(field, path, line);

    // ISO-8601: YYYY-MM-DD{T or space}HH:MM:SS, optional trailing Z, UTC.
    std::string text = field;
    if (!text.empty() && text.back() == 'Z') text.pop_back();
    const auto fail = [&] {
        throw ParseError("bad timestamp '" + field + "' at " + line_context(path, line));
    };
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' ||
        (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
        fail();
    const auto number_at = [&](std::size_t pos, std::size_t len) {
        int value = 0;
        const char* begin = text.data() + pos;
        const auto [ptr, ec] = std::from_chars(begin, begin + len, value);
        if (ec != std::errc{} || ptr != begin + len) fail();
        return value;
    };
    const int year = number_at(0, 4);
    const int month = number_at(5, 2);
    const int day = number_at(8, 2);
    const int hour = number_at(11, 2);
    const int minute = number_at(14, 2);
    const int second = number_at(17, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        fail();
    return days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) *
               86400 +
           hour * 3600 + minute * 60 + second;
}

constexpr const char* kPowerHeader = "timestamp,P0,P1,P2,P3,P4,P5";
constexpr const char* kStatesHeader = "t,device,event";
constexpr const char* kHistogramHeader = "window_start_seconds,count,normalized";

bool next_line(std::istream& stream, std::string& line) {
    if (!std::getline(stream, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void require_header(std::istream& stream, const char* expected,
                    const std::filesystem::path& path) {
    std::string line;
    if (!next_line(stream, line) || line != expected)
        throw ParseError(path.string() + ": expected header '" + std::string(expected) + "'");
}

double json_number(const ordered_json& value, const std::string& key) {
    if (!value.is_number()) throw ParseError("key '" + key + "' must be a number");
    return value.get<double>();
}

int json_int(const ordered_json& value, const std::string& key) {
    if (!value.is_number_integer()) throw ParseError("key '" + key + "' must be an integer");
    return value.get<int>();
}

Vec6 json_vec6(const ordered_json& value, const std::string& key) {
    if (!value.is_array() || value.size() != kNumFeatures)
        throw ParseError("key '" + key + "' must be an array of 6 numbers");
    Vec6 out{};
    for (std::size_t d = 0; d < kNumFeatures; ++d) out[d] = json_number(value[d], key);
    return out;
}

} // namespace

PowerSeries load_power_csv(const std::filesystem::path& path, int expected_granularity,
                           CsvLoadStats* stats, double warn_missing_fraction) {
    if (expected_granularity < 1) throw ConfigError("granularity must be positive");
    std::ifstream file = open_input(path);
    require_header(file, kPowerHeader, path);

    PowerSeries series;
    series.granularity = expected_granularity;
    CsvLoadStats local{};

    std::string line;
    std::size_t line_number = 1;
    std::int64_t last_time = 0;
    while (next_line(file, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 1 + kNumFeatures)
            throw ParseError("expected 7 fields at " + line_context(path, line_number));

        const std::int64_t time = parse_timestamp(fields[0], path, line_number);
        Vec6 row{};
        for (std::size_t d = 0; d < kNumFeatures; ++d)
            row[d] = parse_double_field(fields[1 + d], path, line_number);

        if (local.rows_in_file == 0) {
            series.start_time = time;
        } else {
            if (time == last_time)
                throw DataError("duplicate timestamp at " + line_context(path, line_number));
            if (time < last_time)
                throw DataError("timestamps not increasing at " + line_context(path, line_number));
            const std::int64_t gap = time - last_time;
            if (gap % expected_granularity != 0)
                throw DataError("timestamp off the " + std::to_string(expected_granularity) +
                                " s grid at " + line_context(path, line_number));
            // Forward fill: repeat the previous row for each missing grid step.
            for (std::int64_t missing = 1; missing < gap / expected_granularity; ++missing) {
                series.samples.push_back(series.samples.back());
                ++local.rows_filled;
            }
        }
        series.samples.push_back(row);
        last_time = time;
        ++local.rows_in_file;
    }
    if (series.samples.empty()) throw DataError(path.string() + ": no data rows");

    local.missing_fraction =
        static_cast<double>(local.rows_filled) / static_cast<double>(series.samples.size());
    local.missing_warning = local.missing_fraction > warn_missing_fraction;
    if (stats) *stats = local;
    validate(series);
    return series;
}

void save_power_csv(const std::filesystem::path& path, const PowerSeries& series) {
    validate(series);
    std::ofstream file = open_output(path);
    file << kPowerHeader << '\n';
    for (std::size_t t = 0; t < series.size(); ++t) {
        file << series.start_time + static_cast<std::int64_t>(t) * series.granularity;
        for (double value : series.row(t)) file << ',' << format_double(value);
        file << '\n';
    }
    finish_output(file, path);
}

DeviceLibrary load_device_library(const std::filesystem::path& path) {
    const ordered_json document = load_json(path);
    if (!document.is_object() || !document.contains("profiles") ||
        !document["profiles"].is_array())
        throw ParseError(path.string() + ": expected an object with a 'profiles' array");

    DeviceLibrary library;
    int id = 0;
    for (const ordered_json& entry : document["profiles"]) {
        if (!entry.is_object() || !entry.contains("tau") || !entry.contains("steady_state") ||
            !entry.contains("transient"))
            throw ParseError(path.string() +
                             ": each profile needs 'tau', 'steady_state' and 'transient'");
        DeviceProfile profile;
        profile.id = id++;
        const int tau = json_int(entry["tau"], "tau");
        profile.steady_state = json_vec6(entry["steady_state"], "steady_state");
        const ordered_json& transient = entry["transient"];
        if (!transient.is_array() || transient.size() != static_cast<std::size_t>(tau))
            throw DataError(path.string() + ": profile " + std::to_string(profile.id) +
                            " transient must have tau = " + std::to_string(tau) + " rows");
        for (const ordered_json& row : transient)
            profile.transient.push_back(json_vec6(row, "transient"));
        library.profiles.push_back(std::move(profile));
    }
    validate(library);
    return library;
}

void save_device_library(const std::filesystem::path& path, const DeviceLibrary& library) {
    validate(library);
    ordered_json document;
    document["profiles"] = ordered_json::array();
    for (const DeviceProfile& profile : library.profiles) {
        ordered_json entry;
        entry["tau"] = profile.transient.size();
        entry["steady_state"] = profile.steady_state;
        entry["transient"] = ordered_json::array();
        for (const Vec6& row : profile.transient) entry["transient"].push_back(row);
        document["profiles"].push_back(std::move(entry));
    }
    save_json(path, document);
}

std::vector<StateEvent> load_states_csv(const std::filesystem::path& path) {
    std::ifstream file = open_input(path);
    require_header(file, kStatesHeader, path);

    std::vector<StateEvent> events;
    std::string line;
    std::size_t line_number = 1;
    while (next_line(file, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 3)
            throw ParseError("expected 3 fields at " + line_context(path, line_number));
        StateEvent event;
        const std::int64_t t = parse_int_field(fields[0], path, line_number);
        const std::int64_t device = parse_int_field(fields[1], path, line_number);
        const std::int64_t value = parse_int_field(fields[2], path, line_number);
        if (t < 0 || device < 0)
            throw DataError("negative index at " + line_context(path, line_number));
        if (value != 1 && value != -1)
            throw DataError("event must be +1 or -1 at " + line_context(path, line_number));
        event.t = static_cast<std::size_t>(t);
        event.device = static_cast<std::size_t>(device);
        event.event = static_cast<int>(value);
        events.push_back(event);
    }
    return events;
}

StateChangeMatrix to_state_matrix(const std::vector<StateEvent>& events, std::size_t rows,
                                  std::size_t cols) {
    if (rows == 0 || cols == 0) {
        for (const StateEvent& event : events) {
            rows = std::max(rows, event.t + 1);
            cols = std::max(cols, event.device + 1);
        }
        rows = std::max<std::size_t>(rows, 1);
        cols = std::max<std::size_t>(cols, 1);
    }
    StateChangeMatrix states(rows, cols);
    for (const StateEvent& event : events) {
        if (event.t >= rows || event.device >= cols)
            throw DataError("event at t=" + std::to_string(event.t) + ", device=" +
                            std::to_string(event.device) + " outside a " + std::to_string(rows) +
                            "x" + std::to_string(cols) + " matrix");
        states.set(event.t, event.device, static_cast<std::int8_t>(event.event));
    }
    return states;
}

void save_states_csv(const std::filesystem::path& path, const StateChangeMatrix& states) {
    std::ofstream file = open_output(path);
    file << kStatesHeader << '\n';
    states.for_each_event([&](std::size_t t, std::size_t device, int value) {
        file << t << ',' << device << ',' << value << '\n';
    });
    finish_output(file, path);
}

namespace {

void reject_unknown_keys(const ordered_json& document, std::initializer_list<const char*> known,
                         const char* what) {
    for (const auto& [key, value] : document.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end())
            throw ConfigError(std::string("unknown ") + what + " key '" + key + "'");
    }
}

IntRange json_int_range(const ordered_json& value, const std::string& key) {
    if (!value.is_array() || value.size() != 2)
        throw ParseError("key '" + key + "' must be [min, max]");
    return {json_int(value[0], key), json_int(value[1], key)};
}

RealRange json_real_range(const ordered_json& value, const std::string& key) {
    if (!value.is_array() || value.size() != 2)
        throw ParseError("key '" + key + "' must be [min, max]");
    return {json_number(value[0], key), json_number(value[1], key)};
}

} // namespace

PsoConfig parse_pso_config(const nlohmann::ordered_json& document) {
    if (!document.is_object()) throw ParseError("config must be a JSON object");
    reject_unknown_keys(document,
                        {"num_particles", "max_epochs", "iterations_per_epoch", "min_epochs",
                         "stall_epochs", "event_init_fraction", "event_threshold", "inertia",
                         "cognitive_start", "cognitive_end", "social_start", "social_end", "alpha",
                         "beta", "frame_length", "baseline_window", "rng_seed"},
                        "config");

    PsoConfig cfg;
    const auto get_int = [&](const char* key, int& out) {
        if (document.contains(key)) out = json_int(document[key], key);
    };
    const auto get_real = [&](const char* key, double& out) {
        if (document.contains(key)) out = json_number(document[key], key);
    };
    get_int("num_particles", cfg.num_particles);
    get_int("max_epochs", cfg.max_epochs);
    get_int("iterations_per_epoch", cfg.iterations_per_epoch);
    get_int("min_epochs", cfg.min_epochs);
    get_int("stall_epochs", cfg.stall_epochs);
    get_real("event_init_fraction", cfg.event_init_fraction);
    get_real("event_threshold", cfg.event_threshold);
    get_real("inertia", cfg.inertia);
    get_real("cognitive_start", cfg.cognitive.start);
    get_real("cognitive_end", cfg.cognitive.end);
    get_real("social_start", cfg.social.start);
    get_real("social_end", cfg.social.end);
    get_real("alpha", cfg.weights.alpha);
    get_real("beta", cfg.weights.beta);
    get_int("frame_length", cfg.frame_length);
    get_int("baseline_window", cfg.baseline_window);
    if (document.contains("rng_seed")) {
        if (!document["rng_seed"].is_number_integer())
            throw ParseError("key 'rng_seed' must be an integer");
        cfg.rng_seed = document["rng_seed"].get<std::uint64_t>();
    }
    validate(cfg);
    return cfg;
}

PsoConfig load_pso_config(const std::filesystem::path& path) {
    return parse_pso_config(load_json(path));
}

nlohmann::ordered_json pso_config_to_json(const PsoConfig& cfg) {
    ordered_json document;
    document["num_particles"] = cfg.num_particles;
    document["max_epochs"] = cfg.max_epochs;
    document["iterations_per_epoch"] = cfg.iterations_per_epoch;
    document["min_epochs"] = cfg.min_epochs;
    document["stall_epochs"] = cfg.stall_epochs;
    document["event_init_fraction"] = cfg.event_init_fraction;
    document["event_threshold"] = cfg.event_threshold;
    document["inertia"] = cfg.inertia;
    document["cognitive_start"] = cfg.cognitive.start;
    document["cognitive_end"] = cfg.cognitive.end;
    document["social_start"] = cfg.social.start;
    document["social_end"] = cfg.social.end;
    document["alpha"] = cfg.weights.alpha;
    document["beta"] = cfg.weights.beta;
    document["frame_length"] = cfg.frame_length;
    document["baseline_window"] = cfg.baseline_window;
    document["rng_seed"] = cfg.rng_seed;
    return document;
}

ScenarioSpec parse_scenario_spec(const nlohmann::ordered_json& document) {
    if (!document.is_object()) throw ParseError("scenario spec must be a JSON object");
    reject_unknown_keys(document,
                        {"num_devices", "day_length", "events_per_device", "transient_shape",
                         "tau_range", "steady_power_range", "noise_std", "baseline", "rng_seed"},
                        "scenario");

    ScenarioSpec spec;
    if (document.contains("num_devices"))
        spec.num_devices = json_int(document["num_devices"], "num_devices");
    if (document.contains("day_length"))
        spec.day_length = json_int(document["day_length"], "day_length");
    if (document.contains("events_per_device"))
        spec.events_per_device = json_int_range(document["events_per_device"], "events_per_device");
    if (document.contains("transient_shape")) {
        const std::string shape = document["transient_shape"].get<std::string>();
        if (shape == "step")
            spec.transient_shape = TransientShape::kStep;
        else if (shape == "exponential" || shape == "exponential-decay-to-steady")
            spec.transient_shape = TransientShape::kExponential;
        else if (shape == "ramp")
            spec.transient_shape = TransientShape::kRamp;
        else
            throw ConfigError("unknown transient_shape '" + shape + "'");
    }
    if (document.contains("tau_range"))
        spec.tau_range = json_int_range(document["tau_range"], "tau_range");
    if (document.contains("steady_power_range"))
        spec.steady_power_range =
            json_real_range(document["steady_power_range"], "steady_power_range");
    if (document.contains("noise_std"))
        spec.noise_std = json_number(document["noise_std"], "noise_std");
    if (document.contains("baseline")) spec.baseline = json_vec6(document["baseline"], "baseline");
    if (document.contains("rng_seed")) {
        if (!document["rng_seed"].is_number_integer())
            throw ParseError("key 'rng_seed' must be an integer");
        spec.rng_seed = document["rng_seed"].get<std::uint64_t>();
    }
    validate(spec);
    return spec;
}

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
    return parse_scenario_spec(load_json(path));
}

nlohmann::ordered_json scenario_spec_to_json(const ScenarioSpec& spec) {
    ordered_json document;
    document["num_devices"] = spec.num_devices;
    document["day_length"] = spec.day_length;
    document["events_per_device"] = {spec.events_per_device.min, spec.events_per_device.max};
    switch (spec.transient_shape) {
    case TransientShape::kStep: document["transient_shape"] = "step"; break;
    case TransientShape::kExponential: document["transient_shape"] = "exponential"; break;
    case TransientShape::kRamp: document["transient_shape"] = "ramp"; break;
    }
    document["tau_range"] = {spec.tau_range.min, spec.tau_range.max};
    document["steady_power_range"] = {spec.steady_power_range.min, spec.steady_power_range.max};
    document["noise_std"] = spec.noise_std;
    document["baseline"] = spec.baseline;
    document["rng_seed"] = spec.rng_seed;
    return document;
}

nlohmann::ordered_json metrics_to_json(const MetricsReport& report) {
    ordered_json document;
    document["samples"] = report.samples;
    document["rmse"] = report.rmse;
    document["mae"] = report.mae;
    document["mape"] = report.mape ? ordered_json(*report.mape) : ordered_json(nullptr);
    document["mape_skipped_samples"] = report.mape_skipped_samples;
    document["energy_error"] =
        report.energy_error ? ordered_json(*report.energy_error) : ordered_json(nullptr);
    document["energy_error_signed"] = report.energy_error_signed
                                          ? ordered_json(*report.energy_error_signed)
                                          : ordered_json(nullptr);
    document["rmse_over_mean_power"] = report.rmse_over_mean_power
                                           ? ordered_json(*report.rmse_over_mean_power)
                                           : ordered_json(nullptr);
    return document;
}

void save_histogram_csv(const std::filesystem::path& path, const OnEventHistogram& histogram) {
    std::ofstream file = open_output(path);
    file << kHistogramHeader << '\n';
    for (std::size_t w = 0; w < histogram.counts.size(); ++w) {
        const std::int64_t start =
            static_cast<std::int64_t>(w) * histogram.window_minutes * 60;
        file << start << ',' << histogram.counts[w] << ',' << format_double(histogram.normalized[w])
             << '\n';
    }
    finish_output(file, path);
}

void save_day_result(const std::filesystem::path& dir, const DayResult& result,
                     const MetricsReport& metrics) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    save_states_csv(dir / "states.csv", result.state_changes);
    save_power_csv(dir / "reconstructed.csv", result.reconstructed);
    save_json(dir / "metrics.json", metrics_to_json(metrics));

    ordered_json frames;
    frames["frames"] = ordered_json::array();
    for (std::size_t f = 0; f < result.per_frame_errors.size(); ++f) {
        ordered_json frame;
        frame["index"] = f;
        frame["error"] = result.per_frame_errors[f];
        frame["early_stopped"] = static_cast<bool>(result.frames_early_stopped[f]);
        frame["epochs"] = result.frame_epochs[f];
        frames["frames"].push_back(std::move(frame));
    }
    save_json(dir / "frames.json", frames);
}

void save_json(const std::filesystem::path& path, const nlohmann::ordered_json& document) {
    std::ofstream file = open_output(path);
    file << document.dump(2) << '\n';
    finish_output(file, path);
}

nlohmann::ordered_json load_json(const std::filesystem::path& path) {
    std::ifstream file = open_input(path);
    try {
        return nlohmann::ordered_json::parse(file);
    } catch (const nlohmann::json::parse_error& error) {
        throw ParseError(path.string() + ": " + error.what());
    }
}

std::string fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path.string() + " for hashing");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[4096];
    while (file.read(buffer, sizeof buffer) || file.gcount() > 0) {
        for (std::streamsize i = 0; i < file.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    char digits[17];
    for (int i = 15; i >= 0; --i) {
        digits[i] = "0123456789abcdef"[hash & 0xf];
        hash >>= 4;
    }
    digits[16] = '\0';
    return std::string(digits);
}

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) throw IoError("cannot format double");
    return std::string(buffer, ptr);
}

} // namespace disagg
