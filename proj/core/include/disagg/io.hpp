#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "disagg/metrics.hpp"
#include "disagg/model.hpp"
#include "disagg/pipeline.hpp"
#include "disagg/pso.hpp"
#include "disagg/synth.hpp"

namespace disagg {

struct CsvLoadStats {
    std::size_t rows_in_file = 0;
    std::size_t rows_filled = 0; ///< rows synthesized by forward fill
    double missing_fraction = 0.0;
    bool missing_warning = false;
};

/// Loads a power CSV (header `timestamp,P0,P1,P2,P3,P4,P5`; timestamps are
/// epoch seconds or ISO-8601, strictly increasing, on the granularity grid).
/// Gaps are forward-filled with the last known row; the series starts at the
/// first row present (nothing is back-filled). Exceeding warn_missing_fraction
/// sets the warning flag in stats, it is not an error.
PowerSeries load_power_csv(const std::filesystem::path& path, int expected_granularity = 1,
                           CsvLoadStats* stats = nullptr, double warn_missing_fraction = 0.05);

void save_power_csv(const std::filesystem::path& path, const PowerSeries& series);

DeviceLibrary load_device_library(const std::filesystem::path& path);
void save_device_library(const std::filesystem::path& path, const DeviceLibrary& library);

struct StateEvent {
    std::size_t t = 0;
    std::size_t device = 0;
    int event = 0; ///< +1 or -1
};

/// Loads a state-change CSV (header `t,device,event`).
std::vector<StateEvent> load_states_csv(const std::filesystem::path& path);

/// Packs events into a matrix; rows/cols of 0 mean "infer from the events".
StateChangeMatrix to_state_matrix(const std::vector<StateEvent>& events, std::size_t rows = 0,
                                  std::size_t cols = 0);

void save_states_csv(const std::filesystem::path& path, const StateChangeMatrix& states);

/// Flat JSON config document; unknown keys are rejected so typos fail loudly.
PsoConfig load_pso_config(const std::filesystem::path& path);
PsoConfig parse_pso_config(const nlohmann::ordered_json& document);
nlohmann::ordered_json pso_config_to_json(const PsoConfig& cfg);

ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
ScenarioSpec parse_scenario_spec(const nlohmann::ordered_json& document);
nlohmann::ordered_json scenario_spec_to_json(const ScenarioSpec& spec);

nlohmann::ordered_json metrics_to_json(const MetricsReport& report);

void save_histogram_csv(const std::filesystem::path& path, const OnEventHistogram& histogram);

/// Writes states.csv, reconstructed.csv, metrics.json, and frames.json into
/// `dir`, creating it if needed.
void save_day_result(const std::filesystem::path& dir, const DayResult& result,
                     const MetricsReport& metrics);

void save_json(const std::filesystem::path& path, const nlohmann::ordered_json& document);
nlohmann::ordered_json load_json(const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a file's bytes, as a fixed-width hex string.
std::string fnv1a64_file(const std::filesystem::path& path);

/// Shortest representation that round-trips through a double exactly.
std::string format_double(double value);

} // namespace disagg
