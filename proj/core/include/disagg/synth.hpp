#pragma once

#include <cstdint>

#include "disagg/model.hpp"

namespace disagg {

struct IntRange {
    int min = 0;
    int max = 0; ///< inclusive
};

struct RealRange {
    double min = 0.0;
    double max = 0.0;
};

enum class TransientShape {
    kStep,        ///< jumps straight to steady state
    kExponential, ///< overshoots, decays toward steady state
    kRamp,        ///< rises linearly from zero to steady state
};

struct ScenarioSpec {
    int num_devices = 1;
    int day_length = 600; ///< samples at one-second granularity
    IntRange events_per_device{1, 2}; ///< switch-on/switch-off pairs per device
    TransientShape transient_shape = TransientShape::kStep;
    IntRange tau_range{0, 10};
    RealRange steady_power_range{100.0, 1000.0}; ///< per feature, watts/vars
    double noise_std = 0.0; ///< Gaussian, per sample and feature
    Vec6 baseline{};
    std::uint64_t rng_seed = 1;
};

void validate(const ScenarioSpec& spec);

struct Scenario {
    DeviceLibrary library;
    StateChangeMatrix true_states;
    PowerSeries power; ///< baseline + power of true_states + noise
};

/// Deterministic scenario from the spec's seed. Each device gets its drawn
/// count of event pairs at distinct times with the switch-off strictly after
/// its switch-on; pairs of one device never overlap. Throws if a device's
/// pairs cannot fit into the day.
Scenario generate_scenario(const ScenarioSpec& spec);

/// Score of one event polarity. With no predictions, precision is reported
/// as 1 and flagged; likewise recall with no ground-truth events.
struct PolarityAccuracy {
    double precision = 1.0;
    double recall = 1.0;
    std::size_t matched = 0;
    std::size_t found = 0;
    std::size_t truth = 0;
    bool zero_predictions = false;
    bool zero_truth = false;
};

struct StateAccuracy {
    PolarityAccuracy on;
    PolarityAccuracy off;
};

/// One-to-one matching of found events to true events of the same device and
/// polarity within +-tolerance_samples, nearest pairs first; precision and
/// recall are pooled over devices per polarity.
StateAccuracy state_accuracy(const StateChangeMatrix& truth, const StateChangeMatrix& found,
                             int tolerance_samples);

} // namespace disagg
