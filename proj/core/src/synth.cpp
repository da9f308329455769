#include "disagg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "disagg/errors.hpp"
#include "disagg/reconstruct.hpp"

namespace disagg {

namespace {

void validate_range(const IntRange& r, const char* name) {
    if (r.min > r.max)
        throw ConfigError(std::string(name) + " range is empty (" + std::to_string(r.min) + " > " +
                          std::to_string(r.max) + ")");
}

std::vector<Vec6> make_transient(TransientShape shape, int tau, const Vec6& steady) {
    std::vector<Vec6> transient(static_cast<std::size_t>(tau));
    for (int t = 0; t < tau; ++t) {
        double factor = 1.0;
        switch (shape) {
        case TransientShape::kStep: factor = 1.0; break;
        case TransientShape::kExponential:
            factor = 1.0 + std::exp(-3.0 * (t + 1) / static_cast<double>(tau));
            break;
        case TransientShape::kRamp: factor = (t + 1) / static_cast<double>(tau); break;
        }
        transient[static_cast<std::size_t>(t)] = factor * steady;
    }
    return transient;
}

} // namespace

void validate(const ScenarioSpec& spec) {
    if (spec.num_devices < 1) throw ConfigError("num_devices must be at least 1");
    if (spec.day_length < 1) throw ConfigError("day_length must be at least 1");
    validate_range(spec.events_per_device, "events_per_device");
    validate_range(spec.tau_range, "tau");
    if (spec.events_per_device.min < 0) throw ConfigError("events_per_device cannot be negative");
    if (spec.tau_range.min < 0) throw ConfigError("tau cannot be negative");
    if (spec.steady_power_range.min > spec.steady_power_range.max)
        throw ConfigError("steady_power range is empty");
    if (!std::isfinite(spec.steady_power_range.min) || !std::isfinite(spec.steady_power_range.max))
        throw ConfigError("steady_power range must be finite");
    if (!(spec.noise_std >= 0.0) || !std::isfinite(spec.noise_std))
        throw ConfigError("noise_std must be finite and nonnegative");
    for (double v : spec.baseline)
        if (!std::isfinite(v)) throw ConfigError("baseline must be finite");
}

Scenario generate_scenario(const ScenarioSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.rng_seed);

    const auto day_length = static_cast<std::size_t>(spec.day_length);
    Scenario scenario;
    scenario.true_states = StateChangeMatrix(day_length, static_cast<std::size_t>(spec.num_devices));

    std::uniform_int_distribution<int> tau_dist(spec.tau_range.min, spec.tau_range.max);
    std::uniform_real_distribution<double> power_dist(spec.steady_power_range.min,
                                                      spec.steady_power_range.max);
    std::uniform_int_distribution<int> pairs_dist(spec.events_per_device.min,
                                                  spec.events_per_device.max);

    std::vector<std::size_t> all_times(day_length);
    std::iota(all_times.begin(), all_times.end(), std::size_t{0});
    std::vector<std::size_t> times;
    for (int device = 0; device < spec.num_devices; ++device) {
        DeviceProfile profile;
        profile.id = device;
        const int tau = tau_dist(rng);
        for (std::size_t d = 0; d < kNumFeatures; ++d) profile.steady_state[d] = power_dist(rng);
        profile.transient = make_transient(spec.transient_shape, tau, profile.steady_state);
        scenario.library.profiles.push_back(std::move(profile));

        const int pairs = pairs_dist(rng);
        const auto needed = static_cast<std::size_t>(2 * pairs);
        if (needed > day_length)
            throw ConfigError("device " + std::to_string(device) + " needs " +
                              std::to_string(needed) + " event slots but the day has only " +
                              std::to_string(day_length));

        // Distinct times in ascending order; consecutive pairs become
        // non-overlapping on/off intervals.
        times.clear();
        std::sample(all_times.begin(), all_times.end(), std::back_inserter(times), needed, rng);
        for (std::size_t k = 0; k + 1 < times.size(); k += 2) {
            scenario.true_states.set(times[k], static_cast<std::size_t>(device), 1);
            scenario.true_states.set(times[k + 1], static_cast<std::size_t>(device), -1);
        }
    }

    ReconstructionContext ctx{scenario.library, day_length, Vec6{}};
    scenario.power = reconstruct_power(scenario.true_states, ctx);
    scenario.power.start_time = 0;
    scenario.power.granularity = 1;
    for (Vec6& row : scenario.power.samples) row += spec.baseline;

    if (spec.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.noise_std);
        for (Vec6& row : scenario.power.samples)
            for (std::size_t d = 0; d < kNumFeatures; ++d) row[d] += noise(rng);
    }
    return scenario;
}

namespace {

PolarityAccuracy score_polarity(const std::vector<std::vector<std::size_t>>& truth,
                                const std::vector<std::vector<std::size_t>>& found,
                                int tolerance) {
    PolarityAccuracy accuracy;
    for (const auto& device_truth : truth) accuracy.truth += device_truth.size();
    for (const auto& device_found : found) accuracy.found += device_found.size();

    for (std::size_t device = 0; device < truth.size(); ++device) {
        const auto& t = truth[device];
        const auto& f = found[device];
        // Candidate pairs within tolerance, nearest first; each event matches
        // at most once.
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> candidates;
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j) {
                const auto distance = f[i] > t[j] ? f[i] - t[j] : t[j] - f[i];
                if (distance <= static_cast<std::size_t>(tolerance))
                    candidates.emplace_back(distance, i, j);
            }
        std::sort(candidates.begin(), candidates.end());
        std::vector<bool> found_used(f.size(), false);
        std::vector<bool> truth_used(t.size(), false);
        for (const auto& [distance, i, j] : candidates) {
            if (found_used[i] || truth_used[j]) continue;
            found_used[i] = true;
            truth_used[j] = true;
            ++accuracy.matched;
        }
    }

    if (accuracy.found == 0)
        accuracy.zero_predictions = true;
    else
        accuracy.precision =
            static_cast<double>(accuracy.matched) / static_cast<double>(accuracy.found);
    if (accuracy.truth == 0)
        accuracy.zero_truth = true;
    else
        accuracy.recall = static_cast<double>(accuracy.matched) / static_cast<double>(accuracy.truth);
    return accuracy;
}

} // namespace

StateAccuracy state_accuracy(const StateChangeMatrix& truth, const StateChangeMatrix& found,
                             int tolerance_samples) {
    if (truth.rows() != found.rows() || truth.cols() != found.cols())
        throw ConfigError("state matrices must have identical dimensions");
    if (tolerance_samples < 0) throw ConfigError("tolerance_samples cannot be negative");

    const std::size_t devices = truth.cols();
    std::vector<std::vector<std::size_t>> truth_on(devices), truth_off(devices);
    std::vector<std::vector<std::size_t>> found_on(devices), found_off(devices);
    truth.for_each_event([&](std::size_t t, std::size_t device, int value) {
        (value == 1 ? truth_on : truth_off)[device].push_back(t);
    });
    found.for_each_event([&](std::size_t t, std::size_t device, int value) {
        (value == 1 ? found_on : found_off)[device].push_back(t);
    });

    StateAccuracy accuracy;
    accuracy.on = score_polarity(truth_on, found_on, tolerance_samples);
    accuracy.off = score_polarity(truth_off, found_off, tolerance_samples);
    return accuracy;
}

} // namespace disagg
