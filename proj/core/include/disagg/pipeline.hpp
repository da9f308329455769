#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "disagg/model.hpp"
#include "disagg/pso.hpp"

namespace disagg {

inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Everything one frame's optimization produced, reported as it finishes.
/// `target` is the residual the frame optimized against, i.e. the day minus
/// baseline minus the power of everything earlier frames committed.
struct FrameTrace {
    int index = 0;
    std::size_t start = 0;  ///< first row of the frame within the day
    std::size_t length = 0; ///< rows in the frame (last frame may be short)
    double best_error = 0.0;
    int epochs = 0;
    bool early_stopped = false;
    PowerSeries target;
    StateChangeMatrix states; ///< the frame's rows of the day matrix
};

using FrameObserver = std::function<void(const FrameTrace&)>;

struct DayResult {
    StateChangeMatrix state_changes;
    PowerSeries reconstructed; ///< reconstruct_power(state_changes) + baseline
    Vec6 baseline{};
    std::vector<double> per_frame_errors;
    std::vector<bool> frames_early_stopped;
    std::vector<int> frame_epochs;
};

/// Splits a series at midnight boundaries; partial leading/trailing days come
/// out as shorter series. start_time of each piece is carried over so
/// repeated splitting is a no-op.
std::vector<PowerSeries> split_days(const PowerSeries& series);

/// Always-on component: per-feature minimum over the first `window` samples.
/// The default window of one sample makes this the day's first row.
Vec6 estimate_baseline(const PowerSeries& day, int window);

/// Disaggregates one day: subtracts the baseline, walks consecutive frames of
/// cfg.frame_length rows, optimizes each against the running residual, and
/// commits the winning state changes before moving on. Earlier frames' rows
/// are never touched again; their power (transient tails included) stays
/// subtracted from every later frame's target.
DayResult disaggregate_day(const PowerSeries& day, const DeviceLibrary& library,
                           const PsoConfig& cfg, std::mt19937_64& rng,
                           const FrameObserver& observer = {});

/// Independent generator per day so days can run concurrently yet reproduce
/// the sequential run bit for bit.
std::mt19937_64 make_day_rng(std::uint64_t seed, std::size_t day_index);

} // namespace disagg
