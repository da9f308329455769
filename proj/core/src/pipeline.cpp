#include "disagg/pipeline.hpp"

#include <algorithm>
#include <span>
#include <utility>

#include "disagg/errors.hpp"
#include "disagg/reconstruct.hpp"

namespace disagg {

namespace {

std::int64_t day_of(std::int64_t second) {
    // Floor division; second may precede the epoch of the timestamp scheme.
    std::int64_t d = second / kSecondsPerDay;
    if (second % kSecondsPerDay < 0) --d;
    return d;
}

} // namespace

std::vector<PowerSeries> split_days(const PowerSeries& series) {
    validate(series);
    const auto granularity = static_cast<std::int64_t>(series.granularity);

    std::vector<PowerSeries> days;
    std::size_t begin = 0;
    std::int64_t current_day = day_of(series.start_time);
    for (std::size_t r = 1; r <= series.size(); ++r) {
        bool boundary = r == series.size();
        if (!boundary) {
            const std::int64_t day =
                day_of(series.start_time + static_cast<std::int64_t>(r) * granularity);
            boundary = day != current_day;
            current_day = day;
        }
        if (boundary) {
            PowerSeries piece;
            piece.granularity = series.granularity;
            piece.start_time = series.start_time + static_cast<std::int64_t>(begin) * granularity;
            piece.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                 series.samples.begin() + static_cast<std::ptrdiff_t>(r));
            days.push_back(std::move(piece));
            begin = r;
        }
    }
    return days;
}

Vec6 estimate_baseline(const PowerSeries& day, int window) {
    validate(day);
    if (window < 1) throw ConfigError("baseline window must be at least one sample");
    Vec6 base = day.row(0);
    const std::size_t n = std::min(day.size(), static_cast<std::size_t>(window));
    for (std::size_t t = 1; t < n; ++t)
        for (std::size_t d = 0; d < kNumFeatures; ++d) base[d] = std::min(base[d], day.row(t)[d]);
    return base;
}

DayResult disaggregate_day(const PowerSeries& day, const DeviceLibrary& library,
                           const PsoConfig& cfg, std::mt19937_64& rng,
                           const FrameObserver& observer) {
    validate(day);
    validate(library);
    validate(cfg);

    const std::size_t total = day.size();
    DayResult result;
    result.baseline = estimate_baseline(day, cfg.baseline_window);
    result.state_changes = StateChangeMatrix(total, library.size());

    // Running residual: day minus baseline, minus the power of every event
    // committed so far. Committing a frame only ever changes samples from the
    // frame start onward, so each subtraction touches just that suffix.
    std::vector<Vec6> residual(day.samples);
    for (Vec6& row : residual) row -= result.baseline;

    const auto frame_length = static_cast<std::size_t>(cfg.frame_length);
    int frame_index = 0;
    for (std::size_t start = 0; start < total; start += frame_length, ++frame_index) {
        const std::size_t length = std::min(frame_length, total - start);

        PowerSeries frame_target;
        frame_target.granularity = day.granularity;
        frame_target.start_time =
            day.start_time + static_cast<std::int64_t>(start) * day.granularity;
        frame_target.samples.assign(
            residual.begin() + static_cast<std::ptrdiff_t>(start),
            residual.begin() + static_cast<std::ptrdiff_t>(start + length));

        FrameResult frame = optimize_frame(frame_target, library, cfg, rng);

        for (std::size_t r = 0; r < length; ++r)
            for (std::size_t c = 0; c < library.size(); ++c)
                result.state_changes.set(start + r, c, frame.best.at(r, c));

        accumulate_events(std::span<Vec6>(residual.data() + start, total - start), frame.best, 0,
                          library, -1.0);

        result.per_frame_errors.push_back(frame.best_error);
        result.frames_early_stopped.push_back(frame.early_stopped);
        result.frame_epochs.push_back(frame.epochs);

        if (observer) {
            FrameTrace trace;
            trace.index = frame_index;
            trace.start = start;
            trace.length = length;
            trace.best_error = frame.best_error;
            trace.epochs = frame.epochs;
            trace.early_stopped = frame.early_stopped;
            trace.target = std::move(frame_target);
            trace.states = std::move(frame.best);
            observer(trace);
        }
    }

    ReconstructionContext ctx{library, total, result.baseline};
    result.reconstructed = reconstruct_power(result.state_changes, ctx);
    result.reconstructed.start_time = day.start_time;
    result.reconstructed.granularity = day.granularity;
    for (Vec6& row : result.reconstructed.samples) row += result.baseline;
    return result;
}

std::mt19937_64 make_day_rng(std::uint64_t seed, std::size_t day_index) {
    const auto index = static_cast<std::uint64_t>(day_index);
    std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(index),
                           static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(sequence);
}

} // namespace disagg
