#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "disagg/model.hpp"

namespace disagg {

/// Power-domain comparison of a measured and a reconstructed scalar series.
/// Ratio metrics whose denominator can vanish are optional: absent means
/// undefined for this input, with the cause disclosed where applicable
/// (mape_skipped_samples counts measured samples that were exactly zero).
struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;
    std::size_t mape_skipped_samples = 0;
    std::optional<double> energy_error;        ///< |sum measured - sum reconstructed| / sum measured
    std::optional<double> energy_error_signed; ///< (sum measured - sum reconstructed) / sum measured
    std::optional<double> rmse_over_mean_power;
    std::size_t samples = 0;
};

/// Distribution of one device's switch-on events over fixed time windows,
/// normalized by that device's busiest window.
struct OnEventHistogram {
    int device_id = 0;
    int window_minutes = 30;
    std::vector<std::size_t> counts;
    std::vector<double> normalized; ///< counts / max(counts), all zero when no events
};

/// Sum of the three active-power features per sample.
std::vector<double> total_active(const PowerSeries& series);

/// Metrics over two equal-length scalar series (at least one sample).
MetricsReport compute_metrics(std::span<const double> measured,
                              std::span<const double> reconstructed);

/// Counts the +1 entries of one device column per window of window_minutes,
/// with `granularity` seconds per matrix row. Windows partition the matrix;
/// the trailing window may cover fewer rows.
OnEventHistogram on_event_histogram(const StateChangeMatrix& states, std::size_t device,
                                    int window_minutes = 30, int granularity = 1);

} // namespace disagg
