#include "disagg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "disagg/errors.hpp"

namespace disagg {

std::vector<double> total_active(const PowerSeries& series) {
    validate(series);
    std::vector<double> total(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        const Vec6& row = series.row(t);
        total[t] = row[0] + row[1] + row[2];
    }
    return total;
}

MetricsReport compute_metrics(std::span<const double> measured,
                              std::span<const double> reconstructed) {
    if (measured.empty()) throw ConfigError("metrics require at least one sample");
    if (measured.size() != reconstructed.size())
        throw ConfigError("metrics require equal lengths (" + std::to_string(measured.size()) +
                          " vs " + std::to_string(reconstructed.size()) + ")");

    MetricsReport report;
    report.samples = measured.size();

    double sum_sq = 0.0;
    double sum_abs = 0.0;
    double sum_ape = 0.0;
    double sum_measured = 0.0;
    double sum_reconstructed = 0.0;
    for (std::size_t t = 0; t < measured.size(); ++t) {
        const double diff = measured[t] - reconstructed[t];
        sum_sq += diff * diff;
        sum_abs += std::abs(diff);
        sum_measured += measured[t];
        sum_reconstructed += reconstructed[t];
        if (measured[t] == 0.0)
            ++report.mape_skipped_samples;
        else
            sum_ape += std::abs(diff) / std::abs(measured[t]);
    }

    const auto count = static_cast<double>(measured.size());
    report.rmse = std::sqrt(sum_sq / count);
    report.mae = sum_abs / count;

    const std::size_t kept = measured.size() - report.mape_skipped_samples;
    if (kept > 0) report.mape = sum_ape / static_cast<double>(kept);

    if (sum_measured != 0.0) {
        const double deviation = (sum_measured - sum_reconstructed) / sum_measured;
        report.energy_error_signed = deviation;
        report.energy_error = std::abs(sum_measured - sum_reconstructed) / sum_measured;
        report.rmse_over_mean_power = report.rmse / (sum_measured / count);
    }
    return report;
}

OnEventHistogram on_event_histogram(const StateChangeMatrix& states, std::size_t device,
                                    int window_minutes, int granularity) {
    if (device >= states.cols())
        throw ConfigError("device " + std::to_string(device) + " out of range for " +
                          std::to_string(states.cols()) + " columns");
    if (window_minutes < 1) throw ConfigError("window_minutes must be positive");
    if (granularity < 1) throw ConfigError("granularity must be positive");

    OnEventHistogram histogram;
    histogram.device_id = static_cast<int>(device);
    histogram.window_minutes = window_minutes;

    const auto window_seconds = static_cast<std::int64_t>(window_minutes) * 60;
    if (states.rows() > 0) {
        const std::int64_t last_second =
            static_cast<std::int64_t>(states.rows() - 1) * granularity;
        histogram.counts.assign(static_cast<std::size_t>(last_second / window_seconds) + 1, 0);
        for (std::size_t t = 0; t < states.rows(); ++t)
            if (states.at(t, device) == 1) {
                const auto window = static_cast<std::size_t>(
                    static_cast<std::int64_t>(t) * granularity / window_seconds);
                ++histogram.counts[window];
            }
    }

    histogram.normalized.assign(histogram.counts.size(), 0.0);
    const auto max_it = std::max_element(histogram.counts.begin(), histogram.counts.end());
    if (max_it != histogram.counts.end() && *max_it > 0) {
        const auto max_count = static_cast<double>(*max_it);
        for (std::size_t w = 0; w < histogram.counts.size(); ++w)
            histogram.normalized[w] = static_cast<double>(histogram.counts[w]) / max_count;
    }
    return histogram;
}

} // namespace disagg
