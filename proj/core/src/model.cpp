#include "disagg/model.hpp"

#include <cmath>
#include <string>

#include "disagg/errors.hpp"

namespace disagg {

namespace {

bool all_finite(const Vec6& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

void validate(const PowerSeries& series) {
    if (series.samples.empty()) throw DataError("power series must have at least one row");
    if (series.granularity < 1) throw DataError("power series granularity must be positive");
    for (std::size_t t = 0; t < series.samples.size(); ++t) {
        if (!all_finite(series.samples[t]))
            throw DataError("power series has a non-finite value at row " + std::to_string(t));
    }
}

Vec6 profile_at(const DeviceProfile& profile, std::int64_t t) {
    if (t < 0) return Vec6{};
    if (t < profile.tau()) return profile.transient[static_cast<std::size_t>(t)];
    return profile.steady_state;
}

void validate(const DeviceLibrary& library) {
    if (library.profiles.empty()) throw DataError("device library must contain at least one profile");
    for (std::size_t i = 0; i < library.profiles.size(); ++i) {
        const DeviceProfile& p = library.profiles[i];
        if (p.id != static_cast<int>(i))
            throw DataError("device library ids must run 0..M-1 in order (profile " +
                            std::to_string(i) + " has id " + std::to_string(p.id) + ")");
        if (!all_finite(p.steady_state))
            throw DataError("profile " + std::to_string(i) + " has a non-finite steady-state value");
        for (const Vec6& row : p.transient)
            if (!all_finite(row))
                throw DataError("profile " + std::to_string(i) + " has a non-finite transient value");
    }
}

StateMatrixReport validate_state_matrix(const StateChangeMatrix& states) {
    StateMatrixReport report;
    for (std::size_t t = 0; t < states.rows(); ++t) {
        for (std::size_t i = 0; i < states.cols(); ++i) {
            const int v = states.at(t, i);
            if (v < -1 || v > 1) report.violations.push_back({t, i, v});
        }
    }
    for (std::size_t i = 0; i < states.cols(); ++i) {
        long balance = 0;
        for (std::size_t t = 0; t < states.rows(); ++t) {
            const int v = states.at(t, i);
            if (v == 1 || v == -1) balance += v;
            if (balance < 0) {
                report.unbalanced_devices.push_back(i);
                break;
            }
        }
    }
    return report;
}

} // namespace disagg
