#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace disagg {

/// Three phases of active power (W) followed by three phases of reactive power (var).
inline constexpr std::size_t kNumFeatures = 6;

using Vec6 = std::array<double, kNumFeatures>;

inline Vec6& operator+=(Vec6& a, const Vec6& b) {
    for (std::size_t d = 0; d < kNumFeatures; ++d) a[d] += b[d];
    return a;
}

inline Vec6& operator-=(Vec6& a, const Vec6& b) {
    for (std::size_t d = 0; d < kNumFeatures; ++d) a[d] -= b[d];
    return a;
}

inline Vec6 operator+(Vec6 a, const Vec6& b) { return a += b; }
inline Vec6 operator-(Vec6 a, const Vec6& b) { return a -= b; }

inline Vec6 operator*(double s, Vec6 a) {
    for (double& v : a) v *= s;
    return a;
}

/// Sum of squares over all six features.
inline double squared_norm(const Vec6& a) {
    double acc = 0.0;
    for (double v : a) acc += v * v;
    return acc;
}

/// Dense six-feature power signal with one row per timestep.
struct PowerSeries {
    std::vector<Vec6> samples;
    std::int64_t start_time = 0; ///< seconds since midnight of row 0
    int granularity = 1;         ///< seconds per row

    std::size_t size() const { return samples.size(); }
    Vec6& row(std::size_t t) { return samples[t]; }
    const Vec6& row(std::size_t t) const { return samples[t]; }

    bool operator==(const PowerSeries&) const = default;
};

/// Throws DataError unless the series has at least one row and only finite values.
void validate(const PowerSeries& series);

/// One device type: a transient of tau samples followed by a constant
/// steady-state power. The transient length is the vector size, so the
/// rows-equal-tau invariant holds by construction.
struct DeviceProfile {
    int id = 0;
    std::vector<Vec6> transient;
    Vec6 steady_state{};

    std::int64_t tau() const { return static_cast<std::int64_t>(transient.size()); }
};

/// Profile value at an integer time offset from the switch-on event:
/// zero before the event, the transient on [0, tau), steady state from tau on.
Vec6 profile_at(const DeviceProfile& profile, std::int64_t t);

struct DeviceLibrary {
    std::vector<DeviceProfile> profiles;

    std::size_t size() const { return profiles.size(); }
};

/// Throws DataError unless the library is nonempty, finite, and ids run 0..M-1.
void validate(const DeviceLibrary& library);

/// T x M matrix over {-1, 0, +1}; +1 marks a switch-on, -1 a switch-off.
/// Entries are not checked on write; validate_state_matrix reports violations.
class StateChangeMatrix {
public:
    StateChangeMatrix() = default;
    StateChangeMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::int8_t at(std::size_t t, std::size_t device) const { return cells_[t * cols_ + device]; }
    void set(std::size_t t, std::size_t device, std::int8_t value) { cells_[t * cols_ + device] = value; }

    const std::vector<std::int8_t>& cells() const { return cells_; }

    /// Visits nonzero entries in row-major order as fn(t, device, value).
    template <class Fn>
    void for_each_event(Fn&& fn) const {
        for (std::size_t t = 0; t < rows_; ++t) {
            for (std::size_t i = 0; i < cols_; ++i) {
                const std::int8_t v = cells_[t * cols_ + i];
                if (v != 0) fn(t, i, static_cast<int>(v));
            }
        }
    }

    std::size_t event_count() const {
        std::size_t n = 0;
        for (std::int8_t v : cells_)
            if (v != 0) ++n;
        return n;
    }

    bool operator==(const StateChangeMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int8_t> cells_;
};

struct StateMatrixViolation {
    std::size_t t = 0;
    std::size_t device = 0;
    int value = 0;
};

struct StateMatrixReport {
    std::vector<StateMatrixViolation> violations;
    /// Devices whose running ON/OFF balance goes negative at some time.
    /// Diagnostic only: unbalanced events are a legal state.
    std::vector<std::size_t> unbalanced_devices;

    bool ok() const { return violations.empty(); }
};

StateMatrixReport validate_state_matrix(const StateChangeMatrix& states);

} // namespace disagg
