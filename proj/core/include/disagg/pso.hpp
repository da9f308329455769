#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "disagg/model.hpp"
#include "disagg/objective.hpp"

namespace disagg {

/// Linear ramp between two values over the iterations of one epoch.
struct Schedule {
    double start = 0.0;
    double end = 0.0;
};

/// Schedule value at iteration i of total; exact at both endpoints.
inline double schedule_at(Schedule s, int i, int total) {
    return std::lerp(s.start, s.end, static_cast<double>(i) / static_cast<double>(total));
}

struct PsoConfig {
    int num_particles = 10;
    int max_epochs = 50;
    int iterations_per_epoch = 30;
    int min_epochs = 5;   ///< epochs that must run before early stopping may trigger
    int stall_epochs = 3; ///< epochs without a better global best that end a frame
    double event_init_fraction = 0.02; ///< share of position entries overwritten per (re)initialization
    double event_threshold = 0.6;      ///< |entry| above this discretizes to an event
    double inertia = 0.0;
    Schedule cognitive{1.0, 0.1};    ///< pull toward the particle's own best
    Schedule social{0.0002, 0.02};   ///< pull toward the global best
    ObjectiveWeights weights{};
    int frame_length = 60;
    int baseline_window = 1; ///< samples minimized over for the always-on estimate
    std::uint64_t rng_seed = 1;
};

/// Throws ConfigError on out-of-domain values.
void validate(const PsoConfig& cfg);

struct MovementConstants {
    double cognitive = 0.0;
    double social = 0.0;
};

/// Movement constants at iteration i of total: the cognitive weight falls
/// while the social weight rises, trading exploration for convergence.
inline MovementConstants constants_at(int i, int total, const PsoConfig& cfg) {
    return {schedule_at(cfg.cognitive, i, total), schedule_at(cfg.social, i, total)};
}

/// Dense row-major real matrix used for particle positions and velocities.
struct RealMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    RealMatrix() = default;
    RealMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    bool operator==(const RealMatrix&) const = default;
};

/// Thresholds a position matrix into state changes: +1 above event_threshold,
/// -1 below -event_threshold, 0 otherwise (strict comparisons, so entries at
/// exactly the threshold stay 0).
StateChangeMatrix discretize(const RealMatrix& position, double event_threshold);

/// Velocity update. r1 and r2 are drawn from u01 per entry in row-major
/// order, r1 before r2; that order is part of the determinism contract.
template <class Uniform01>
void update_velocity(RealMatrix& velocity, const RealMatrix& position,
                     const RealMatrix& best_position, const RealMatrix& global_best,
                     double inertia, double cognitive, double social, Uniform01&& u01) {
    for (std::size_t k = 0; k < velocity.values.size(); ++k) {
        const double r1 = u01();
        const double r2 = u01();
        velocity.values[k] = inertia * velocity.values[k] +
                             cognitive * r1 * (best_position.values[k] - position.values[k]) +
                             social * r2 * (global_best.values[k] - position.values[k]);
    }
}

/// Position update x <- x + v; unconstrained, no clipping or projection.
inline void update_position(RealMatrix& position, const RealMatrix& velocity) {
    for (std::size_t k = 0; k < position.values.size(); ++k)
        position.values[k] += velocity.values[k];
}

struct ParticleState {
    RealMatrix position;
    RealMatrix velocity;
    RealMatrix best_position;
    double best_error = 0.0;
};

struct SwarmState {
    std::vector<ParticleState> particles;
    RealMatrix best_position;
    double best_error = 0.0;
    int iteration = 0;
    int epoch = 0;
};

/// Fitness of a candidate; only defined on the discretized position.
using StateFitness = std::function<double(const StateChangeMatrix&)>;

/// Number of position entries overwritten per particle initialization:
/// the configured fraction rounded to the nearest integer, at least one.
std::size_t init_event_count(std::size_t rows, std::size_t cols, double fraction);

/// Seeds a swarm around seed_position: each particle copies the seed and
/// overwrites a random subset of entries with +1 or -1 (equal probability),
/// velocities start at zero, personal bests come from the initial fitness.
/// Reused between epochs with the current global best as seed (shaking).
SwarmState initialize_swarm(const RealMatrix& seed_position, const PsoConfig& cfg,
                            std::mt19937_64& rng, const StateFitness& fitness);

struct FrameResult {
    StateChangeMatrix best;    ///< discretized global best
    RealMatrix best_position;  ///< real-valued global best
    double best_error = 0.0;
    int epochs = 0;
    bool early_stopped = false;
    /// Global best after each epoch; entry 0 is the error of the seed matrix.
    std::vector<double> epoch_errors;
    /// Global best after every iteration of every epoch, in order.
    std::vector<double> iteration_errors;
};

/// Runs the adapted swarm over rows x cols state-change candidates against an
/// arbitrary fitness. Each epoch reinitializes the particles around the
/// incumbent global best, then runs iterations_per_epoch iterations of
/// velocity/position updates with the scheduled movement constants. The
/// global best is consolidated once per iteration after all particles are
/// evaluated, first-encountered winning ties, so a parallel evaluation of the
/// particles would produce the identical record. A frame stops early once
/// more than min_epochs epochs ran and the global best error is exactly
/// unchanged over the last stall_epochs epochs.
FrameResult optimize_states(std::size_t rows, std::size_t cols, const StateFitness& fitness,
                            const PsoConfig& cfg, std::mt19937_64& rng);

/// Disaggregates one frame: candidates are (frame length x M) state-change
/// matrices, fitness is the interval error between frame_target (the residual
/// power for this frame) and the power reconstructed from the candidate.
FrameResult optimize_frame(const PowerSeries& frame_target, const DeviceLibrary& library,
                           const PsoConfig& cfg, std::mt19937_64& rng);

} // namespace disagg
