#include "disagg/pso.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <string>

#include "disagg/errors.hpp"
#include "disagg/reconstruct.hpp"

namespace disagg {

namespace {

void discretize_into(StateChangeMatrix& out, const RealMatrix& position, double threshold) {
    for (std::size_t r = 0; r < position.rows; ++r) {
        for (std::size_t c = 0; c < position.cols; ++c) {
            const double v = position.at(r, c);
            std::int8_t s = 0;
            if (v > threshold)
                s = 1;
            else if (v < -threshold)
                s = -1;
            out.set(r, c, s);
        }
    }
}

} // namespace

void validate(const PsoConfig& cfg) {
    if (cfg.num_particles < 1) throw ConfigError("num_particles must be positive");
    if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be positive");
    if (cfg.iterations_per_epoch < 1) throw ConfigError("iterations_per_epoch must be positive");
    if (cfg.min_epochs < 1) throw ConfigError("min_epochs must be positive");
    if (cfg.stall_epochs < 1) throw ConfigError("stall_epochs must be positive");
    if (!(cfg.event_init_fraction > 0.0 && cfg.event_init_fraction < 1.0))
        throw ConfigError("event_init_fraction must lie in (0,1)");
    if (!(cfg.event_threshold > 0.0 && cfg.event_threshold < 1.0))
        throw ConfigError("event_threshold must lie in (0,1)");
    if (cfg.frame_length < 1) throw ConfigError("frame_length must be positive");
    if (cfg.baseline_window < 1) throw ConfigError("baseline_window must be positive");
    if (!std::isfinite(cfg.inertia)) throw ConfigError("inertia must be finite");
    for (const Schedule& s : {cfg.cognitive, cfg.social})
        if (!std::isfinite(s.start) || !std::isfinite(s.end))
            throw ConfigError("movement-constant schedules must be finite");
    validate(cfg.weights);
}

StateChangeMatrix discretize(const RealMatrix& position, double event_threshold) {
    StateChangeMatrix out(position.rows, position.cols);
    discretize_into(out, position, event_threshold);
    return out;
}

std::size_t init_event_count(std::size_t rows, std::size_t cols, double fraction) {
    const double cells = static_cast<double>(rows) * static_cast<double>(cols);
    const auto count = static_cast<std::size_t>(std::llround(cells * fraction));
    return std::max<std::size_t>(1, count);
}

SwarmState initialize_swarm(const RealMatrix& seed_position, const PsoConfig& cfg,
                            std::mt19937_64& rng, const StateFitness& fitness) {
    const std::size_t cells = seed_position.values.size();
    if (cells == 0) throw ConfigError("cannot initialize a swarm over an empty position matrix");
    const std::size_t events = std::min(cells, init_event_count(seed_position.rows, seed_position.cols,
                                                                cfg.event_init_fraction));

    SwarmState swarm;
    swarm.particles.resize(static_cast<std::size_t>(cfg.num_particles));
    swarm.best_error = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> indices(cells);
    StateChangeMatrix scratch(seed_position.rows, seed_position.cols);
    std::uniform_int_distribution<int> sign(0, 1);

    for (ParticleState& particle : swarm.particles) {
        particle.position = seed_position;
        particle.velocity = RealMatrix(seed_position.rows, seed_position.cols);

        // Partial Fisher-Yates: the first `events` slots end up holding a
        // uniformly random subset of distinct cell indices.
        std::iota(indices.begin(), indices.end(), std::size_t{0});
        for (std::size_t j = 0; j < events; ++j) {
            std::uniform_int_distribution<std::size_t> pick(j, cells - 1);
            std::swap(indices[j], indices[pick(rng)]);
            particle.position.values[indices[j]] = sign(rng) == 0 ? 1.0 : -1.0;
        }

        discretize_into(scratch, particle.position, cfg.event_threshold);
        particle.best_error = fitness(scratch);
        particle.best_position = particle.position;

        if (particle.best_error < swarm.best_error) {
            swarm.best_error = particle.best_error;
            swarm.best_position = particle.best_position;
        }
    }
    return swarm;
}

FrameResult optimize_states(std::size_t rows, std::size_t cols, const StateFitness& fitness,
                            const PsoConfig& cfg, std::mt19937_64& rng) {
    validate(cfg);
    if (rows == 0 || cols == 0) throw ConfigError("state space must have at least one row and column");

    FrameResult result;
    StateChangeMatrix scratch(rows, cols);

    // The all-zero matrix is the incumbent a frame starts from; its error
    // seeds the early-stopping record.
    RealMatrix incumbent(rows, cols);
    discretize_into(scratch, incumbent, cfg.event_threshold);
    double incumbent_error = fitness(scratch);
    result.epoch_errors.push_back(incumbent_error);

    auto u01 = [&rng] { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        // Shaking: fresh particles around the incumbent with new random events.
        SwarmState swarm = initialize_swarm(incumbent, cfg, rng, fitness);
        swarm.epoch = epoch;
        if (swarm.best_error < incumbent_error) {
            incumbent_error = swarm.best_error;
            incumbent = swarm.best_position;
        }

        for (int i = 0; i < cfg.iterations_per_epoch; ++i) {
            const MovementConstants mc = constants_at(i, cfg.iterations_per_epoch, cfg);

            for (ParticleState& particle : swarm.particles) {
                update_velocity(particle.velocity, particle.position, particle.best_position,
                                incumbent, cfg.inertia, mc.cognitive, mc.social, u01);
                update_position(particle.position, particle.velocity);
            }

            // Evaluate all particles, then consolidate the global best once;
            // first-encountered wins ties.
            double iteration_best = std::numeric_limits<double>::infinity();
            const ParticleState* iteration_winner = nullptr;
            for (ParticleState& particle : swarm.particles) {
                discretize_into(scratch, particle.position, cfg.event_threshold);
                const double error = fitness(scratch);
                if (error < particle.best_error) {
                    particle.best_error = error;
                    particle.best_position = particle.position;
                }
                if (error < iteration_best) {
                    iteration_best = error;
                    iteration_winner = &particle;
                }
            }
            if (iteration_best < incumbent_error) {
                incumbent_error = iteration_best;
                incumbent = iteration_winner->position;
            }
            swarm.iteration = i + 1;
            result.iteration_errors.push_back(incumbent_error);
        }

        result.epoch_errors.push_back(incumbent_error);
        result.epochs = epoch;

        // The record is non-increasing, so equality with the value
        // stall_epochs back means no improvement over that whole window.
        if (epoch > cfg.min_epochs && epoch >= cfg.stall_epochs &&
            result.epoch_errors[static_cast<std::size_t>(epoch)] ==
                result.epoch_errors[static_cast<std::size_t>(epoch - cfg.stall_epochs)]) {
            result.early_stopped = true;
            break;
        }
    }

    result.best_position = incumbent;
    result.best = discretize(incumbent, cfg.event_threshold);
    result.best_error = incumbent_error;
    return result;
}

FrameResult optimize_frame(const PowerSeries& frame_target, const DeviceLibrary& library,
                           const PsoConfig& cfg, std::mt19937_64& rng) {
    validate(frame_target);
    validate(library);
    const std::size_t window = frame_target.size();
    const double timestep = static_cast<double>(frame_target.granularity);

    std::vector<Vec6> reconstructed(window);
    const StateFitness fitness = [&](const StateChangeMatrix& states) {
        std::fill(reconstructed.begin(), reconstructed.end(), Vec6{});
        accumulate_events(reconstructed, states, 0, library, 1.0);
        return error_on_interval(std::span<const Vec6>(frame_target.samples),
                                 std::span<const Vec6>(reconstructed), 0, window, cfg.weights,
                                 timestep);
    };
    return optimize_states(window, library.size(), fitness, cfg, rng);
}

} // namespace disagg
