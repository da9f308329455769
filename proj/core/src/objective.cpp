#include "disagg/objective.hpp"

#include <cmath>
#include <string>

#include "disagg/errors.hpp"

namespace disagg {

void validate(const ObjectiveWeights& weights) {
    if (!(weights.alpha >= 0.0 && weights.alpha <= 1.0))
        throw ConfigError("objective weight alpha must lie in [0,1]");
    if (!(weights.beta >= 0.0 && weights.beta <= 1.0))
        throw ConfigError("objective weight beta must lie in [0,1]");
    if (std::abs(weights.alpha + weights.beta - 1.0) > 1e-12)
        throw ConfigError("objective weights must satisfy alpha + beta = 1");
}

Vec6 derivative(const PowerSeries& series, std::size_t t) {
    if (t + 2 > series.size())
        throw ConfigError("derivative index " + std::to_string(t) +
                          " out of range for series of length " + std::to_string(series.size()));
    const double timestep = static_cast<double>(series.granularity);
    Vec6 d = series.samples[t + 1] - series.samples[t];
    for (double& v : d) v /= timestep;
    return d;
}

double error_on_interval(std::span<const Vec6> p, std::span<const Vec6> ps,
                         std::size_t a, std::size_t b, ObjectiveWeights weights,
                         double timestep) {
    if (!(a < b))
        throw ConfigError("error interval requires a < b");
    if (b > p.size() || b > ps.size())
        throw ConfigError("error interval end " + std::to_string(b) +
                          " exceeds series lengths " + std::to_string(p.size()) + "/" +
                          std::to_string(ps.size()));

    double value_term = 0.0;
    for (std::size_t t = a; t < b; ++t) value_term += squared_norm(ps[t] - p[t]);

    double derivative_term = 0.0;
    if (b - a >= 2) {
        const double inv = 1.0 / timestep;
        for (std::size_t t = a; t + 1 < b; ++t) {
            const Vec6 dp = inv * (p[t + 1] - p[t]);
            const Vec6 dps = inv * (ps[t + 1] - ps[t]);
            derivative_term += squared_norm(dps - dp);
        }
    }
    return weights.alpha * value_term + weights.beta * derivative_term;
}

double error_on_interval(const PowerSeries& p, const PowerSeries& ps,
                         std::size_t a, std::size_t b, ObjectiveWeights weights) {
    if (p.granularity != ps.granularity)
        throw ConfigError("error interval requires equal granularity");
    return error_on_interval(std::span<const Vec6>(p.samples), std::span<const Vec6>(ps.samples),
                             a, b, weights, static_cast<double>(p.granularity));
}

} // namespace disagg
