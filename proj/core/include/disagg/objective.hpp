#pragma once

#include <span>

#include "disagg/model.hpp"

namespace disagg {

/// Relative weight of the value deviation (alpha) against the derivative
/// deviation (beta); alpha + beta must equal one.
struct ObjectiveWeights {
    double alpha = 0.9;
    double beta = 0.1;
};

/// Throws ConfigError unless both weights lie in [0,1] and sum to 1 within 1e-12.
void validate(const ObjectiveWeights& weights);

/// Forward difference (P(t+1) - P(t)) / timestep; valid for 0 <= t <= size-2.
Vec6 derivative(const PowerSeries& series, std::size_t t);

/// Squared deviation between a measured and a reconstructed signal on [a, b):
///   alpha * sum_{t=a}^{b-1} |ps(t) - p(t)|^2
/// + beta  * sum_{t=a}^{b-2} |dps(t) - dp(t)|^2
/// where |.|^2 sums squares over all six features and derivatives are forward
/// differences divided by the timestep. The derivative sum stays strictly
/// inside the interval and never reads past b-1.
double error_on_interval(std::span<const Vec6> p, std::span<const Vec6> ps,
                         std::size_t a, std::size_t b, ObjectiveWeights weights,
                         double timestep = 1.0);

double error_on_interval(const PowerSeries& p, const PowerSeries& ps,
                         std::size_t a, std::size_t b, ObjectiveWeights weights);

} // namespace disagg
