#pragma once

#include <span>

#include "disagg/model.hpp"

namespace disagg {

struct ReconstructionContext {
    DeviceLibrary library;
    std::size_t horizon = 0; ///< samples to reconstruct
    Vec6 baseline{};         ///< always-on component handled upstream, not applied here
};

/// Adds scale times the power implied by the events of `states` into `acc`.
/// Row r of `states` corresponds to acc[row_offset + r]. A switch-on
/// contributes the full profile aligned to its event time; a switch-off
/// subtracts the steady-state power strictly after its event time.
void accumulate_events(std::span<Vec6> acc, const StateChangeMatrix& states,
                       std::size_t row_offset, const DeviceLibrary& library, double scale);

/// Power implied by a state-change matrix, length ctx.horizon. Rows of
/// `states` beyond the horizon would be inconsistent and are rejected.
/// The result may be negative; switch-offs are not constrained to follow
/// a matching switch-on.
PowerSeries reconstruct_power(const StateChangeMatrix& states, const ReconstructionContext& ctx);

/// Elementwise difference p0 - ps over all six features.
PowerSeries residual(const PowerSeries& p0, const PowerSeries& ps);

} // namespace disagg
