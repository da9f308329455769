#include "disagg/reconstruct.hpp"

#include <string>

#include "disagg/errors.hpp"

namespace disagg {

void accumulate_events(std::span<Vec6> acc, const StateChangeMatrix& states,
                       std::size_t row_offset, const DeviceLibrary& library, double scale) {
    if (states.cols() != library.size())
        throw ConfigError("state matrix has " + std::to_string(states.cols()) +
                          " columns but the library holds " + std::to_string(library.size()) +
                          " profiles");
    const std::size_t horizon = acc.size();
    states.for_each_event([&](std::size_t t_local, std::size_t device, int value) {
        const std::size_t t_event = row_offset + t_local;
        if (t_event >= horizon) return;
        const DeviceProfile& profile = library.profiles[device];
        if (value == 1) {
            // Transient aligned to the event time, then the steady state.
            const std::size_t tau = profile.transient.size();
            const std::size_t transient_end = std::min(horizon, t_event + tau);
            for (std::size_t t = t_event; t < transient_end; ++t)
                acc[t] += scale * profile.transient[t - t_event];
            for (std::size_t t = transient_end; t < horizon; ++t)
                acc[t] += scale * profile.steady_state;
        } else {
            // Steady-state power removed strictly after the event time.
            for (std::size_t t = t_event + 1; t < horizon; ++t)
                acc[t] -= scale * profile.steady_state;
        }
    });
}

PowerSeries reconstruct_power(const StateChangeMatrix& states, const ReconstructionContext& ctx) {
    if (ctx.horizon == 0) throw ConfigError("reconstruction horizon must be at least one sample");
    if (states.rows() > ctx.horizon)
        throw ConfigError("state matrix has " + std::to_string(states.rows()) +
                          " rows, more than the reconstruction horizon " +
                          std::to_string(ctx.horizon));
    PowerSeries out;
    out.samples.assign(ctx.horizon, Vec6{});
    accumulate_events(out.samples, states, 0, ctx.library, 1.0);
    return out;
}

PowerSeries residual(const PowerSeries& p0, const PowerSeries& ps) {
    if (p0.size() != ps.size())
        throw ConfigError("residual requires equal lengths (" + std::to_string(p0.size()) +
                          " vs " + std::to_string(ps.size()) + ")");
    if (p0.granularity != ps.granularity)
        throw ConfigError("residual requires equal granularity");
    PowerSeries out = p0;
    for (std::size_t t = 0; t < out.size(); ++t) out.samples[t] -= ps.samples[t];
    return out;
}

} // namespace disagg
