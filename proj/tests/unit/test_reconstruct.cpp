#include <vector>

#include "doctest.h"

#include "disagg/errors.hpp"
#include "disagg/model.hpp"
#include "disagg/reconstruct.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace disagg;
using disagg::testing::Gen;

namespace {

DeviceLibrary one_device_library() {
    DeviceProfile profile;
    profile.id = 0;
    profile.transient = {Vec6{4, 0, 0, 0, 0, 0}, Vec6{3, 0, 0, 0, 0, 0}};
    profile.steady_state = Vec6{2, 0, 0, 0, 0, 0};
    DeviceLibrary library;
    library.profiles.push_back(profile);
    return library;
}

std::vector<double> feature0(const PowerSeries& series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const Vec6& row : series.samples) out.push_back(row[0]);
    return out;
}

} // namespace

TEST_CASE("switch-on contributes the aligned profile") {
    const DeviceLibrary library = one_device_library();
    StateChangeMatrix states(10, 1);
    states.set(5, 0, 1);

    const PowerSeries out = reconstruct_power(states, {library, 10, {}});
    CHECK(feature0(out) == std::vector<double>{0, 0, 0, 0, 0, 4, 3, 2, 2, 2});
    for (const Vec6& row : out.samples)
        for (std::size_t d = 1; d < kNumFeatures; ++d) CHECK(row[d] == 0.0);
}

TEST_CASE("switch-off removes steady power strictly after the event") {
    const DeviceLibrary library = one_device_library();
    StateChangeMatrix states(10, 1);
    states.set(5, 0, 1);
    states.set(8, 0, -1);

    const PowerSeries out = reconstruct_power(states, {library, 10, {}});
    CHECK(feature0(out) == std::vector<double>{0, 0, 0, 0, 0, 4, 3, 2, 2, 0});
}

TEST_CASE("empty matrix reconstructs to silence") {
    const PowerSeries out = reconstruct_power(StateChangeMatrix(4, 1), {one_device_library(), 7, {}});
    REQUIRE(out.size() == 7);
    for (const Vec6& row : out.samples) CHECK(row == Vec6{});
}

TEST_CASE("on/off pair bounds the device's contribution") {
    Gen gen(11);
    const DeviceLibrary library = gen.library(1, 5, 1.0, 8.0);
    const auto tau = static_cast<std::size_t>(library.profiles[0].tau());
    const std::size_t on = 3;
    const std::size_t off = on + tau + 4; // switch-off after the transient settles

    StateChangeMatrix states(40, 1);
    states.set(on, 0, 1);
    states.set(off, 0, -1);
    const PowerSeries out = reconstruct_power(states, {library, 40, {}});

    for (std::size_t t = 0; t < 40; ++t) {
        if (t < on) {
            CHECK(out.row(t) == Vec6{});
        } else if (t - on < tau) {
            CHECK(out.row(t) == library.profiles[0].transient[t - on]);
        } else if (t <= off) {
            CHECK(out.row(t) == library.profiles[0].steady_state);
        } else {
            CHECK(out.row(t) == Vec6{});
        }
    }
}

TEST_CASE("unpaired switch-off goes negative without clamping") {
    const DeviceLibrary library = one_device_library();
    StateChangeMatrix states(4, 1);
    states.set(1, 0, -1);

    const PowerSeries out = reconstruct_power(states, {library, 4, {}});
    CHECK(feature0(out) == std::vector<double>{0, 0, -2, -2});
}

TEST_CASE("events on the last row still respect the strict-after rule") {
    const DeviceLibrary library = one_device_library();
    StateChangeMatrix states(6, 1);
    states.set(5, 0, 1); // transient clipped by the horizon
    PowerSeries out = reconstruct_power(states, {library, 6, {}});
    CHECK(feature0(out) == std::vector<double>{0, 0, 0, 0, 0, 4});

    states.set(5, 0, -1); // nothing strictly after the last row
    out = reconstruct_power(states, {library, 6, {}});
    CHECK(feature0(out) == std::vector<double>{0, 0, 0, 0, 0, 0});
}

TEST_CASE("dimension checks reject inconsistent inputs") {
    const DeviceLibrary library = one_device_library();
    CHECK_THROWS_AS(reconstruct_power(StateChangeMatrix(4, 2), {library, 4, {}}), ConfigError);
    CHECK_THROWS_AS(reconstruct_power(StateChangeMatrix(9, 1), {library, 4, {}}), ConfigError);
    CHECK_THROWS_AS(reconstruct_power(StateChangeMatrix(4, 1), {library, 0, {}}), ConfigError);
    // Fewer state rows than the horizon is fine: later rows just hold no events.
    CHECK_NOTHROW(reconstruct_power(StateChangeMatrix(2, 1), {library, 6, {}}));
}

TEST_CASE("matches the per-event oracle on random instances") {
    Gen gen(29);
    for (int round = 0; round < 25; ++round) {
        const auto horizon = static_cast<std::size_t>(gen.integer(1, 120));
        const auto devices = static_cast<std::size_t>(gen.integer(1, 4));
        const DeviceLibrary library = gen.library(devices, 12);
        const auto rows = static_cast<std::size_t>(gen.integer(1, static_cast<long>(horizon)));
        const auto events = static_cast<std::size_t>(
            gen.integer(0, std::min<long>(6, static_cast<long>(rows * devices))));
        const StateChangeMatrix states = gen.states(rows, devices, events);

        const PowerSeries got = reconstruct_power(states, {library, horizon, {}});
        const std::vector<Vec6> expected =
            disagg::testing::naive_reconstruct(states, library, horizon);
        REQUIRE(got.size() == expected.size());
        for (std::size_t t = 0; t < horizon; ++t) CHECK(got.row(t) == expected[t]);
    }
}

TEST_CASE("superposition over disjoint supports") {
    Gen gen(31);
    const DeviceLibrary library = gen.library(3, 6);
    StateChangeMatrix first(30, 3);
    StateChangeMatrix second(30, 3);
    StateChangeMatrix combined(30, 3);
    first.set(2, 0, 1);
    first.set(11, 2, -1);
    second.set(7, 1, 1);
    second.set(20, 0, -1);
    for (const auto* part : {&first, &second})
        part->for_each_event([&](std::size_t t, std::size_t m, int v) {
            combined.set(t, m, static_cast<std::int8_t>(v));
        });

    const PowerSeries a = reconstruct_power(first, {library, 30, {}});
    const PowerSeries b = reconstruct_power(second, {library, 30, {}});
    const PowerSeries both = reconstruct_power(combined, {library, 30, {}});
    for (std::size_t t = 0; t < 30; ++t) CHECK(both.row(t) == a.row(t) + b.row(t));
}

TEST_CASE("accumulator offsets rows and inverts cleanly") {
    Gen gen(37);
    const DeviceLibrary library = gen.library(2, 4);
    const StateChangeMatrix states = gen.states(10, 2, 4);

    SUBCASE("row offset shifts the frame within a longer buffer") {
        std::vector<Vec6> shifted(25, Vec6{});
        accumulate_events(shifted, states, 5, library, 1.0);
        const std::vector<Vec6> reference =
            disagg::testing::naive_reconstruct(states, library, 20);
        for (std::size_t t = 0; t < 5; ++t) CHECK(shifted[t] == Vec6{});
        for (std::size_t t = 0; t < 20; ++t) CHECK(shifted[5 + t] == reference[t]);
    }

    SUBCASE("adding then subtracting the same events restores silence") {
        std::vector<Vec6> acc(15, Vec6{});
        accumulate_events(acc, states, 0, library, 1.0);
        accumulate_events(acc, states, 0, library, -1.0);
        for (const Vec6& row : acc) CHECK(row == Vec6{});
    }
}

TEST_CASE("residual subtracts elementwise and round-trips") {
    Gen gen(41);
    PowerSeries p0 = gen.series(100);
    PowerSeries ps = gen.series(100);

    const PowerSeries diff = residual(p0, ps);
    for (std::size_t t = 0; t < 100; ++t) {
        CHECK(diff.row(t) == p0.row(t) - ps.row(t));
        // Lattice-valued inputs make the round trip exact.
        CHECK(diff.row(t) + ps.row(t) == p0.row(t));
    }

    PowerSeries shorter = gen.series(99);
    CHECK_THROWS_AS(residual(p0, shorter), ConfigError);
    PowerSeries coarser = ps;
    coarser.granularity = 60;
    CHECK_THROWS_AS(residual(p0, coarser), ConfigError);
}
