#include "oracles.hpp"
#include "test_util.hpp"

#include "memdiscern/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace memdiscern;

namespace {

double max_abs(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

}  // namespace

TEST(Simulator, ResistorIsOhmic) {
    const auto schedule = build_schedule(WaveformSpec::sine(2.0, 1.0, 1e-2));
    const auto trace = simulate(CircuitTopology::resistor(470.0), schedule, 4);
    ASSERT_EQ(trace.size(), schedule.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        EXPECT_NEAR(trace.i[k], trace.v[k] / 470.0, 1e-18);
    }
}

TEST(Simulator, FrozenMemristorIsAResistor) {
    MemristorParams m;
    m.k = 0.0;
    m.x0 = 0.37;
    const auto schedule = build_schedule(WaveformSpec::triangle(1.0, 1.0, 1e-3));
    const auto a = simulate(CircuitTopology::memristor_only(m), schedule, 4);
    const auto b = simulate(CircuitTopology::resistor(oracle::memristance(0.37, m.r_on, m.r_off)), schedule, 4);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(a.i[k], b.i[k], 1e-15);
    }
}

TEST(Simulator, StepResponses) {
    const auto res = dc_step_response(CircuitTopology::resistor(200.0), 0.5, 1.0, 0.01);
    for (double i : res.i) {
        EXPECT_DOUBLE_EQ(i, 0.5 / 200.0);
    }

    // Positive bias drives x up, so the current rises towards V / r_on.
    MemristorParams m;
    m.k = 2e4;
    m.x0 = 0.1;
    const auto mem = dc_step_response(CircuitTopology::memristor_only(m), 1.0, 2.0, 1e-3);
    for (std::size_t k = 1; k < mem.size(); ++k) {
        EXPECT_GE(mem.i[k], mem.i[k - 1]);
    }
    EXPECT_NEAR(mem.i.back(), 1.0 / m.r_on, 1e-6 / m.r_on);
}

TEST(Simulator, RcStepMatchesClosedForm) {
    const double rs = 1e3, rl = 4e3, c = 2e-6, v = 0.25;
    const auto trace = dc_step_response(CircuitTopology::leaky_capacitor(rs, rl, c), v, 0.05, 1e-4, 20);
    double worst = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double ref = oracle::rc_step_current(v, rs, rl, c, trace.t[k]);
        worst = std::max(worst, std::abs(trace.i[k] - ref));
    }
    EXPECT_LE(worst / (v / rs), 1e-6);
}

TEST(Simulator, MemristorMatchesFluxSolution) {
    MemristorParams m;
    m.k = 1e4;
    m.x0 = 0.2;
    const double amplitude = 1.0, period = 1.0;
    const auto schedule = build_schedule(WaveformSpec::sine(amplitude, period, 1e-3));
    const auto result = simulate_with_states(CircuitTopology::memristor_only(m), schedule, 10);
    // The source is piecewise linear between samples, so its flux is the
    // trapezoid sum of the sampled voltages.
    double worst = 0.0, peak = 0.0, flux = 0.0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (k > 0) {
            flux += 0.5 * (schedule.voltages[k] + schedule.voltages[k - 1]) *
                    (schedule.times[k] - schedule.times[k - 1]);
        }
        const double x = oracle::memristor_state_from_flux(m.r_on, m.r_off, m.k, m.x0, flux);
        const double i = schedule.voltages[k] / oracle::memristance(x, m.r_on, m.r_off);
        worst = std::max(worst, std::abs(result.trace.i[k] - i));
        peak = std::max(peak, std::abs(i));
        EXPECT_NEAR(result.states[k].x, x, 1e-6);
    }
    EXPECT_LE(worst / peak, 1e-6);
}

TEST(Simulator, MemristorWithCapacitorMatchesFineEuler) {
    oracle::EulerCircuit p;
    p.k = 1e4;
    p.x0 = 0.1;
    p.c = 1e-5;
    p.r_series = 100.0;
    MemristorParams m;
    m.k = p.k;
    m.x0 = p.x0;
    CircuitTopology topo = CircuitTopology::memristor_only(m);
    topo.c_parallel = p.c;
    topo.r_series = p.r_series;

    // Period on the sample grid so the interpolated source keeps the true peaks.
    const double dt = 2e-3, amplitude = 1.0, period = 0.4;
    const auto schedule = build_schedule(WaveformSpec::triangle(amplitude, period, dt));
    const auto trace = simulate(topo, schedule, 10);
    const auto euler = oracle::euler_current(
        p, [&](double t) { return oracle::triangle_wave(amplitude, period, t); }, dt, schedule.size(), 10000);
    double worst = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        worst = std::max(worst, std::abs(trace.i[k] - euler[k]));
    }
    EXPECT_LE(worst / max_abs(euler), 1e-4);
}

TEST(Simulator, GridConvergenceIsHighOrder) {
    MemristorParams m;
    m.k = 1e4;
    CircuitTopology topo = CircuitTopology::memristor_only(m);
    topo.c_parallel = 2e-5;
    topo.r_series = 200.0;
    const auto schedule = build_schedule(WaveformSpec::sine(1.0, 0.5, 5e-3));
    const auto a = simulate(topo, schedule, 1);
    const auto b = simulate(topo, schedule, 2);
    const auto c = simulate(topo, schedule, 4);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        d1 = std::max(d1, std::abs(a.i[k] - b.i[k]));
        d2 = std::max(d2, std::abs(b.i[k] - c.i[k]));
    }
    ASSERT_GT(d2, 0.0);
    EXPECT_GE(std::log2(d1 / d2), 3.5);
}

TEST(Simulator, CapacitorChargeReturnsOverClosedCycle) {
    CircuitTopology topo;
    topo.c_parallel = 1e-6;
    const auto schedule = build_schedule(WaveformSpec::sine(1.0, 1.0, 1e-3));
    const auto trace = simulate(topo, schedule, 4);
    double q = 0.0;
    for (std::size_t k = 1; k < trace.size(); ++k) {
        q += 0.5 * (trace.i[k] + trace.i[k - 1]) * (trace.t[k] - trace.t[k - 1]);
    }
    EXPECT_LE(std::abs(q), 1e-6 * topo.c_parallel * 1.0);
}

TEST(Simulator, StateStaysInUnitInterval) {
    MemristorParams m;
    m.k = 1e6;
    m.x0 = 0.5;
    for (auto w : {WindowKind::None, WindowKind::PolynomialJoglekarStyle, WindowKind::BoundaryBiolekStyle}) {
        m.window_kind = w;
        const auto r = simulate_with_states(CircuitTopology::memristor_only(m),
                                            build_schedule(WaveformSpec::sine(3.0, 1.0, 1e-3, 2.0)), 10);
        for (const auto& s : r.states) {
            EXPECT_GE(s.x, 0.0);
            EXPECT_LE(s.x, 1.0);
        }
    }
}

TEST(Simulator, MemristorLoopIsPinched) {
    const auto trace = simulate(CircuitTopology::memristor_only({}),
                                build_schedule(WaveformSpec::sine(1.0, 1.0, 1e-3, 2.0)), 10);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (std::abs(trace.v[k]) < 1e-15) {
            EXPECT_LT(std::abs(trace.i[k]), 1e-12);
        }
    }
}

TEST(Simulator, StepOntoBareCapacitorIsIllPosed) {
    CircuitTopology topo;
    topo.c_parallel = 1e-6;
    topo.r_leak = 1e3;
    EXPECT_ERROR_KIND(simulate(topo, build_schedule(WaveformSpec::step(1.0, 0.1, 1.0)), 10),
                      ErrorKind::IllPosedImpulse);
    topo.r_series = 100.0;
    topo.c_parallel = 1e-3;
    EXPECT_NO_THROW(simulate(topo, build_schedule(WaveformSpec::step(1.0, 0.1, 1.0)), 10));
}

TEST(Simulator, RejectsBadInputs) {
    const auto schedule = build_schedule(WaveformSpec::sine(1.0, 1.0, 0.01));
    EXPECT_ERROR_KIND(simulate(CircuitTopology::resistor(10.0), schedule, 0), ErrorKind::Validation);
    EXPECT_ERROR_KIND(simulate(CircuitTopology::resistor(10.0), SampleSchedule{}, 4), ErrorKind::Validation);
    EXPECT_ERROR_KIND(simulate(CircuitTopology{}, schedule, 4), ErrorKind::Validation);
}

TEST(Simulator, Deterministic) {
    CircuitTopology topo = CircuitTopology::memristor_only({});
    topo.c_parallel = 1e-6;
    topo.r_series = 50.0;
    const auto schedule = build_schedule(WaveformSpec::stepped_triangle(-1.0, 1.0, 0.25, 6, 1e-3));
    const auto a = simulate(topo, schedule, 8);
    const auto b = simulate(topo, schedule, 8);
    EXPECT_EQ(a.i, b.i);
    EXPECT_EQ(a.dwell_index, schedule.dwell_index);
    EXPECT_EQ(a.level_index, schedule.level_index);
    EXPECT_EQ(a.meta.source, TraceSource::Simulated);
}

TEST(Simulator, NoiseIsSeeded) {
    const auto base = simulate(CircuitTopology::resistor(1e3), build_schedule(WaveformSpec::sine(1.0, 1.0, 1e-2)), 1);
    auto a = base, b = base, c = base, quiet = base;
    add_current_noise(a, 0.01, 1e-9, 7);
    add_current_noise(b, 0.01, 1e-9, 7);
    add_current_noise(c, 0.01, 1e-9, 8);
    add_current_noise(quiet, 0.0, 0.0, 7);
    EXPECT_EQ(a.i, b.i);
    EXPECT_NE(a.i, c.i);
    EXPECT_EQ(quiet.i, base.i);
}

TEST(Simulator, ReplayedScheduleReproducesTrace) {
    CircuitTopology topo = CircuitTopology::memristor_only({});
    topo.c_parallel = 1e-6;
    topo.r_series = 50.0;
    const auto schedule = build_schedule(WaveformSpec::stepped_triangle(-1.0, 1.0, 0.5, 4, 1e-3));
    const auto trace = simulate(topo, schedule, 8);
    const auto replay = schedule_from_trace(trace);
    EXPECT_EQ(replay.interpolation, Interpolation::Hold);
    EXPECT_EQ(simulate(topo, replay, 8).i, trace.i);
}
