#pragma once

#include "memdiscern/circuit_models.hpp"
#include "memdiscern/trace.hpp"
#include "memdiscern/waveform.hpp"

#include <cstdint>
#include <vector>

namespace memdiscern {

struct SimState {
    double x = 0.0;       // memristor state, [0, 1]
    double v_node = 0.0;  // volts across the parallel group
};

struct SimulationResult {
    Trace trace;
    std::vector<SimState> states;  // one per schedule sample
};

// Fixed-step RK4 with `substeps` internal steps per sample interval. The
// source is taken to sit at 0 V before the first sample and the capacitor
// starts discharged.
//
// Errors: ErrorKind::Validation for bad inputs, ErrorKind::IllPosedImpulse
// when an ideal voltage jump lands directly on a capacitor (r_series == 0),
// DivergenceError when the state stops being finite.
SimulationResult simulate_with_states(const CircuitTopology& topology,
                                      const SampleSchedule& schedule, int substeps);

Trace simulate(const CircuitTopology& topology, const SampleSchedule& schedule, int substeps);

Trace dc_step_response(const CircuitTopology& topology, double v_bias, double duration, double dt,
                       int substeps = 20);

// Schedule that replays the (t, V) columns of a trace. Stepped traces replay
// as Hold, everything else as Linear unless overridden.
SampleSchedule schedule_from_trace(const Trace& trace);
SampleSchedule schedule_from_trace(const Trace& trace, Interpolation interpolation);

// Adds zero-mean Gaussian current noise with per-sample standard deviation
// relative * |i_k| + absolute. Deterministic for a given seed.
void add_current_noise(Trace& trace, double relative, double absolute, std::uint64_t seed);

}  // namespace memdiscern
