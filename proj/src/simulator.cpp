#include "memdiscern/simulator.hpp"

#include "memdiscern/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

namespace memdiscern {
namespace {

// How v_node is determined.
//  Dynamic:   capacitor behind a series resistance, v_node is an ODE state.
//  Tied:      no series resistance, v_node equals the applied voltage.
//  Algebraic: series resistance but no capacitor; resistive divider.
enum class NodeMode { Dynamic, Tied, Algebraic };

struct Circuit {
    const CircuitTopology& topo;
    NodeMode mode;
    double g_series = 0.0;
    double g_leak = 0.0;
    bool drifts = false;

    explicit Circuit(const CircuitTopology& t) : topo(t) {
        if (t.r_series == 0.0) {
            mode = NodeMode::Tied;
        } else if (t.c_parallel > 0.0) {
            mode = NodeMode::Dynamic;
        } else {
            mode = NodeMode::Algebraic;
        }
        g_series = t.r_series > 0.0 ? 1.0 / t.r_series : 0.0;
        g_leak = t.r_leak ? 1.0 / *t.r_leak : 0.0;
        drifts = t.memristor && t.memristor->k != 0.0;
    }

    double g_main(double x) const {
        if (topo.memristor) {
            return 1.0 / memristance(x, *topo.memristor);
        }
        if (topo.fixed_resistor) {
            return 1.0 / *topo.fixed_resistor;
        }
        return 0.0;
    }

    // v_node for the non-dynamic modes.
    double node_voltage(double v_applied, double x, double v_state) const {
        switch (mode) {
            case NodeMode::Dynamic:
                return v_state;
            case NodeMode::Tied:
                return v_applied;
            case NodeMode::Algebraic:
                // Main branch is linear in v at fixed x, so the divider is exact.
                return v_applied * g_series / (g_series + g_main(x) + g_leak);
        }
        return v_state;
    }
};

double clamp_state(double x) { return std::clamp(x, 0.0, 1.0); }

struct Derivative {
    double dx = 0.0;
    double dv = 0.0;
};

class Integrator {
public:
    Integrator(const Circuit& c, const SampleSchedule& s) : c_(c), s_(s) {}

    double applied(std::size_t k, double t) const {
        // Interval (t_k, t_{k+1}].
        if (s_.interpolation == Interpolation::Hold) {
            return s_.voltages[k + 1];
        }
        const double frac = (t - s_.times[k]) / (s_.times[k + 1] - s_.times[k]);
        return s_.voltages[k] + (s_.voltages[k + 1] - s_.voltages[k]) * frac;
    }

    Derivative rates(std::size_t k, double t, const SimState& y) const {
        const double v_app = applied(k, t);
        const double x = clamp_state(y.x);
        const double v_node = c_.node_voltage(v_app, x, y.v_node);
        const double i_main = v_node * c_.g_main(x);
        Derivative d;
        if (c_.drifts) {
            d.dx = state_rate(x, i_main, *c_.topo.memristor);
        }
        if (c_.mode == NodeMode::Dynamic) {
            d.dv = ((v_app - v_node) * c_.g_series - i_main - v_node * c_.g_leak) / c_.topo.c_parallel;
        }
        return d;
    }

    SimState step(std::size_t k, double t, double h, const SimState& y) const {
        auto shifted = [](const SimState& base, const Derivative& d, double scale) {
            return SimState{base.x + scale * d.dx, base.v_node + scale * d.dv};
        };
        const Derivative k1 = rates(k, t, y);
        const Derivative k2 = rates(k, t + 0.5 * h, shifted(y, k1, 0.5 * h));
        const Derivative k3 = rates(k, t + 0.5 * h, shifted(y, k2, 0.5 * h));
        const Derivative k4 = rates(k, t + h, shifted(y, k3, h));
        SimState out;
        out.x = clamp_state(y.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx));
        out.v_node = y.v_node + h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        return out;
    }

private:
    const Circuit& c_;
    const SampleSchedule& s_;
};

double segment_slope(const SampleSchedule& s, std::size_t k) {
    if (s.size() < 2 || s.interpolation == Interpolation::Hold) {
        return 0.0;
    }
    const std::size_t a = k == 0 ? 0 : k - 1;
    return (s.voltages[a + 1] - s.voltages[a]) / (s.times[a + 1] - s.times[a]);
}

void check_impulse(const Circuit& c, const SampleSchedule& s) {
    if (c.mode != NodeMode::Tied || c.topo.c_parallel == 0.0 || s.size() == 0) {
        return;
    }
    auto impulse = [](double at) {
        std::ostringstream os;
        os << "ideal voltage step across c_parallel with r_series = 0 at t = " << at
           << " s (infinite charging current)";
        fail(ErrorKind::IllPosedImpulse, os.str());
    };
    if (s.voltages[0] != 0.0) {
        impulse(s.times[0]);
    }
    if (s.interpolation == Interpolation::Hold) {
        for (std::size_t k = 1; k < s.size(); ++k) {
            if (s.voltages[k] != s.voltages[k - 1]) {
                impulse(s.times[k - 1]);
            }
        }
    }
}

double total_current(const Circuit& c, const SampleSchedule& s, std::size_t k, const SimState& y) {
    const double v_app = s.voltages[k];
    const double v_node = c.node_voltage(v_app, y.x, y.v_node);
    if (c.mode == NodeMode::Tied) {
        return v_node * (c.g_main(y.x) + c.g_leak) + c.topo.c_parallel * segment_slope(s, k);
    }
    return (v_app - v_node) * c.g_series;
}

[[noreturn]] void diverged(double t) {
    std::ostringstream os;
    os << "simulation diverged at t = " << t << " s";
    throw DivergenceError(t, os.str());
}

}  // namespace

SimulationResult simulate_with_states(const CircuitTopology& topology,
                                      const SampleSchedule& schedule, int substeps) {
    if (substeps < 1) {
        fail(ErrorKind::Validation, "substeps must be at least 1");
    }
    validate(topology);
    validate(schedule);
    if (schedule.size() == 0) {
        fail(ErrorKind::Validation, "schedule is empty");
    }

    const Circuit circuit(topology);
    check_impulse(circuit, schedule);
    const Integrator integrator(circuit, schedule);

    const std::size_t n = schedule.size();
    SimulationResult result;
    Trace& trace = result.trace;
    trace.t = schedule.times;
    trace.v = schedule.voltages;
    trace.i.resize(n);
    trace.level_index = schedule.level_index;
    trace.dwell_index = schedule.dwell_index;
    trace.meta.source = TraceSource::Simulated;
    trace.meta.topology = topology;
    result.states.resize(n);

    SimState y{topology.memristor ? topology.memristor->x0 : 0.0, 0.0};
    for (std::size_t k = 0;; ++k) {
        result.states[k] = {y.x, circuit.node_voltage(schedule.voltages[k], y.x, y.v_node)};
        trace.i[k] = total_current(circuit, schedule, k, y);
        if (!std::isfinite(trace.i[k])) {
            diverged(schedule.times[k]);
        }
        if (k + 1 == n) {
            break;
        }
        const double t0 = schedule.times[k];
        const double h = (schedule.times[k + 1] - t0) / substeps;
        for (int j = 0; j < substeps; ++j) {
            const double t = t0 + j * h;
            y = integrator.step(k, t, h, y);
            if (!std::isfinite(y.x) || !std::isfinite(y.v_node)) {
                diverged(t + h);
            }
        }
    }
    return result;
}

Trace simulate(const CircuitTopology& topology, const SampleSchedule& schedule, int substeps) {
    return simulate_with_states(topology, schedule, substeps).trace;
}

Trace dc_step_response(const CircuitTopology& topology, double v_bias, double duration, double dt,
                       int substeps) {
    if (!(dt > 0.0) || !(duration > dt)) {
        fail(ErrorKind::Validation, "dc step response needs duration > dt > 0");
    }
    return simulate(topology, build_schedule(WaveformSpec::step(v_bias, dt, duration)), substeps);
}

SampleSchedule schedule_from_trace(const Trace& trace, Interpolation interpolation) {
    SampleSchedule s;
    s.times = trace.t;
    s.voltages = trace.v;
    s.level_index = trace.level_index;
    s.dwell_index = trace.dwell_index;
    s.interpolation = interpolation;
    return s;
}

SampleSchedule schedule_from_trace(const Trace& trace) {
    const bool stepped = trace.has_dwell_annotations() ||
                         std::all_of(trace.v.begin(), trace.v.end(),
                                     [&](double v) { return v == trace.v.front(); });
    return schedule_from_trace(trace, stepped ? Interpolation::Hold : Interpolation::Linear);
}

void add_current_noise(Trace& trace, double relative, double absolute, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& i : trace.i) {
        const double sigma = relative * std::abs(i) + absolute;
        i += sigma * normal(rng);
    }
}

}  // namespace memdiscern
