#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"
#include "memdiscern/simulator.hpp"

#include "loop_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace memdiscern {
namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double median_step(const std::vector<double>& t) {
    std::vector<double> steps;
    steps.reserve(t.size());
    for (std::size_t k = 1; k < t.size(); ++k) {
        steps.push_back(t[k] - t[k - 1]);
    }
    if (steps.empty()) {
        return 0.0;
    }
    auto mid = steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2);
    std::nth_element(steps.begin(), mid, steps.end());
    return *mid;
}

}  // namespace

std::vector<double> crossing_offsets(const Trace& trace) {
    std::vector<double> out;
    const std::size_t n = trace.size();
    // Walk from one non-zero sample to the next; a sign flip between them is a crossing.
    std::size_t last = n;
    for (std::size_t k = 0; k < n; ++k) {
        if (sign_of(trace.v[k]) == 0) {
            continue;
        }
        if (last != n && sign_of(trace.v[k]) != sign_of(trace.v[last])) {
            if (k == last + 1) {
                const double frac = trace.v[last] / (trace.v[last] - trace.v[k]);
                out.push_back(trace.i[last] + frac * (trace.i[k] - trace.i[last]));
            } else {
                // Samples sitting exactly on 0 V: average their currents.
                double sum = 0.0;
                for (std::size_t z = last + 1; z < k; ++z) {
                    sum += trace.i[z];
                }
                out.push_back(sum / static_cast<double>(k - last - 1));
            }
        }
        last = k;
    }
    return out;
}

LobeAreas lobe_areas(const Trace& trace) {
    LobeAreas areas;
    const std::size_t n = trace.size();
    if (n < 3) {
        return areas;
    }
    areas.cycles = detail::count_cycles(trace.v, true);
    const double cycles = static_cast<double>(areas.cycles);
    areas.pos = std::abs(detail::clipped_signed_area(trace.v, trace.i, true)) / cycles;
    areas.neg = std::abs(detail::clipped_signed_area(trace.v, trace.i, false)) / cycles;

    const auto [v_lo, v_hi] = std::minmax_element(trace.v.begin(), trace.v.end());
    const auto [i_lo, i_hi] = std::minmax_element(trace.i.begin(), trace.i.end());
    const double v_span = *v_hi - *v_lo;
    const double i_span = *i_hi - *i_lo;
    const double dv = v_span > 0.0 ? (trace.v.back() - trace.v.front()) / v_span : 0.0;
    const double di = i_span > 0.0 ? (trace.i.back() - trace.i.front()) / i_span : 0.0;
    areas.open_curve = std::hypot(dv, di) > 0.05;
    return areas;
}

std::vector<IsoDwellCurve> iso_dwell_curves(const Trace& trace, const std::vector<int>& indices,
                                            std::optional<int> levels_per_cycle) {
    if (!trace.has_dwell_annotations()) {
        fail(ErrorKind::NotSteppedTrace, "trace carries no level/dwell annotations");
    }
    validate(trace);
    const int max_dwell = *std::max_element(trace.dwell_index.begin(), trace.dwell_index.end());

    // One voltage per plateau, in level order.
    std::vector<double> level_voltages;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (k == 0 || trace.level_index[k] != trace.level_index[k - 1]) {
            level_voltages.push_back(trace.v[k]);
        }
    }
    int levels = 0;
    if (levels_per_cycle) {
        levels = *levels_per_cycle;
    } else {
        // m up/down cycles sharing boundary plateaus visit 2n*m + 1 levels.
        const int cycles = std::max(1, (detail::count_turning_points(level_voltages) + 1) / 2);
        levels = (static_cast<int>(level_voltages.size()) - 1) / cycles + 1;
    }
    const double dt = median_step(trace.t);

    std::vector<IsoDwellCurve> out;
    out.reserve(indices.size());
    for (int index : indices) {
        if (index < 1 || index > max_dwell) {
            fail(ErrorKind::Validation, "dwell index " + std::to_string(index) + " outside 1.." +
                                            std::to_string(max_dwell));
        }
        IsoDwellCurve c;
        c.dwell_index = index;
        c.effective_frequency = effective_frequency(levels, index, dt);
        c.curve.meta = trace.meta;
        for (std::size_t k = 0; k < trace.size(); ++k) {
            if (trace.dwell_index[k] == index) {
                c.curve.push_back(trace.t[k], trace.v[k], trace.i[k]);
            }
        }
        c.areas = lobe_areas(c.curve);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<FrequencyPoint> frequency_sweep(const CircuitTopology& topology,
                                            const WaveformSpec& base,
                                            const std::vector<double>& multipliers, int substeps) {
    if (base.kind != WaveformKind::Triangle && base.kind != WaveformKind::Sine) {
        fail(ErrorKind::UnsupportedWaveform, "frequency sweep needs a Triangle or Sine base waveform");
    }
    validate(base);
    const long per_cycle = std::lround(base.period / base.dt);
    if (per_cycle < 4 || std::abs(per_cycle * base.dt - base.period) > 1e-9 * base.period) {
        fail(ErrorKind::Validation, "base period must be a whole number (>= 4) of dt steps");
    }

    std::vector<FrequencyPoint> out;
    out.reserve(multipliers.size());
    for (double m : multipliers) {
        if (!(m >= 1.0) || !std::isfinite(m)) {
            fail(ErrorKind::Validation, "frequency multipliers must be >= 1");
        }
        WaveformSpec spec = base;
        spec.period = base.period / m;
        spec.dt = base.dt / m;
        spec.duration = 2.0 * spec.period;
        const Trace trace = simulate(topology, build_schedule(spec), substeps);
        // Drop the warm-up cycle; keep the second one including its closing sample.
        const auto first = static_cast<std::size_t>(per_cycle);
        const Trace steady = slice(trace, first, first + static_cast<std::size_t>(per_cycle) + 1);
        out.push_back({m, 1.0 / spec.period, lobe_areas(steady).total()});
    }
    return out;
}

}  // namespace memdiscern
