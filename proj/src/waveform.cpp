#include "memdiscern/waveform.hpp"

#include "memdiscern/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace memdiscern {
namespace {

constexpr std::size_t kMaxSamples = 50'000'000;
constexpr double kCountSlack = 1e-9;

void require(bool ok, const char* field, const std::string& why) {
    if (!ok) {
        fail(ErrorKind::Validation, std::string("waveform field '") + field + "' " + why);
    }
}

int half_span_steps(const WaveformSpec& spec) {
    return static_cast<int>(std::llround((spec.v_max - spec.v_min) / spec.v_step));
}

double effective_duration(const WaveformSpec& spec) {
    if (spec.duration > 0.0) {
        return spec.duration;
    }
    return spec.period;
}

std::size_t sample_count(double duration, double dt) {
    const double steps = std::floor(duration / dt + kCountSlack);
    require(steps + 1.0 <= static_cast<double>(kMaxSamples), "dt",
            "produces too many samples for the requested duration");
    return static_cast<std::size_t>(steps) + 1;
}

// Unit triangle: 0 -> 1 -> 0 -> -1 -> 0 over one period.
double unit_triangle(double phase) {
    if (phase < 0.25) {
        return 4.0 * phase;
    }
    if (phase < 0.75) {
        return 2.0 - 4.0 * phase;
    }
    return 4.0 * phase - 4.0;
}

double polarity_sign(Polarity p) {
    return p == Polarity::PositiveFirst ? 1.0 : -1.0;
}

SampleSchedule build_stepped(const WaveformSpec& spec) {
    const int n = half_span_steps(spec);
    const int per_cycle = 2 * n + 1;
    const double cycle_time = static_cast<double>(per_cycle) * spec.dwell_steps * spec.dt;
    int cycles = 1;
    if (spec.duration > 0.0) {
        cycles = std::max(1, static_cast<int>(std::floor(spec.duration / cycle_time + kCountSlack)));
    }
    // Cycles share their boundary level, so m cycles visit 2n*m + 1 plateaus.
    const std::size_t levels = static_cast<std::size_t>(2 * n) * cycles + 1;
    const std::size_t total = levels * static_cast<std::size_t>(spec.dwell_steps);
    require(total <= kMaxSamples, "dwell_steps", "produces too many samples");

    const bool ascending_first = spec.polarity_first == Polarity::PositiveFirst;
    auto level_voltage = [&](std::size_t level) {
        const int pos = static_cast<int>(level % static_cast<std::size_t>(2 * n));
        int j = pos <= n ? pos : 2 * n - pos;
        if (!ascending_first) {
            j = n - j;
        }
        if (j == 0) {
            return spec.v_min;
        }
        if (j == n) {
            return spec.v_max;
        }
        return (spec.v_min * (n - j) + spec.v_max * j) / n;
    };

    SampleSchedule s;
    s.interpolation = Interpolation::Hold;
    s.times.reserve(total);
    s.voltages.reserve(total);
    s.level_index.reserve(total);
    s.dwell_index.reserve(total);
    std::size_t k = 0;
    for (std::size_t level = 0; level < levels; ++level) {
        const double v = level_voltage(level);
        for (int d = 1; d <= spec.dwell_steps; ++d, ++k) {
            s.times.push_back(static_cast<double>(k) * spec.dt);
            s.voltages.push_back(v);
            s.level_index.push_back(static_cast<int>(level));
            s.dwell_index.push_back(d);
        }
    }
    return s;
}

}  // namespace

WaveformSpec WaveformSpec::step(double amplitude, double dt, double duration) {
    WaveformSpec s;
    s.kind = WaveformKind::Step;
    s.amplitude = amplitude;
    s.dt = dt;
    s.duration = duration;
    return s;
}

WaveformSpec WaveformSpec::triangle(double amplitude, double period, double dt, double duration) {
    WaveformSpec s;
    s.kind = WaveformKind::Triangle;
    s.amplitude = amplitude;
    s.period = period;
    s.dt = dt;
    s.duration = duration;
    return s;
}

WaveformSpec WaveformSpec::sine(double amplitude, double period, double dt, double duration) {
    WaveformSpec s = triangle(amplitude, period, dt, duration);
    s.kind = WaveformKind::Sine;
    return s;
}

WaveformSpec WaveformSpec::stepped_triangle(double v_min, double v_max, double v_step,
                                            int dwell_steps, double dt, double duration) {
    WaveformSpec s;
    s.kind = WaveformKind::SteppedTriangle;
    s.v_min = v_min;
    s.v_max = v_max;
    s.v_step = v_step;
    s.dwell_steps = dwell_steps;
    s.dt = dt;
    s.duration = duration;
    return s;
}

void validate(const WaveformSpec& spec) {
    require(std::isfinite(spec.dt) && spec.dt > 0.0, "dt", "must be positive and finite");
    require(std::isfinite(spec.duration) && spec.duration >= 0.0, "duration",
            "must be non-negative and finite");
    require(std::isfinite(spec.amplitude), "amplitude", "must be finite");
    require(std::isfinite(spec.offset), "offset", "must be finite");

    switch (spec.kind) {
        case WaveformKind::Step:
            require(spec.duration > 0.0, "duration", "must be positive for a step waveform");
            break;
        case WaveformKind::Triangle:
        case WaveformKind::Sine:
            require(std::isfinite(spec.period) && spec.period > 0.0, "period",
                    "must be positive and finite");
            break;
        case WaveformKind::SteppedTriangle: {
            require(spec.dwell_steps >= 1, "dwell_steps", "must be at least 1");
            require(std::isfinite(spec.v_step) && spec.v_step > 0.0, "v_step",
                    "must be positive and finite");
            require(std::isfinite(spec.v_min) && std::isfinite(spec.v_max) &&
                        spec.v_min < spec.v_max,
                    "v_min", "must be finite and strictly below v_max");
            const double span = (spec.v_max - spec.v_min) / spec.v_step;
            require(std::abs(span - std::round(span)) <= 1e-9 * std::max(1.0, span), "v_step",
                    "must divide (v_max - v_min) into a whole number of steps");
            break;
        }
    }
    sample_count(spec.kind == WaveformKind::SteppedTriangle ? 0.0 : effective_duration(spec),
                 spec.dt);
}

SampleSchedule build_schedule(const WaveformSpec& spec) {
    validate(spec);
    if (spec.kind == WaveformKind::SteppedTriangle) {
        return build_stepped(spec);
    }

    const double duration = effective_duration(spec);
    const std::size_t n = sample_count(duration, spec.dt);
    const double sign = polarity_sign(spec.polarity_first);

    SampleSchedule s;
    s.interpolation = spec.kind == WaveformKind::Step ? Interpolation::Hold : Interpolation::Linear;
    s.times.resize(n);
    s.voltages.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * spec.dt;
        s.times[k] = t;
        double shape = 1.0;
        if (spec.kind == WaveformKind::Triangle) {
            const double cycles = t / spec.period;
            shape = unit_triangle(cycles - std::floor(cycles));
        } else if (spec.kind == WaveformKind::Sine) {
            shape = std::sin(2.0 * std::numbers::pi * t / spec.period);
        }
        s.voltages[k] = spec.offset + sign * spec.amplitude * shape;
    }
    return s;
}

int levels_per_cycle(const WaveformSpec& spec) {
    if (spec.kind != WaveformKind::SteppedTriangle) {
        fail(ErrorKind::UnsupportedWaveform, "levels per cycle is only defined for SteppedTriangle");
    }
    validate(spec);
    return 2 * half_span_steps(spec) + 1;
}

double effective_frequency(int levels, int dwell_index, double dt) {
    if (levels < 1 || dwell_index < 1 || !(dt > 0.0)) {
        fail(ErrorKind::Validation, "effective frequency needs levels >= 1, dwell_index >= 1, dt > 0");
    }
    return 1.0 / (static_cast<double>(levels) * dwell_index * dt);
}

double effective_frequency(const WaveformSpec& spec, int dwell_index) {
    const int levels = levels_per_cycle(spec);
    if (dwell_index < 1 || dwell_index > spec.dwell_steps) {
        fail(ErrorKind::Validation, "dwell_index " + std::to_string(dwell_index) +
                                        " outside 1.." + std::to_string(spec.dwell_steps));
    }
    return effective_frequency(levels, dwell_index, spec.dt);
}

void validate(const SampleSchedule& s) {
    if (s.times.size() != s.voltages.size()) {
        fail(ErrorKind::Validation, "schedule times and voltages differ in length");
    }
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        if (!std::isfinite(s.times[k]) || !std::isfinite(s.voltages[k])) {
            fail(ErrorKind::Validation, "schedule sample " + std::to_string(k) + " is not finite");
        }
        if (k > 0 && !(s.times[k] > s.times[k - 1])) {
            fail(ErrorKind::Validation,
                 "schedule times not strictly increasing at sample " + std::to_string(k));
        }
    }
    if (s.level_index.empty() && s.dwell_index.empty()) {
        return;
    }
    if (s.level_index.size() != s.size() || s.dwell_index.size() != s.size()) {
        fail(ErrorKind::Validation, "dwell annotations must cover every sample");
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s.dwell_index[k] < 1) {
            fail(ErrorKind::Validation, "dwell_index must be >= 1 at sample " + std::to_string(k));
        }
        if (k == 0) {
            continue;
        }
        const bool new_level = s.level_index[k] != s.level_index[k - 1];
        if (new_level && (s.level_index[k] != s.level_index[k - 1] + 1 || s.dwell_index[k] != 1)) {
            fail(ErrorKind::Validation,
                 "level change without dwell reset at sample " + std::to_string(k));
        }
        if (!new_level && s.dwell_index[k] != s.dwell_index[k - 1] + 1) {
            fail(ErrorKind::Validation,
                 "dwell_index must advance by one within a level at sample " + std::to_string(k));
        }
    }
}

}  // namespace memdiscern
