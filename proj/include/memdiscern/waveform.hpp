#pragma once

#include <cstddef>
#include <vector>

namespace memdiscern {

enum class WaveformKind { Step, Triangle, Sine, SteppedTriangle };
enum class Polarity { PositiveFirst, NegativeFirst };

// How the applied voltage behaves between two schedule samples.
//  Hold:   the source jumps to the next sample's value right after the
//          previous measurement and holds it (stepped sources).
//  Linear: piecewise-linear between samples (swept sources).
enum class Interpolation { Hold, Linear };

/// Driving waveform description. All voltages in volts, times in seconds.
///
/// For the periodic kinds a `duration` of zero means one period (Triangle,
/// Sine) or one full up/down traversal (SteppedTriangle).
struct WaveformSpec {
    WaveformKind kind = WaveformKind::Step;
    double amplitude = 0.0;
    double offset = 0.0;
    double period = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
    double v_step = 0.0;
    int dwell_steps = 12;
    double dt = 0.0;
    double duration = 0.0;
    Polarity polarity_first = Polarity::PositiveFirst;

    static WaveformSpec step(double amplitude, double dt, double duration);
    static WaveformSpec triangle(double amplitude, double period, double dt, double duration = 0.0);
    static WaveformSpec sine(double amplitude, double period, double dt, double duration = 0.0);
    static WaveformSpec stepped_triangle(double v_min, double v_max, double v_step, int dwell_steps,
                                         double dt, double duration = 0.0);
};

struct SampleSchedule {
    std::vector<double> times;
    std::vector<double> voltages;
    // Plateau annotations; empty unless the schedule came from a stepped waveform.
    std::vector<int> level_index;
    std::vector<int> dwell_index;
    Interpolation interpolation = Interpolation::Linear;

    std::size_t size() const { return times.size(); }
    bool has_dwell_annotations() const { return !dwell_index.empty(); }
};

// Throws ErrorKind::Validation naming the first offending field.
void validate(const WaveformSpec& spec);

SampleSchedule build_schedule(const WaveformSpec& spec);

// Number of plateaus visited in one v_min -> v_max -> v_min traversal,
// turning level counted once.
int levels_per_cycle(const WaveformSpec& spec);

double effective_frequency(const WaveformSpec& spec, int dwell_index);

// Frequency of the curve joining the n-th sample of every plateau.
double effective_frequency(int levels_per_cycle, int dwell_index, double dt);

// Checks ordering and annotation consistency; throws ErrorKind::Validation.
void validate(const SampleSchedule& schedule);

}  // namespace memdiscern
