#pragma once

#include <optional>

namespace memdiscern {

enum class WindowKind { None, PolynomialJoglekarStyle, BoundaryBiolekStyle };

/// Lumped linear-drift memristor. State x in [0, 1]; x = 1 is fully doped (r_on).
struct MemristorParams {
    double r_on = 100.0;
    double r_off = 16'000.0;
    double k = 1e4;
    double p = 1.0;
    WindowKind window_kind = WindowKind::None;
    double x0 = 0.1;
};

/// Device equivalent circuit: main branch (memristor, fixed resistor or
/// nothing) in parallel with c_parallel and an optional leak resistor, the
/// whole group behind a series contact resistance.
struct CircuitTopology {
    std::optional<MemristorParams> memristor;
    std::optional<double> fixed_resistor;
    double c_parallel = 0.0;
    std::optional<double> r_leak;
    double r_series = 0.0;

    static CircuitTopology resistor(double ohms);
    static CircuitTopology memristor_only(const MemristorParams& m);
    // r_series + (r_leak || c_parallel); the textbook leaky capacitor.
    static CircuitTopology leaky_capacitor(double r_series, double r_leak, double c_parallel);
};

enum class SpikeKind { ExponentialDecay, PowerLawDecay };

struct SpikeModel {
    SpikeKind kind = SpikeKind::ExponentialDecay;
    // ExponentialDecay
    double i_peak = 0.0;
    double i_inf = 0.0;
    double tau = 1.0;
    // PowerLawDecay: a * (t + t0)^-b + c
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    double t0 = 1.0;

    static SpikeModel exponential(double i_peak, double i_inf, double tau);
    static SpikeModel power_law(double a, double b, double c, double t0);
};

void validate(const MemristorParams& params);
void validate(const CircuitTopology& topology);
void validate(const SpikeModel& model);

double memristance(double x, const MemristorParams& params);

double window(double x, const MemristorParams& params);

// dx/dt for current i through the memristor.
double state_rate(double x, double i, const MemristorParams& params);

double spike_current(const SpikeModel& model, double t);

}  // namespace memdiscern
