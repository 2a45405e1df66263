#include "memdiscern/circuit_models.hpp"

#include "memdiscern/error.hpp"

#include <cmath>
#include <string>

namespace memdiscern {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        fail(ErrorKind::Validation, what);
    }
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_state(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        fail(ErrorKind::StateDomain, "memristor state " + std::to_string(x) + " outside [0, 1]");
    }
}

}  // namespace

CircuitTopology CircuitTopology::resistor(double ohms) {
    CircuitTopology t;
    t.fixed_resistor = ohms;
    return t;
}

CircuitTopology CircuitTopology::memristor_only(const MemristorParams& m) {
    CircuitTopology t;
    t.memristor = m;
    return t;
}

CircuitTopology CircuitTopology::leaky_capacitor(double r_series, double r_leak, double c_parallel) {
    CircuitTopology t;
    t.r_series = r_series;
    t.r_leak = r_leak;
    t.c_parallel = c_parallel;
    return t;
}

SpikeModel SpikeModel::exponential(double i_peak, double i_inf, double tau) {
    SpikeModel m;
    m.kind = SpikeKind::ExponentialDecay;
    m.i_peak = i_peak;
    m.i_inf = i_inf;
    m.tau = tau;
    return m;
}

SpikeModel SpikeModel::power_law(double a, double b, double c, double t0) {
    SpikeModel m;
    m.kind = SpikeKind::PowerLawDecay;
    m.a = a;
    m.b = b;
    m.c = c;
    m.t0 = t0;
    return m;
}

void validate(const MemristorParams& m) {
    require(positive_finite(m.r_on), "memristor r_on must be positive");
    require(std::isfinite(m.r_off) && m.r_off > m.r_on, "memristor r_off must exceed r_on");
    require(std::isfinite(m.k), "memristor k must be finite");
    require(std::isfinite(m.p) && m.p >= 1.0, "memristor window exponent p must be >= 1");
    require(m.x0 >= 0.0 && m.x0 <= 1.0, "memristor x0 must lie in [0, 1]");
}

void validate(const CircuitTopology& t) {
    require(!(t.memristor && t.fixed_resistor),
            "topology main branch holds both a memristor and a fixed resistor");
    if (t.memristor) {
        validate(*t.memristor);
    }
    if (t.fixed_resistor) {
        require(positive_finite(*t.fixed_resistor), "fixed_resistor must be positive");
    }
    if (t.r_leak) {
        require(positive_finite(*t.r_leak), "r_leak must be positive");
    }
    require(std::isfinite(t.c_parallel) && t.c_parallel >= 0.0, "c_parallel must be >= 0");
    require(std::isfinite(t.r_series) && t.r_series >= 0.0, "r_series must be >= 0");
    require(t.memristor || t.fixed_resistor || t.r_leak || t.c_parallel > 0.0,
            "topology has no conducting path");
}

void validate(const SpikeModel& m) {
    if (m.kind == SpikeKind::ExponentialDecay) {
        require(std::isfinite(m.i_peak) && std::isfinite(m.i_inf), "spike currents must be finite");
        require(positive_finite(m.tau), "spike tau must be positive");
    } else {
        require(std::isfinite(m.a) && std::isfinite(m.c), "spike a and c must be finite");
        require(positive_finite(m.b), "spike exponent b must be positive");
        require(positive_finite(m.t0), "spike offset t0 must be positive");
    }
}

double memristance(double x, const MemristorParams& params) {
    check_state(x);
    return params.r_on * x + params.r_off * (1.0 - x);
}

double window(double x, const MemristorParams& params) {
    check_state(x);
    switch (params.window_kind) {
        case WindowKind::None:
            return 1.0;
        case WindowKind::PolynomialJoglekarStyle:
            return 1.0 - std::pow(std::abs(2.0 * x - 1.0), 2.0 * params.p);
        case WindowKind::BoundaryBiolekStyle:
            // Direction-dependent; see state_rate.
            return 1.0;
    }
    return 1.0;
}

double state_rate(double x, double i, const MemristorParams& params) {
    check_state(x);
    if (params.window_kind == WindowKind::BoundaryBiolekStyle) {
        // Positive drift (k*i > 0) pushes x toward 1, negative toward 0.
        const double drift = params.k * i;
        const double anchor = drift >= 0.0 ? 0.0 : 1.0;
        const double w = 1.0 - std::pow(std::abs(x - anchor), 2.0 * params.p);
        return drift * w;
    }
    return params.k * i * window(x, params);
}

double spike_current(const SpikeModel& model, double t) {
    if (model.kind == SpikeKind::ExponentialDecay) {
        return model.i_inf + (model.i_peak - model.i_inf) * std::exp(-t / model.tau);
    }
    return model.a * std::pow(t + model.t0, -model.b) + model.c;
}

}  // namespace memdiscern
