#include "memdiscern/error.hpp"
#include "memdiscern/fitting.hpp"
#include "memdiscern/simulator.hpp"

#include "levenberg_marquardt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <set>
#include <string>

namespace memdiscern {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounds spanning two or more decades on one side of zero are searched in log space.
enum class Scale { Linear, Log, NegLog };

struct FreeParam {
    std::string name;
    Scale scale = Scale::Linear;
    double lower = 0.0;  // internal coordinates
    double upper = 0.0;
};

Scale pick_scale(double lo, double hi) {
    if (lo > 0.0 && hi / lo >= 100.0) {
        return Scale::Log;
    }
    if (hi < 0.0 && lo / hi >= 100.0) {
        return Scale::NegLog;
    }
    return Scale::Linear;
}

double to_internal(Scale s, double v) {
    switch (s) {
        case Scale::Log: return std::log(v);
        case Scale::NegLog: return std::log(-v);
        case Scale::Linear: return v;
    }
    return v;
}

double to_external(Scale s, double v) {
    switch (s) {
        case Scale::Log: return std::exp(v);
        case Scale::NegLog: return -std::exp(v);
        case Scale::Linear: return v;
    }
    return v;
}

double radical_inverse(std::uint64_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

const std::set<std::string>& known_names(ModelKind kind) {
    static const std::set<std::string> memristor = {"r_on", "r_off", "k", "p", "x0",
                                                    "c_parallel", "r_leak", "r_series"};
    static const std::set<std::string> rc = {"r_series", "r_leak", "c_parallel", "fixed_resistor"};
    if (kind == ModelKind::MemristorOde) {
        return memristor;
    }
    if (kind == ModelKind::RcCircuit) {
        return rc;
    }
    fail(ErrorKind::Validation, std::string("model kind ") + to_string(kind) + " is not an ODE model");
}

double simulated_ssr(const CircuitTopology& topo, const SampleSchedule& schedule, const Trace& trace,
                     int substeps) {
    const Trace sim = simulate(topo, schedule, substeps);
    double ssr = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double r = sim.i[k] - trace.i[k];
        ssr += r * r;
    }
    return ssr;
}

}  // namespace

CircuitTopology build_topology(const OdeModelSpec& spec, const std::map<std::string, double>& values) {
    const auto& names = known_names(spec.kind);
    CircuitTopology topo;
    if (spec.kind == ModelKind::MemristorOde) {
        MemristorParams m;
        m.window_kind = spec.window;
        topo.memristor = m;
    }
    for (const auto& [name, value] : values) {
        if (!names.contains(name)) {
            fail(ErrorKind::Validation, "unknown parameter '" + name + "' for " + to_string(spec.kind));
        }
        if (name == "c_parallel") {
            topo.c_parallel = value;
        } else if (name == "r_series") {
            topo.r_series = value;
        } else if (name == "r_leak") {
            topo.r_leak = value;
        } else if (name == "fixed_resistor") {
            topo.fixed_resistor = value;
        } else if (name == "r_on") {
            topo.memristor->r_on = value;
        } else if (name == "r_off") {
            topo.memristor->r_off = value;
        } else if (name == "k") {
            topo.memristor->k = value;
        } else if (name == "p") {
            topo.memristor->p = value;
        } else if (name == "x0") {
            topo.memristor->x0 = value;
        }
    }
    return topo;
}

CircuitTopology topology_from(const FitResult& fit, WindowKind window) {
    OdeModelSpec spec;
    spec.kind = fit.model_kind;
    spec.window = window;
    std::map<std::string, double> values;
    for (const auto& p : fit.params) {
        values[p.name] = p.value;
    }
    return build_topology(spec, values);
}

FitResult fit_ode_model(const Trace& trace, const SampleSchedule& schedule, const OdeModelSpec& spec,
                        const OdeFitOptions& options) {
    const auto& names = known_names(spec.kind);
    validate(trace);
    validate(schedule);
    if (schedule.size() != trace.size()) {
        fail(ErrorKind::Validation, "schedule and trace differ in length");
    }
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double tol = 1e-9 * std::max(std::abs(trace.t[k]), 1e-12);
        if (std::abs(schedule.times[k] - trace.t[k]) > tol) {
            fail(ErrorKind::Validation, "schedule times do not match the trace at sample " + std::to_string(k));
        }
    }
    if (spec.free.size() > 4) {
        fail(ErrorKind::Validation, "at most 4 free parameters are supported");
    }
    if (options.starts < 1) {
        fail(ErrorKind::Validation, "starts must be at least 1");
    }

    std::map<std::string, double> base = spec.frozen;
    std::vector<FreeParam> free;
    for (const auto& b : spec.free) {
        if (!names.contains(b.name)) {
            fail(ErrorKind::Validation, "unknown parameter '" + b.name + "' for " + to_string(spec.kind));
        }
        if (spec.frozen.contains(b.name)) {
            fail(ErrorKind::Validation, "parameter '" + b.name + "' is both frozen and free");
        }
        if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || b.lower > b.upper) {
            fail(ErrorKind::Validation, "bounds for '" + b.name + "' must be finite with lower <= upper");
        }
        if (b.lower == b.upper) {
            base[b.name] = b.lower;
            continue;
        }
        FreeParam fp;
        fp.name = b.name;
        fp.scale = pick_scale(b.lower, b.upper);
        fp.lower = to_internal(fp.scale, fp.scale == Scale::NegLog ? b.upper : b.lower);
        fp.upper = to_internal(fp.scale, fp.scale == Scale::NegLog ? b.lower : b.upper);
        free.push_back(fp);
    }

    auto topology_at = [&](std::span<const double> x) {
        std::map<std::string, double> values = base;
        for (std::size_t j = 0; j < free.size(); ++j) {
            values[free[j].name] = to_external(free[j].scale, x[j]);
        }
        return build_topology(spec, values);
    };

    auto residuals = [&](std::span<const double> x, std::vector<double>& r) {
        try {
            const Trace sim = simulate(topology_at(x), schedule, options.substeps);
            r.resize(trace.size());
            for (std::size_t k = 0; k < trace.size(); ++k) {
                r[k] = sim.i[k] - trace.i[k];
            }
            return true;
        } catch (const Error&) {
            return false;
        }
    };

    std::vector<double> lower, upper;
    for (const auto& fp : free) {
        lower.push_back(fp.lower);
        upper.push_back(fp.upper);
    }

    constexpr std::array<unsigned, 4> primes = {2, 3, 5, 7};
    const int starts = free.empty() ? 1 : options.starts;
    std::vector<std::future<detail::LmOutcome>> runs;
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x0(free.size());
        const std::uint64_t index = options.seed * static_cast<std::uint64_t>(starts) +
                                    static_cast<std::uint64_t>(s) + 1;
        for (std::size_t j = 0; j < free.size(); ++j) {
            x0[j] = lower[j] + radical_inverse(index, primes[j]) * (upper[j] - lower[j]);
        }
        runs.push_back(std::async(std::launch::async, [&, x0]() {
            return detail::levenberg_marquardt(residuals, x0, lower, upper, options.lm);
        }));
    }
    // Merge in start order so ties resolve deterministically.
    detail::LmOutcome best;
    best.ssr = kInf;
    for (auto& run : runs) {
        detail::LmOutcome o = run.get();
        if (o.ssr < best.ssr) {
            best = std::move(o);
        }
    }
    if (!std::isfinite(best.ssr)) {
        throw EstimationFailure(kInf, std::string("every start of the ") + to_string(spec.kind) +
                                          " fit failed to simulate");
    }

    const CircuitTopology topo = topology_at(best.x);
    FitResult result;
    result.model_kind = spec.kind;
    result.n_points = trace.size();
    result.converged = best.converged;
    result.iterations = best.iterations;
    for (const auto& fp : free) {
        result.free_params.push_back(fp.name);
    }
    if (topo.memristor) {
        const MemristorParams& m = *topo.memristor;
        result.params = {{"r_on", m.r_on}, {"r_off", m.r_off}, {"k", m.k}, {"p", m.p}, {"x0", m.x0}};
    }
    if (topo.fixed_resistor) {
        result.params.push_back({"fixed_resistor", *topo.fixed_resistor});
    }
    result.params.push_back({"c_parallel", topo.c_parallel});
    if (topo.r_leak) {
        result.params.push_back({"r_leak", *topo.r_leak});
    }
    result.params.push_back({"r_series", topo.r_series});
    result.ssr = simulated_ssr(topology_from(result, spec.window), schedule, trace, options.substeps);
    return result;
}

}  // namespace memdiscern
