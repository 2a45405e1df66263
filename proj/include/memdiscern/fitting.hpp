#pragma once

#include "memdiscern/circuit_models.hpp"
#include "memdiscern/trace.hpp"
#include "memdiscern/waveform.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memdiscern {

enum class ModelKind { ExponentialDecay, PowerLawDecay, MemristorOde, RcCircuit };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Which hypothesis a model stands for: memristive (true) or leaky-capacitor.
bool is_memristive(ModelKind kind);

struct NamedParam {
    std::string name;
    double value = 0.0;
};

struct FitResult {
    ModelKind model_kind = ModelKind::ExponentialDecay;
    std::vector<NamedParam> params;
    std::vector<std::string> free_params;
    double ssr = 0.0;  // A^2
    std::size_t n_points = 0;
    bool converged = false;
    int iterations = 0;

    double param(const std::string& name) const;
};

/// Damped least-squares settings. The forward-difference step for parameter j
/// is `diff_step * max(|p_j|, 1)` in the solver's internal coordinates.
struct LmOptions {
    int max_iterations = 200;
    double xtol = 1e-12;
    double ftol = 1e-14;
    double gtol = 1e-14;
    double lambda0 = 1e-3;
    double diff_step = 1e-6;
};

// --- closed-form spike fits ----------------------------------------------

FitResult fit_closed_form(const Trace& trace, SpikeKind kind,
                          const std::optional<SpikeModel>& init = std::nullopt,
                          const LmOptions& options = {});

SpikeModel spike_model_from(const FitResult& fit);

// Residual sum of squares of a closed-form model against a trace, with time
// measured from the first sample.
double spike_ssr(const SpikeModel& model, const Trace& trace);

// --- ODE model fits --------------------------------------------------------

struct ParamBound {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
};

/// Parameter names: r_on, r_off, k, p, x0, c_parallel, r_leak, r_series
/// (MemristorOde); r_series, r_leak, c_parallel, fixed_resistor (RcCircuit).
struct OdeModelSpec {
    ModelKind kind = ModelKind::MemristorOde;
    WindowKind window = WindowKind::None;
    std::map<std::string, double> frozen;
    std::vector<ParamBound> free;

    static OdeModelSpec of_kind(ModelKind kind) {
        OdeModelSpec s;
        s.kind = kind;
        return s;
    }
};

struct OdeFitOptions {
    int starts = 8;
    std::uint64_t seed = 0;
    int substeps = 10;
    LmOptions lm{.max_iterations = 100};
};

CircuitTopology build_topology(const OdeModelSpec& spec, const std::map<std::string, double>& values);

FitResult fit_ode_model(const Trace& trace, const SampleSchedule& schedule, const OdeModelSpec& spec,
                        const OdeFitOptions& options = {});

CircuitTopology topology_from(const FitResult& fit, WindowKind window = WindowKind::None);

// --- discrimination --------------------------------------------------------

enum class Verdict { MemristorLike, CapacitorLike, Indeterminate };

const char* to_string(Verdict v);

struct DiscriminationConfig {
    double indeterminacy_factor = 2.0;
    double tail_window = 0.2;
    // Empty `free` lists are filled with bounds derived from the trace.
    OdeModelSpec memristor_model = OdeModelSpec::of_kind(ModelKind::MemristorOde);
    OdeModelSpec rc_model = OdeModelSpec::of_kind(ModelKind::RcCircuit);
    OdeFitOptions ode;
    LmOptions closed_form;
    bool include_closed_form = true;
    bool include_ode = true;
};

struct FitFailure {
    ModelKind model_kind;
    std::string message;
};

struct DiscriminationReport {
    std::vector<FitResult> fits;  // ascending ssr
    std::vector<FitFailure> failures;
    ModelKind best = ModelKind::ExponentialDecay;
    std::optional<double> ssr_ratio_best_vs_exponential;  // ssr(exponential) / ssr(best)
    double class_ratio = 1.0;  // best other-hypothesis ssr / best ssr
    Verdict verdict = Verdict::Indeterminate;
    double indeterminacy_factor = 2.0;
};

// Fills empty bound lists in `config` from the trace (see DiscriminationConfig).
DiscriminationConfig resolve_default_bounds(const Trace& trace, DiscriminationConfig config);

DiscriminationReport discriminate(const Trace& trace, const SampleSchedule& schedule,
                                  const DiscriminationConfig& config = {});

// Applies the verdict rule to already-computed fits.
DiscriminationReport rank_fits(std::vector<FitResult> fits, double indeterminacy_factor);

}  // namespace memdiscern
