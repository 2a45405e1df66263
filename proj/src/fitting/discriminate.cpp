#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"
#include "memdiscern/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <string>

namespace memdiscern {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_bound(const OdeModelSpec& spec, const std::string& name) {
    return spec.frozen.contains(name) ||
           std::any_of(spec.free.begin(), spec.free.end(),
                       [&](const ParamBound& b) { return b.name == name; });
}

void add_range(OdeModelSpec& spec, const std::string& name, double centre, double factor) {
    if (has_bound(spec, name) || !(std::abs(centre) > 0.0) || !std::isfinite(centre)) {
        return;
    }
    const double a = centre / factor;
    const double b = centre * factor;
    spec.free.push_back({name, std::min(a, b), std::max(a, b)});
}

double ratio_or_inf(double num, double den) {
    if (den > 0.0) {
        return num / den;
    }
    return num > 0.0 ? kInf : 1.0;
}

}  // namespace

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::ExponentialDecay: return "ExponentialDecay";
        case ModelKind::PowerLawDecay: return "PowerLawDecay";
        case ModelKind::MemristorOde: return "MemristorOde";
        case ModelKind::RcCircuit: return "RcCircuit";
    }
    return "ExponentialDecay";
}

ModelKind model_kind_from_string(const std::string& s) {
    for (ModelKind k : {ModelKind::ExponentialDecay, ModelKind::PowerLawDecay, ModelKind::MemristorOde,
                        ModelKind::RcCircuit}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    fail(ErrorKind::Format, "unknown model kind '" + s + "'");
}

bool is_memristive(ModelKind kind) {
    return kind == ModelKind::PowerLawDecay || kind == ModelKind::MemristorOde;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::MemristorLike: return "MemristorLike";
        case Verdict::CapacitorLike: return "CapacitorLike";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

double FitResult::param(const std::string& name) const {
    for (const auto& p : params) {
        if (p.name == name) {
            return p.value;
        }
    }
    fail(ErrorKind::Validation, "fit has no parameter '" + name + "'");
}

DiscriminationConfig resolve_default_bounds(const Trace& trace, DiscriminationConfig config) {
    std::optional<SpikeFeatures> features;
    try {
        features = extract_spike_features(trace, config.tail_window);
    } catch (const Error&) {
    }

    // Step response: series resistance from the initial current, parallel
    // resistance from the asymptote, capacitance from the 1/e time.
    struct StepRc {
        double r_series;
        double r_parallel;
        double c;
    };
    std::optional<StepRc> step_rc;
    if (features && features->i_peak != 0.0 && features->i_inf != 0.0) {
        const double v = features->v_bias;
        const double r_total = v / features->i_inf;
        double r_s = v / features->i_peak;
        double r_p = r_total - r_s;
        if (!(r_s > 0.0) || !(r_p > 0.0)) {
            r_s = 0.1 * r_total;
            r_p = 0.9 * r_total;
        }
        const double c = features->tau_1e * (r_s + r_p) / (r_s * r_p);
        if (std::isfinite(r_s) && std::isfinite(r_p) && c > 0.0 && std::isfinite(c)) {
            step_rc = StepRc{r_s, r_p, c};
        }
    }

    OdeModelSpec& mem = config.memristor_model;
    if (mem.free.empty()) {
        if (!mem.frozen.contains("r_on") || !mem.frozen.contains("r_off")) {
            double r_min = kInf, r_max = 0.0;
            for (std::size_t k = 0; k < trace.size(); ++k) {
                if (trace.v[k] != 0.0 && trace.i[k] != 0.0) {
                    const double r = std::abs(trace.v[k] / trace.i[k]);
                    r_min = std::min(r_min, r);
                    r_max = std::max(r_max, r);
                }
            }
            if (r_max > 0.0) {
                mem.frozen.try_emplace("r_on", 0.5 * r_min);
                mem.frozen.try_emplace("r_off", 2.0 * r_max);
            }
        }
        if (step_rc) {
            mem.frozen.try_emplace("r_series", step_rc->r_series);
            mem.frozen.try_emplace("c_parallel", step_rc->c);
        }
        if (!has_bound(mem, "k") && trace.size() > 1) {
            double mean_abs = 0.0;
            for (double i : trace.i) {
                mean_abs += std::abs(i);
            }
            mean_abs /= static_cast<double>(trace.size());
            const double span = trace.t.back() - trace.t.front();
            if (mean_abs > 0.0 && span > 0.0) {
                // k0 moves the state by about 0.5 over the record. The floor keeps
                // at least a few percent of drift so the hypothesis has memory.
                const bool decaying = std::abs(trace.i.back()) < std::abs(trace.i.front());
                const double v_sign = trace.v.front() >= 0.0 ? 1.0 : -1.0;
                const double sign = decaying ? -v_sign : v_sign;
                const double k0 = 0.5 / (mean_abs * span);
                const double a = sign * k0 / 10.0;
                const double b = sign * k0 * 1e3;
                mem.free.push_back({"k", std::min(a, b), std::max(a, b)});
            }
        }
        if (!has_bound(mem, "x0")) {
            mem.free.push_back({"x0", 0.0, 1.0});
        }
    }

    OdeModelSpec& rc = config.rc_model;
    if (rc.free.empty() && step_rc) {
        add_range(rc, "r_series", step_rc->r_series, 100.0);
        add_range(rc, "r_leak", step_rc->r_parallel, 100.0);
        add_range(rc, "c_parallel", step_rc->c, 100.0);
    }
    return config;
}

DiscriminationReport rank_fits(std::vector<FitResult> fits, double indeterminacy_factor) {
    if (fits.empty()) {
        fail(ErrorKind::EstimationFailure, "no model could be fitted");
    }
    std::sort(fits.begin(), fits.end(), [](const FitResult& a, const FitResult& b) {
        if (a.ssr != b.ssr) {
            return a.ssr < b.ssr;
        }
        return static_cast<int>(a.model_kind) < static_cast<int>(b.model_kind);
    });

    DiscriminationReport report;
    report.indeterminacy_factor = indeterminacy_factor;
    report.best = fits.front().model_kind;
    const double best_ssr = fits.front().ssr;
    double other_best = kInf;
    for (const auto& f : fits) {
        if (f.model_kind == ModelKind::ExponentialDecay && !report.ssr_ratio_best_vs_exponential) {
            report.ssr_ratio_best_vs_exponential = ratio_or_inf(f.ssr, best_ssr);
        }
        if (is_memristive(f.model_kind) != is_memristive(report.best)) {
            other_best = std::min(other_best, f.ssr);
        }
    }
    report.class_ratio = ratio_or_inf(other_best, best_ssr);
    if (report.class_ratio >= indeterminacy_factor) {
        report.verdict = is_memristive(report.best) ? Verdict::MemristorLike : Verdict::CapacitorLike;
    } else {
        report.verdict = Verdict::Indeterminate;
    }
    report.fits = std::move(fits);
    return report;
}

DiscriminationReport discriminate(const Trace& trace, const SampleSchedule& schedule,
                                  const DiscriminationConfig& config) {
    if (!(config.indeterminacy_factor >= 1.0)) {
        fail(ErrorKind::Validation, "indeterminacy_factor must be >= 1");
    }
    validate(trace);
    const DiscriminationConfig resolved = resolve_default_bounds(trace, config);

    struct Job {
        ModelKind kind;
        std::function<FitResult()> run;
    };
    std::vector<Job> jobs;
    if (resolved.include_closed_form) {
        jobs.push_back({ModelKind::ExponentialDecay, [&] {
                            return fit_closed_form(trace, SpikeKind::ExponentialDecay, std::nullopt,
                                                   resolved.closed_form);
                        }});
        jobs.push_back({ModelKind::PowerLawDecay, [&] {
                            return fit_closed_form(trace, SpikeKind::PowerLawDecay, std::nullopt,
                                                   resolved.closed_form);
                        }});
    }
    if (resolved.include_ode) {
        for (const OdeModelSpec* spec : {&resolved.memristor_model, &resolved.rc_model}) {
            jobs.push_back({spec->kind, [&, spec] {
                                if (spec->free.empty()) {
                                    fail(ErrorKind::Validation,
                                         "no free parameters or bounds could be derived");
                                }
                                return fit_ode_model(trace, schedule, *spec, resolved.ode);
                            }});
        }
    }

    std::vector<std::future<FitResult>> running;
    for (const auto& job : jobs) {
        running.push_back(std::async(std::launch::async, job.run));
    }
    std::vector<FitResult> fits;
    std::vector<FitFailure> failures;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        try {
            fits.push_back(running[j].get());
        } catch (const Error& e) {
            failures.push_back({jobs[j].kind, e.what()});
        }
    }
    if (fits.empty()) {
        fail(ErrorKind::EstimationFailure, "every model fit failed");
    }
    DiscriminationReport report = rank_fits(std::move(fits), resolved.indeterminacy_factor);
    report.failures = std::move(failures);
    return report;
}

}  // namespace memdiscern
