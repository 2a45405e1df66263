#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"
#include "memdiscern/fitting.hpp"

#include "levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace memdiscern {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal coordinates: positive shape parameters are fitted as logarithms.
SpikeModel decode(SpikeKind kind, std::span<const double> p) {
    if (kind == SpikeKind::ExponentialDecay) {
        return SpikeModel::exponential(p[0], p[1], std::exp(p[2]));
    }
    return SpikeModel::power_law(p[0], std::exp(p[1]), p[2], std::exp(p[3]));
}

std::vector<double> encode(const SpikeModel& m) {
    if (m.kind == SpikeKind::ExponentialDecay) {
        return {m.i_peak, m.i_inf, std::log(m.tau)};
    }
    return {m.a, std::log(m.b), m.c, std::log(m.t0)};
}

// Power-law seed for a given asymptote and offset: regress log|i - c| on log(t + t0).
SpikeModel power_law_seed(const Trace& trace, double c, double t0, double sign) {
    const double t_first = trace.t.front();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    const std::size_t half = std::max<std::size_t>(trace.size() / 2, 3);
    for (std::size_t k = 0; k < half && k < trace.size(); ++k) {
        const double d = sign * (trace.i[k] - c);
        if (!(d > 0.0)) {
            continue;
        }
        const double x = std::log(trace.t[k] - t_first + t0);
        const double y = std::log(d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    double b = 0.5;
    double log_a = 0.0;
    if (count >= 2 && count * sxx - sx * sx > 0.0) {
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        b = std::clamp(-slope, 0.01, 10.0);
        log_a = (sy + b * sx) / count;
    } else if (count > 0) {
        log_a = sy / count;
    }
    return SpikeModel::power_law(sign * std::exp(log_a), b, c, t0);
}

}  // namespace

double spike_ssr(const SpikeModel& model, const Trace& trace) {
    double ssr = 0.0;
    const double t_first = trace.empty() ? 0.0 : trace.t.front();
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double r = spike_current(model, trace.t[k] - t_first) - trace.i[k];
        ssr += r * r;
    }
    return ssr;
}

SpikeModel spike_model_from(const FitResult& fit) {
    if (fit.model_kind == ModelKind::ExponentialDecay) {
        return SpikeModel::exponential(fit.param("i_peak"), fit.param("i_inf"), fit.param("tau"));
    }
    if (fit.model_kind == ModelKind::PowerLawDecay) {
        return SpikeModel::power_law(fit.param("a"), fit.param("b"), fit.param("c"), fit.param("t0"));
    }
    fail(ErrorKind::Validation, "fit is not a closed-form spike model");
}

FitResult fit_closed_form(const Trace& trace, SpikeKind kind, const std::optional<SpikeModel>& init,
                          const LmOptions& options) {
    const std::size_t n_params = kind == SpikeKind::ExponentialDecay ? 3 : 4;
    if (trace.size() < 2 + n_params) {
        fail(ErrorKind::InsufficientData, "closed-form fit needs at least " +
                                              std::to_string(2 + n_params) + " samples");
    }
    validate(trace);

    SpikeFeatures features;
    try {
        features = extract_spike_features(trace, 0.2);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoDecay) {
            fail(ErrorKind::Unidentifiable, std::string("spike parameters are unidentifiable: ") + e.what());
        }
        throw;
    }

    const double t_first = trace.t.front();
    const double span = trace.t.back() - t_first;
    const double dt = span / static_cast<double>(trace.size() - 1);

    std::vector<SpikeModel> seeds;
    if (init) {
        validate(*init);
        if (init->kind != kind) {
            fail(ErrorKind::Validation, "initial model kind does not match the requested fit");
        }
        seeds.push_back(*init);
    } else if (kind == SpikeKind::ExponentialDecay) {
        seeds.push_back(SpikeModel::exponential(features.i_peak, features.i_inf,
                                                features.t_peak - t_first + features.tau_1e));
    } else {
        const double sign = features.polarity == SpikePolarity::Positive ? 1.0 : -1.0;
        for (double c : {features.i_inf, 0.0}) {
            for (double t0 : {dt, 10.0 * dt, 0.1 * span}) {
                seeds.push_back(power_law_seed(trace, c, t0, sign));
            }
        }
    }

    std::vector<double> lower, upper;
    if (kind == SpikeKind::ExponentialDecay) {
        lower = {-kInf, -kInf, std::log(1e-3 * dt)};
        upper = {kInf, kInf, std::log(1e3 * span)};
    } else {
        lower = {-kInf, std::log(1e-3), -kInf, std::log(1e-4 * dt)};
        upper = {kInf, std::log(20.0), kInf, std::log(10.0 * span)};
    }

    auto residuals = [&](std::span<const double> p, std::vector<double>& r) {
        const SpikeModel m = decode(kind, p);
        r.resize(trace.size());
        for (std::size_t k = 0; k < trace.size(); ++k) {
            r[k] = spike_current(m, trace.t[k] - t_first) - trace.i[k];
        }
        return true;
    };

    detail::LmOutcome best;
    best.ssr = kInf;
    for (const SpikeModel& seed : seeds) {
        detail::LmOutcome o = detail::levenberg_marquardt(residuals, encode(seed), lower, upper, options);
        if (o.ssr < best.ssr) {
            best = std::move(o);
        }
    }
    if (!std::isfinite(best.ssr)) {
        fail(ErrorKind::Unidentifiable, "closed-form fit could not evaluate any start");
    }

    const SpikeModel fitted = decode(kind, best.x);
    FitResult result;
    result.n_points = trace.size();
    result.converged = best.converged;
    result.iterations = best.iterations;
    if (kind == SpikeKind::ExponentialDecay) {
        result.model_kind = ModelKind::ExponentialDecay;
        result.params = {{"i_peak", fitted.i_peak}, {"i_inf", fitted.i_inf}, {"tau", fitted.tau}};
        result.free_params = {"i_peak", "i_inf", "tau"};
    } else {
        result.model_kind = ModelKind::PowerLawDecay;
        result.params = {{"a", fitted.a}, {"b", fitted.b}, {"c", fitted.c}, {"t0", fitted.t0}};
        result.free_params = {"a", "b", "c", "t0"};
    }
    result.ssr = spike_ssr(spike_model_from(result), trace);
    return result;
}

}  // namespace memdiscern
