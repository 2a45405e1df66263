#include "memdiscern/serialization.hpp"

#include "memdiscern/error.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace memdiscern {
namespace {

// Strict object reader: every field must be consumed, so typos surface as errors.
class Reader {
public:
    Reader(const Json& j, std::string what) : j_(j), what_(std::move(what)) {
        if (!j_.is_object()) {
            fail(ErrorKind::Format, what_ + " must be a JSON object");
        }
    }

    void allow(const std::string& key) { seen_.insert(key); }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const Json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            fail(ErrorKind::Format, what_ + " is missing required field '" + key + "'");
        }
        return j_.at(key);
    }

    double number(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_number()) {
            fail(ErrorKind::Format, what_ + " field '" + key + "' must be a number");
        }
        return v.get<double>();
    }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        return has(key) ? number(key) : fallback;
    }

    std::optional<double> optional_number(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) {
            return std::nullopt;
        }
        return number(key);
    }

    int integer(const std::string& key, int fallback) {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        const Json& v = raw(key);
        if (!v.is_number_integer()) {
            fail(ErrorKind::Format, what_ + " field '" + key + "' must be an integer");
        }
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        const Json& v = raw(key);
        if (!v.is_boolean()) {
            fail(ErrorKind::Format, what_ + " field '" + key + "' must be true or false");
        }
        return v.get<bool>();
    }

    std::string text(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_string()) {
            fail(ErrorKind::Format, what_ + " field '" + key + "' must be a string");
        }
        return v.get<std::string>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        return has(key) ? text(key) : fallback;
    }

    template <class E>
    E choice(const std::string& key, std::initializer_list<E> options, E fallback) {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        const std::string s = text(key);
        for (E e : options) {
            if (s == to_string(e)) {
                return e;
            }
        }
        std::string allowed;
        for (E e : options) {
            allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
        }
        fail(ErrorKind::Format, what_ + " field '" + key + "' has unknown value '" + s +
                                    "' (expected one of " + allowed + ")");
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                fail(ErrorKind::Format, what_ + " has unknown field '" + key + "'");
            }
        }
    }

private:
    const Json& j_;
    std::string what_;
    std::set<std::string> seen_;
};

Json optional_json(const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
}

// Non-finite values become null so every report is valid JSON.
Json finite_or_null(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

template <class Fn>
auto rethrow_as_format(Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, e.what());
    }
}

std::vector<ParamBound> bounds_from_json(const Json& j) {
    if (!j.is_object()) {
        fail(ErrorKind::Format, "'free' must map parameter names to [lower, upper]");
    }
    std::vector<ParamBound> out;
    for (const auto& [name, range] : j.items()) {
        if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
            fail(ErrorKind::Format, "bound for '" + name + "' must be [lower, upper]");
        }
        out.push_back({name, range[0].get<double>(), range[1].get<double>()});
    }
    return out;
}

std::map<std::string, double> frozen_from_json(const Json& j) {
    if (!j.is_object()) {
        fail(ErrorKind::Format, "'frozen' must map parameter names to values");
    }
    std::map<std::string, double> out;
    for (const auto& [name, value] : j.items()) {
        if (!value.is_number()) {
            fail(ErrorKind::Format, "frozen value for '" + name + "' must be a number");
        }
        out[name] = value.get<double>();
    }
    return out;
}

OdeModelSpec ode_model_spec_from_json(const Json& j, OdeModelSpec spec, const std::string& what) {
    Reader r(j, what);
    spec.window = r.choice("window", {WindowKind::None, WindowKind::PolynomialJoglekarStyle,
                                      WindowKind::BoundaryBiolekStyle},
                           spec.window);
    if (r.has("frozen")) {
        spec.frozen = frozen_from_json(r.raw("frozen"));
    }
    if (r.has("free")) {
        spec.free = bounds_from_json(r.raw("free"));
    }
    r.finish();
    return spec;
}

LmOptions lm_options_from_json(const Json& j, LmOptions o, const std::string& what) {
    Reader r(j, what);
    o.max_iterations = r.integer("max_iterations", o.max_iterations);
    o.xtol = r.number("xtol", o.xtol);
    o.ftol = r.number("ftol", o.ftol);
    o.gtol = r.number("gtol", o.gtol);
    o.lambda0 = r.number("lambda0", o.lambda0);
    o.diff_step = r.number("diff_step", o.diff_step);
    r.finish();
    return o;
}

}  // namespace

const char* to_string(WaveformKind kind) {
    switch (kind) {
        case WaveformKind::Step: return "Step";
        case WaveformKind::Triangle: return "Triangle";
        case WaveformKind::Sine: return "Sine";
        case WaveformKind::SteppedTriangle: return "SteppedTriangle";
    }
    return "Step";
}

const char* to_string(Polarity polarity) {
    return polarity == Polarity::PositiveFirst ? "PositiveFirst" : "NegativeFirst";
}

const char* to_string(WindowKind kind) {
    switch (kind) {
        case WindowKind::None: return "None";
        case WindowKind::PolynomialJoglekarStyle: return "PolynomialJoglekarStyle";
        case WindowKind::BoundaryBiolekStyle: return "BoundaryBiolekStyle";
    }
    return "None";
}

const char* to_string(SpikeKind kind) {
    return kind == SpikeKind::ExponentialDecay ? "ExponentialDecay" : "PowerLawDecay";
}

const char* to_string(SpikePolarity polarity) {
    return polarity == SpikePolarity::Positive ? "Positive" : "Negative";
}

const char* to_string(TraceSource source) {
    return source == TraceSource::Measured ? "Measured" : "Simulated";
}

// --- waveform ---------------------------------------------------------------

Json to_json(const WaveformSpec& s) {
    return Json{{"kind", to_string(s.kind)},
                {"amplitude", s.amplitude},
                {"offset", s.offset},
                {"period", s.period},
                {"v_min", s.v_min},
                {"v_max", s.v_max},
                {"v_step", s.v_step},
                {"dwell_steps", s.dwell_steps},
                {"dt", s.dt},
                {"duration", s.duration},
                {"polarity_first", to_string(s.polarity_first)}};
}

WaveformSpec waveform_spec_from_json(const Json& j) {
    Reader r(j, "waveform spec");
    WaveformSpec s;
    s.kind = r.choice("kind", {WaveformKind::Step, WaveformKind::Triangle, WaveformKind::Sine,
                               WaveformKind::SteppedTriangle},
                      WaveformKind::Step);
    if (!r.has("kind")) {
        fail(ErrorKind::Format, "waveform spec is missing required field 'kind'");
    }
    s.amplitude = r.number("amplitude", s.amplitude);
    s.offset = r.number("offset", s.offset);
    s.period = r.number("period", s.period);
    s.v_min = r.number("v_min", s.v_min);
    s.v_max = r.number("v_max", s.v_max);
    s.v_step = r.number("v_step", s.v_step);
    s.dwell_steps = r.integer("dwell_steps", s.dwell_steps);
    s.dt = r.number("dt");
    s.duration = r.number("duration", s.duration);
    s.polarity_first = r.choice("polarity_first", {Polarity::PositiveFirst, Polarity::NegativeFirst},
                                s.polarity_first);
    r.finish();
    validate(s);
    return s;
}

// --- circuit models -----------------------------------------------------------

Json to_json(const MemristorParams& m) {
    return Json{{"r_on", m.r_on},
                {"r_off", m.r_off},
                {"k", m.k},
                {"p", m.p},
                {"window_kind", to_string(m.window_kind)},
                {"x0", m.x0}};
}

MemristorParams memristor_params_from_json(const Json& j) {
    Reader r(j, "memristor");
    MemristorParams m;
    m.r_on = r.number("r_on", m.r_on);
    m.r_off = r.number("r_off", m.r_off);
    m.k = r.number("k", m.k);
    m.p = r.number("p", m.p);
    m.window_kind = r.choice("window_kind", {WindowKind::None, WindowKind::PolynomialJoglekarStyle,
                                             WindowKind::BoundaryBiolekStyle},
                             m.window_kind);
    m.x0 = r.number("x0", m.x0);
    r.finish();
    validate(m);
    return m;
}

Json to_json(const CircuitTopology& t) {
    return Json{{"memristor", t.memristor ? to_json(*t.memristor) : Json(nullptr)},
                {"fixed_resistor", optional_json(t.fixed_resistor)},
                {"c_parallel", t.c_parallel},
                {"r_leak", optional_json(t.r_leak)},
                {"r_series", t.r_series}};
}

CircuitTopology topology_from_json(const Json& j) {
    Reader r(j, "topology");
    CircuitTopology t;
    if (r.has("memristor")) {
        t.memristor = memristor_params_from_json(r.raw("memristor"));
    }
    r.allow("memristor");
    t.fixed_resistor = r.optional_number("fixed_resistor");
    t.c_parallel = r.number("c_parallel", 0.0);
    t.r_leak = r.optional_number("r_leak");
    t.r_series = r.number("r_series", 0.0);
    r.finish();
    validate(t);
    return t;
}

Json to_json(const SpikeModel& m) {
    if (m.kind == SpikeKind::ExponentialDecay) {
        return Json{{"kind", to_string(m.kind)}, {"i_peak", m.i_peak}, {"i_inf", m.i_inf}, {"tau", m.tau}};
    }
    return Json{{"kind", to_string(m.kind)}, {"a", m.a}, {"b", m.b}, {"c", m.c}, {"t0", m.t0}};
}

SpikeModel spike_model_from_json(const Json& j) {
    Reader r(j, "spike model");
    const std::string kind = r.text("kind");
    SpikeModel m;
    if (kind == "ExponentialDecay") {
        m = SpikeModel::exponential(r.number("i_peak"), r.number("i_inf"), r.number("tau"));
    } else if (kind == "PowerLawDecay") {
        m = SpikeModel::power_law(r.number("a"), r.number("b"), r.number("c", 0.0), r.number("t0"));
    } else {
        fail(ErrorKind::Format, "spike model kind '" + kind + "' is not ExponentialDecay or PowerLawDecay");
    }
    r.finish();
    validate(m);
    return m;
}

Json to_json(const TraceMeta& meta) {
    return Json{{"device_id", meta.device_id},
                {"electrode_width_mm", optional_json(meta.electrode_width_mm)},
                {"source", to_string(meta.source)},
                {"topology", meta.topology ? to_json(*meta.topology) : Json(nullptr)}};
}

TraceMeta trace_meta_from_json(const Json& j) {
    return rethrow_as_format([&] {
        Reader r(j, "trace metadata");
        TraceMeta meta;
        meta.device_id = r.text("device_id", "");
        meta.electrode_width_mm = r.optional_number("electrode_width_mm");
        meta.source = r.choice("source", {TraceSource::Measured, TraceSource::Simulated},
                               TraceSource::Measured);
        if (r.has("topology")) {
            meta.topology = topology_from_json(r.raw("topology"));
        }
        r.allow("topology");
        r.finish();
        return meta;
    });
}

// --- configs ------------------------------------------------------------------

Json to_json(const ClassifierConfig& c) {
    return Json{{"pinch_eps", c.pinch_eps},   {"area_eps", c.area_eps},
                {"lin_eps", c.lin_eps},       {"asym_eps", c.asym_eps},
                {"switch_eps", c.switch_eps}, {"min_samples", c.min_samples},
                {"cv_threshold", c.cv_threshold}};
}

ClassifierConfig classifier_config_from_json(const Json& j) {
    return classifier_config_from_json(j, ClassifierConfig{});
}

ClassifierConfig classifier_config_from_json(const Json& j, ClassifierConfig c) {
    Reader r(j, "classifier config");
    c.pinch_eps = r.number("pinch_eps", c.pinch_eps);
    c.area_eps = r.number("area_eps", c.area_eps);
    c.lin_eps = r.number("lin_eps", c.lin_eps);
    c.asym_eps = r.number("asym_eps", c.asym_eps);
    c.switch_eps = r.number("switch_eps", c.switch_eps);
    c.min_samples = r.integer("min_samples", c.min_samples);
    c.cv_threshold = r.number("cv_threshold", c.cv_threshold);
    r.finish();
    for (double v : {c.pinch_eps, c.area_eps, c.lin_eps, c.asym_eps, c.switch_eps, c.cv_threshold}) {
        if (!std::isfinite(v) || v < 0.0) {
            fail(ErrorKind::Validation, "classifier thresholds must be finite and non-negative");
        }
    }
    if (c.min_samples < 3) {
        fail(ErrorKind::Validation, "classifier min_samples must be at least 3");
    }
    return c;
}

Json to_json(const LmOptions& o) {
    return Json{{"max_iterations", o.max_iterations}, {"xtol", o.xtol},       {"ftol", o.ftol},
                {"gtol", o.gtol},                     {"lambda0", o.lambda0}, {"diff_step", o.diff_step}};
}

Json to_json(const OdeModelSpec& spec) {
    Json frozen = Json::object();
    for (const auto& [name, value] : spec.frozen) {
        frozen[name] = value;
    }
    Json free = Json::object();
    for (const auto& b : spec.free) {
        free[b.name] = Json::array({b.lower, b.upper});
    }
    return Json{{"window", to_string(spec.window)}, {"frozen", frozen}, {"free", free}};
}

Json to_json(const DiscriminationConfig& c) {
    return Json{{"indeterminacy_factor", c.indeterminacy_factor},
                {"tail_window", c.tail_window},
                {"memristor_model", to_json(c.memristor_model)},
                {"rc_model", to_json(c.rc_model)},
                {"starts", c.ode.starts},
                {"seed", c.ode.seed},
                {"substeps", c.ode.substeps},
                {"ode_lm", to_json(c.ode.lm)},
                {"closed_form_lm", to_json(c.closed_form)},
                {"include_closed_form", c.include_closed_form},
                {"include_ode", c.include_ode}};
}

DiscriminationConfig discrimination_config_from_json(const Json& j) {
    return discrimination_config_from_json(j, DiscriminationConfig{});
}

DiscriminationConfig discrimination_config_from_json(const Json& j, DiscriminationConfig c) {
    return rethrow_as_format([&] {
        Reader r(j, "discrimination config");
        c.indeterminacy_factor = r.number("indeterminacy_factor", c.indeterminacy_factor);
        c.tail_window = r.number("tail_window", c.tail_window);
        if (r.has("memristor_model")) {
            c.memristor_model = ode_model_spec_from_json(r.raw("memristor_model"), c.memristor_model,
                                                         "memristor_model");
        }
        if (r.has("rc_model")) {
            c.rc_model = ode_model_spec_from_json(r.raw("rc_model"), c.rc_model, "rc_model");
        }
        c.ode.starts = r.integer("starts", c.ode.starts);
        if (r.has("seed")) {
            const Json& s = r.raw("seed");
            if (!s.is_number_unsigned()) {
                fail(ErrorKind::Format, "discrimination config field 'seed' must be a non-negative integer");
            }
            c.ode.seed = s.get<std::uint64_t>();
        }
        c.ode.substeps = r.integer("substeps", c.ode.substeps);
        if (r.has("ode_lm")) {
            c.ode.lm = lm_options_from_json(r.raw("ode_lm"), c.ode.lm, "ode_lm");
        }
        if (r.has("closed_form_lm")) {
            c.closed_form = lm_options_from_json(r.raw("closed_form_lm"), c.closed_form, "closed_form_lm");
        }
        c.include_closed_form = r.boolean("include_closed_form", c.include_closed_form);
        c.include_ode = r.boolean("include_ode", c.include_ode);
        r.finish();
        if (!(c.indeterminacy_factor >= 1.0) || !std::isfinite(c.indeterminacy_factor)) {
            fail(ErrorKind::Validation, "indeterminacy_factor must be a finite number >= 1");
        }
        if (c.ode.starts < 1 || c.ode.substeps < 1) {
            fail(ErrorKind::Validation, "starts and substeps must be at least 1");
        }
        return c;
    });
}

// --- reports ------------------------------------------------------------------

Json to_json(const SpikeFeatures& f) {
    return Json{{"i_peak", f.i_peak},       {"i_inf", f.i_inf},
                {"tau_1e", f.tau_1e},       {"polarity", to_string(f.polarity)},
                {"tail_window", f.tail_window}, {"t_peak", f.t_peak},
                {"v_bias", f.v_bias}};
}

Json to_json(const RcInference& rc) {
    return Json{{"r_parallel", rc.r_parallel}, {"c_parallel", rc.c_parallel}, {"v_bias", rc.v_bias}};
}

Json to_json(const LobeAreas& a) {
    return Json{{"lobe_area_pos", a.pos},
                {"lobe_area_neg", a.neg},
                {"total", a.total()},
                {"cycles", a.cycles},
                {"open_curve", a.open_curve}};
}

Json to_json(const FingerprintReport& f) {
    return Json{{"crossing_offsets", f.crossing_offsets},
                {"pinched", f.pinched},
                {"lobe_area_pos", f.lobe_area_pos},
                {"lobe_area_neg", f.lobe_area_neg},
                {"asymmetry", finite_or_null(f.asymmetry)},
                {"curve_class", to_string(f.curve_class)},
                {"diagnostics",
                 {{"peak_current", f.peak_current},
                  {"linear_residual", f.linear_residual},
                  {"max_slope_jump", f.max_slope_jump},
                  {"cycles", f.cycles},
                  {"open_curve", f.open_curve}}}};
}

Json to_json(const IsoDwellCurve& c) {
    return Json{{"dwell_index", c.dwell_index},
                {"effective_frequency", c.effective_frequency},
                {"n_points", c.curve.size()},
                {"areas", to_json(c.areas)}};
}

Json to_json(const std::vector<FrequencyPoint>& points) {
    Json arr = Json::array();
    for (const auto& p : points) {
        arr.push_back(Json{{"multiplier", p.multiplier}, {"frequency", p.frequency}, {"area", p.area}});
    }
    return arr;
}

Json to_json(const WidthStudyResult& w) {
    Json devices = Json::array();
    for (const auto& d : w.devices) {
        devices.push_back(Json{{"electrode_width_mm", d.electrode_width_mm},
                               {"measured_area", d.measured_area},
                               {"predicted_area", d.predicted_area},
                               {"ratio", d.ratio}});
    }
    return Json{{"devices", devices},
                {"ratio_mean", w.ratio_mean},
                {"ratio_cv", w.ratio_cv},
                {"constant_ratio", w.constant_ratio},
                {"cv_threshold", w.cv_threshold}};
}

Json to_json(const FitResult& fit) {
    Json params = Json::object();
    for (const auto& p : fit.params) {
        params[p.name] = p.value;
    }
    return Json{{"model_kind", to_string(fit.model_kind)},
                {"params", params},
                {"free_params", fit.free_params},
                {"ssr", fit.ssr},
                {"n_points", fit.n_points},
                {"converged", fit.converged},
                {"iterations", fit.iterations}};
}

FitResult fit_result_from_json(const Json& j) {
    return rethrow_as_format([&] {
        Reader r(j, "fit result");
        FitResult fit;
        fit.model_kind = model_kind_from_string(r.text("model_kind"));
        const Json& params = r.raw("params");
        if (!params.is_object()) {
            fail(ErrorKind::Format, "fit result 'params' must be an object");
        }
        for (const auto& [name, value] : params.items()) {
            fit.params.push_back({name, value.get<double>()});
        }
        if (r.has("free_params")) {
            fit.free_params = r.raw("free_params").get<std::vector<std::string>>();
        }
        fit.ssr = r.number("ssr");
        fit.n_points = static_cast<std::size_t>(r.integer("n_points", 0));
        fit.converged = r.boolean("converged", false);
        fit.iterations = r.integer("iterations", 0);
        r.finish();
        return fit;
    });
}

Json to_json(const DiscriminationReport& d) {
    Json fits = Json::array();
    for (const auto& f : d.fits) {
        fits.push_back(to_json(f));
    }
    Json failures = Json::array();
    for (const auto& f : d.failures) {
        failures.push_back(Json{{"model_kind", to_string(f.model_kind)}, {"message", f.message}});
    }
    return Json{{"fits", fits},
                {"failures", failures},
                {"best", to_string(d.best)},
                {"ssr_ratio_best_vs_exponential",
                 d.ssr_ratio_best_vs_exponential ? finite_or_null(*d.ssr_ratio_best_vs_exponential)
                                                 : Json(nullptr)},
                {"class_ratio", finite_or_null(d.class_ratio)},
                {"verdict", to_string(d.verdict)},
                {"indeterminacy_factor", d.indeterminacy_factor}};
}

}  // namespace memdiscern
