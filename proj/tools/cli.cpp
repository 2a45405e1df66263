#include "cli.hpp"

#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"
#include "memdiscern/fitting.hpp"
#include "memdiscern/io.hpp"
#include "memdiscern/serialization.hpp"
#include "memdiscern/simulator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

namespace fs = std::filesystem;

namespace memdiscern::cli {
namespace {

struct Common {
    std::string input;
    std::string output;
    std::string config;
    std::uint64_t seed = 0;
    std::string plot = "none";
};

struct Result {
    Json report;
    std::vector<Curve> curves;
};

using TraceCommand = std::function<Result(const Trace&)>;

// --- argument helpers ---------------------------------------------------------

std::vector<fs::path> config_dirs() {
    std::vector<fs::path> dirs;
    const char* env = std::getenv("MEMDISCERN_CONFIG_DIR");
    if (env == nullptr) {
        return dirs;
    }
    std::string_view rest(env);
    while (!rest.empty()) {
        const auto colon = rest.find(':');
        const auto part = rest.substr(0, colon);
        if (!part.empty()) {
            dirs.emplace_back(std::string(part));
        }
        if (colon == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(colon + 1);
    }
    return dirs;
}

fs::path resolve_path(const std::string& arg, const std::string& what) {
    const fs::path p(arg);
    if (fs::exists(p)) {
        return p;
    }
    if (p.is_relative()) {
        for (const auto& dir : config_dirs()) {
            if (fs::exists(dir / p)) {
                return dir / p;
            }
        }
    }
    fail(ErrorKind::Io, what + " '" + arg + "' not found");
}

Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, origin + ": " + e.what());
    }
}

// Accepts inline JSON (leading '{') or a file path.
Json load_json_arg(const std::string& arg, const std::string& what) {
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && arg[first] == '{') {
        return parse_json(arg, what);
    }
    const fs::path p = resolve_path(arg, what);
    return parse_json(read_file(p), p.string());
}

// --config wins; otherwise `<command>.json` from the config search path.
std::optional<Json> command_config(const Common& c, const std::string& command) {
    if (!c.config.empty()) {
        return load_json_arg(c.config, "config");
    }
    for (const auto& dir : config_dirs()) {
        const fs::path p = dir / (command + ".json");
        if (fs::is_regular_file(p)) {
            return parse_json(read_file(p), p.string());
        }
    }
    return std::nullopt;
}

double parse_double(std::string_view s, const std::string& context) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        fail(ErrorKind::Usage, context + ": '" + std::string(s) + "' is not a finite number");
    }
    return v;
}

struct Assignment {
    std::string model;  // empty when unprefixed
    std::string name;
    std::string value;
};

Assignment split_assignment(const std::string& s, const std::string& flag) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
        fail(ErrorKind::Usage, flag + " expects name=value, got '" + s + "'");
    }
    Assignment a;
    std::string key = s.substr(0, eq);
    a.value = s.substr(eq + 1);
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        a.model = key.substr(0, dot);
        key = key.substr(dot + 1);
    }
    a.name = key;
    return a;
}

void set_bound(OdeModelSpec& spec, const Assignment& a, const std::string& flag) {
    const auto colon = a.value.find(':');
    if (colon == std::string::npos) {
        fail(ErrorKind::Usage, flag + " expects name=lower:upper, got '" + a.name + "=" + a.value + "'");
    }
    const double lo = parse_double(std::string_view(a.value).substr(0, colon), flag);
    const double hi = parse_double(std::string_view(a.value).substr(colon + 1), flag);
    spec.frozen.erase(a.name);
    std::erase_if(spec.free, [&](const ParamBound& b) { return b.name == a.name; });
    spec.free.push_back({a.name, lo, hi});
}

void set_frozen(OdeModelSpec& spec, const Assignment& a, const std::string& flag) {
    std::erase_if(spec.free, [&](const ParamBound& b) { return b.name == a.name; });
    spec.frozen[a.name] = parse_double(a.value, flag);
}

// Routes model-prefixed assignments ("memristor.k=..", "rc.c_parallel=..").
OdeModelSpec& spec_for(DiscriminationConfig& config, const Assignment& a, const std::string& flag) {
    if (a.model == "memristor") {
        return config.memristor_model;
    }
    if (a.model == "rc") {
        return config.rc_model;
    }
    fail(ErrorKind::Usage, flag + " needs a 'memristor.' or 'rc.' prefix, got '" + a.model +
                               (a.model.empty() ? "" : ".") + a.name + "'");
}

WindowKind window_from_string(const std::string& s) {
    for (WindowKind w : {WindowKind::None, WindowKind::PolynomialJoglekarStyle,
                         WindowKind::BoundaryBiolekStyle}) {
        if (s == to_string(w)) {
            return w;
        }
    }
    fail(ErrorKind::Usage, "unknown window kind '" + s + "'");
}

ModelKind model_from_flag(const std::string& s) {
    if (s == "exponential") {
        return ModelKind::ExponentialDecay;
    }
    if (s == "power-law") {
        return ModelKind::PowerLawDecay;
    }
    if (s == "memristor") {
        return ModelKind::MemristorOde;
    }
    if (s == "rc") {
        return ModelKind::RcCircuit;
    }
    try {
        return model_kind_from_string(s);
    } catch (const Error&) {
        fail(ErrorKind::Usage, "unknown model '" + s + "' (exponential, power-law, memristor, rc)");
    }
}

bool constant_voltage(const Trace& trace) {
    const double v0 = trace.v.front();
    const double tol = 1e-6 * std::max(std::abs(v0), 1e-12);
    return std::all_of(trace.v.begin(), trace.v.end(), [&](double v) { return std::abs(v - v0) <= tol; });
}

// --- output -------------------------------------------------------------------

void write_curves(const std::vector<Curve>& curves, const fs::path& base, PlotFormat format) {
    if (format == PlotFormat::None) {
        return;
    }
    const std::string ext = format == PlotFormat::SvgPolyline ? ".svg" : ".csv";
    for (const auto& c : curves) {
        fs::path p = base;
        p.replace_filename(base.stem().string() + "." + c.name + ext);
        write_file_atomic(p, format == PlotFormat::SvgPolyline ? render_svg(c) : render_csv(c));
    }
}

void deliver(const Result& r, const Common& c, std::ostream& out) {
    const PlotFormat format = plot_format_from_string(c.plot);
    if (c.output.empty()) {
        if (format != PlotFormat::None) {
            fail(ErrorKind::Usage, "--plot needs --output to place the curve files");
        }
        out << r.report.dump(2) << "\n";
        return;
    }
    emit_report(r.report, r.curves, c.output, format);
}

int report_error(const std::exception& e, std::ostream& err, const std::string& prefix = "") {
    if (const auto* me = dynamic_cast<const Error*>(&e)) {
        err << "error[" << to_string(me->kind()) << "]: " << prefix << me->what() << "\n";
        return exit_code_for(me->kind());
    }
    if (dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr) {
        err << "error[Format]: " << prefix << e.what() << "\n";
        return 3;
    }
    err << "error: " << prefix << e.what() << "\n";
    return 1;
}

// Single file, or every *.csv of a directory processed concurrently.
int for_each_input(const Common& c, const TraceCommand& command, std::ostream& out, std::ostream& err) {
    if (c.input.empty()) {
        fail(ErrorKind::Usage, "--input is required");
    }
    const fs::path input(c.input);
    if (!fs::is_directory(input)) {
        deliver(command(ingest_trace(input)), c, out);
        return 0;
    }
    if (c.output.empty()) {
        fail(ErrorKind::Usage, "a directory --input needs a directory --output");
    }
    const PlotFormat format = plot_format_from_string(c.plot);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        fail(ErrorKind::Io, "no .csv files in '" + input.string() + "'");
    }
    fs::create_directories(c.output);

    std::vector<std::future<void>> jobs;
    for (const auto& file : files) {
        jobs.push_back(std::async(std::launch::async, [&, file] {
            const Result r = command(ingest_trace(file));
            emit_report(r.report, r.curves, fs::path(c.output) / (file.stem().string() + ".json"), format);
        }));
    }
    int status = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        try {
            jobs[k].get();
        } catch (const std::exception& e) {
            const int code = report_error(e, err, files[k].filename().string() + ": ");
            if (status == 0) {
                status = code;
            }
        }
    }
    return status;
}

// --- commands -----------------------------------------------------------------

struct SimulateArgs {
    std::string waveform;
    std::string topology;
    int substeps = 20;
    double noise_rel = 0.0;
    double noise_abs = 0.0;
    std::string device_id = "simulated";
    std::optional<double> electrode_width;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
    if (c.output.empty()) {
        fail(ErrorKind::Usage, "simulate needs --output for the trace CSV");
    }
    const WaveformSpec spec = waveform_spec_from_json(load_json_arg(a.waveform, "waveform"));
    const CircuitTopology topo = topology_from_json(load_json_arg(a.topology, "topology"));
    Trace trace = simulate(topo, build_schedule(spec), a.substeps);
    if (a.noise_rel > 0.0 || a.noise_abs > 0.0) {
        add_current_noise(trace, a.noise_rel, a.noise_abs, c.seed);
    }
    trace.meta.device_id = a.device_id;
    trace.meta.electrode_width_mm = a.electrode_width;
    trace.meta.source = TraceSource::Simulated;
    trace.meta.topology = topo;
    write_trace(trace, c.output);
    write_curves({vi_curve(trace, "vi"), it_curve(trace, "it")}, c.output, plot_format_from_string(c.plot));
    return 0;
}

struct AnalyzeArgs {
    double tail_window = 0.2;
    std::optional<double> v_bias;
    std::vector<int> dwell_indices;
    std::optional<int> levels_per_cycle;
};

Result analyze_trace(const Trace& trace, const AnalyzeArgs& a, const ClassifierConfig& cfg) {
    Result r;
    r.report["device_id"] = trace.meta.device_id;
    if (constant_voltage(trace)) {
        const SpikeFeatures f = extract_spike_features(trace, a.tail_window);
        const RcInference rc = infer_rc(f, a.v_bias.value_or(f.v_bias));
        r.report["experiment"] = "step_response";
        r.report["spike_features"] = to_json(f);
        r.report["rc_inference"] = to_json(rc);
        r.curves.push_back(it_curve(trace, "it"));
        return r;
    }
    r.report["experiment"] = "sweep";
    r.report["fingerprint"] = to_json(fingerprint(trace, cfg));
    r.report["lobe_areas"] = to_json(lobe_areas(trace));
    r.curves.push_back(vi_curve(trace, "vi"));
    if (trace.has_dwell_annotations()) {
        std::vector<int> indices = a.dwell_indices;
        if (indices.empty()) {
            const int max_dwell = *std::max_element(trace.dwell_index.begin(), trace.dwell_index.end());
            indices = {1};
            if (max_dwell > 2) {
                indices.push_back((max_dwell + 1) / 2);
            }
            if (max_dwell > 1) {
                indices.push_back(max_dwell);
            }
        }
        Json iso = Json::array();
        for (const auto& curve : iso_dwell_curves(trace, indices, a.levels_per_cycle)) {
            iso.push_back(to_json(curve));
            r.curves.push_back(vi_curve(curve.curve, "iso_dwell_" + std::to_string(curve.dwell_index)));
        }
        r.report["iso_dwell"] = iso;
    } else if (!a.dwell_indices.empty()) {
        fail(ErrorKind::NotSteppedTrace, "--dwell-indices needs a trace with level_index/dwell_index columns");
    }
    return r;
}

struct FitArgs {
    std::string model;
    std::vector<std::string> bounds;
    std::vector<std::string> frozen;
    std::optional<int> starts;
    std::optional<int> iterations;
    std::optional<int> substeps;
    std::optional<std::string> window;
    bool no_closed_form = false;
    bool no_ode = false;
    std::optional<double> indeterminacy_factor;
};

DiscriminationConfig fit_config(const Common& c, const FitArgs& a, const std::string& command) {
    DiscriminationConfig config;
    if (auto j = command_config(c, command)) {
        config = discrimination_config_from_json(*j);
    }
    config.ode.seed = c.seed;
    if (a.starts) {
        config.ode.starts = *a.starts;
    }
    if (a.iterations) {
        config.ode.lm.max_iterations = *a.iterations;
        config.closed_form.max_iterations = *a.iterations;
    }
    if (a.substeps) {
        config.ode.substeps = *a.substeps;
    }
    if (a.window) {
        config.memristor_model.window = window_from_string(*a.window);
    }
    if (a.indeterminacy_factor) {
        config.indeterminacy_factor = *a.indeterminacy_factor;
    }
    if (a.no_closed_form) {
        config.include_closed_form = false;
    }
    if (a.no_ode) {
        config.include_ode = false;
    }
    return config;
}

std::vector<double> predicted_current(const FitResult& fit, const Trace& trace, const SampleSchedule& schedule,
                                      WindowKind window, int substeps) {
    if (fit.model_kind == ModelKind::ExponentialDecay || fit.model_kind == ModelKind::PowerLawDecay) {
        const SpikeModel m = spike_model_from(fit);
        std::vector<double> out;
        for (double t : trace.t) {
            out.push_back(spike_current(m, t - trace.t.front()));
        }
        return out;
    }
    return simulate(topology_from(fit, window), schedule, substeps).i;
}

Result fit_trace(const Trace& trace, const FitArgs& a, DiscriminationConfig config) {
    const ModelKind kind = model_from_flag(a.model);
    const SampleSchedule schedule = schedule_from_trace(trace);
    FitResult fit;
    WindowKind window = WindowKind::None;
    if (kind == ModelKind::ExponentialDecay || kind == ModelKind::PowerLawDecay) {
        if (!a.bounds.empty() || !a.frozen.empty()) {
            fail(ErrorKind::Usage, "--bound/--freeze apply to ODE models only");
        }
        fit = fit_closed_form(trace,
                              kind == ModelKind::ExponentialDecay ? SpikeKind::ExponentialDecay
                                                                  : SpikeKind::PowerLawDecay,
                              std::nullopt, config.closed_form);
    } else {
        OdeModelSpec& spec = kind == ModelKind::MemristorOde ? config.memristor_model : config.rc_model;
        const std::string prefix = kind == ModelKind::MemristorOde ? "memristor" : "rc";
        for (const auto& s : a.bounds) {
            Assignment as = split_assignment(s, "--bound");
            if (!as.model.empty() && as.model != prefix) {
                continue;
            }
            set_bound(spec, as, "--bound");
        }
        for (const auto& s : a.frozen) {
            Assignment as = split_assignment(s, "--freeze");
            if (!as.model.empty() && as.model != prefix) {
                continue;
            }
            set_frozen(spec, as, "--freeze");
        }
        const DiscriminationConfig resolved = resolve_default_bounds(trace, config);
        const OdeModelSpec& final_spec =
            kind == ModelKind::MemristorOde ? resolved.memristor_model : resolved.rc_model;
        if (final_spec.free.empty()) {
            fail(ErrorKind::Usage, "no free parameters: give --bound or a config with 'free' bounds");
        }
        window = final_spec.window;
        fit = fit_ode_model(trace, schedule, final_spec, config.ode);
    }
    Result r;
    r.report = to_json(fit);
    r.curves.push_back(it_curve(trace, "it"));
    Curve model = it_curve(trace, "it_fit");
    model.y = predicted_current(fit, trace, schedule, window, config.ode.substeps);
    r.curves.push_back(std::move(model));
    return r;
}

Result discriminate_trace(const Trace& trace, const FitArgs& a, DiscriminationConfig config) {
    for (const auto& s : a.bounds) {
        const Assignment as = split_assignment(s, "--bound");
        set_bound(spec_for(config, as, "--bound"), as, "--bound");
    }
    for (const auto& s : a.frozen) {
        const Assignment as = split_assignment(s, "--freeze");
        set_frozen(spec_for(config, as, "--freeze"), as, "--freeze");
    }
    const DiscriminationReport report = discriminate(trace, schedule_from_trace(trace), config);
    Result r;
    r.report = to_json(report);
    r.report["device_id"] = trace.meta.device_id;
    r.curves.push_back(it_curve(trace, "it"));
    return r;
}

struct ClassifyArgs {
    std::optional<double> pinch_eps, area_eps, lin_eps, asym_eps, switch_eps;
    std::optional<int> min_samples;
    std::string evidence;
};

ClassifierConfig classifier_config(const Common& c, const ClassifyArgs& a, const std::string& command) {
    ClassifierConfig cfg;
    if (auto j = command_config(c, command)) {
        cfg = classifier_config_from_json(*j);
    }
    Json overrides = Json::object();
    auto put = [&](const char* key, const auto& v) {
        if (v) {
            overrides[key] = *v;
        }
    };
    put("pinch_eps", a.pinch_eps);
    put("area_eps", a.area_eps);
    put("lin_eps", a.lin_eps);
    put("asym_eps", a.asym_eps);
    put("switch_eps", a.switch_eps);
    put("min_samples", a.min_samples);
    return classifier_config_from_json(overrides, cfg);
}

FrequencyEvidence load_evidence(const std::string& arg) {
    FrequencyEvidence ev;
    if (arg.empty()) {
        return ev;
    }
    const fs::path p = resolve_path(arg, "evidence file");
    const Json j = parse_json(read_file(p), p.string());
    if (!j.is_array()) {
        fail(ErrorKind::Format, p.string() + ": evidence must be an array of [frequency, area] pairs");
    }
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            fail(ErrorKind::Format, p.string() + ": evidence entries must be [frequency, area]");
        }
        ev.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return ev;
}

struct SweepArgs {
    std::string waveform;
    std::string topology;
    std::vector<double> multipliers = {1, 3, 10, 30, 100};
    int substeps = 10;
};

int cmd_freq_sweep(const Common& c, const SweepArgs& a, std::ostream& out) {
    const WaveformSpec spec = waveform_spec_from_json(load_json_arg(a.waveform, "waveform"));
    const CircuitTopology topo = topology_from_json(load_json_arg(a.topology, "topology"));
    const auto points = frequency_sweep(topo, spec, a.multipliers, a.substeps);
    bool decreasing = true;
    for (std::size_t k = 1; k < points.size(); ++k) {
        decreasing = decreasing && points[k].area < points[k - 1].area;
    }
    Result r;
    r.report["points"] = to_json(points);
    r.report["strictly_decreasing"] = decreasing;
    r.report["area_ratio_last_to_first"] =
        points.front().area > 0.0 ? Json(points.back().area / points.front().area) : Json(nullptr);
    Curve curve{"area_vs_frequency", "frequency_Hz", "area_VA", {}, {}};
    for (const auto& p : points) {
        curve.x.push_back(p.frequency);
        curve.y.push_back(p.area);
    }
    r.curves.push_back(std::move(curve));
    deliver(r, c, out);
    return 0;
}

struct WidthArgs {
    std::optional<double> cv_threshold;
};

int cmd_width_study(const Common& c, const WidthArgs& a, std::ostream& out) {
    if (c.input.empty()) {
        fail(ErrorKind::Usage, "width-study needs --input <manifest.json>");
    }
    double threshold = ClassifierConfig{}.cv_threshold;
    if (auto j = command_config(c, "width-study")) {
        threshold = classifier_config_from_json(*j).cv_threshold;
    }
    if (a.cv_threshold) {
        threshold = *a.cv_threshold;
    }
    const fs::path manifest_path = resolve_path(c.input, "manifest");
    const Json manifest = parse_json(read_file(manifest_path), manifest_path.string());
    if (!manifest.is_object() || !manifest.contains("devices") || !manifest["devices"].is_array()) {
        fail(ErrorKind::Format, manifest_path.string() + ": manifest needs a 'devices' array");
    }
    const fs::path base = manifest_path.parent_path();
    std::vector<double> widths, measured, predicted;
    std::vector<Trace> measured_traces, predicted_traces;
    bool from_traces = false;
    for (const auto& d : manifest["devices"]) {
        if (!d.is_object() || !d.contains("electrode_width_mm") || !d["electrode_width_mm"].is_number()) {
            fail(ErrorKind::Format, "every device needs a numeric 'electrode_width_mm'");
        }
        widths.push_back(d["electrode_width_mm"].get<double>());
        if (d.contains("measured") && d.contains("predicted")) {
            from_traces = true;
            Trace m = ingest_trace(base / d["measured"].get<std::string>());
            m.meta.electrode_width_mm = widths.back();
            measured_traces.push_back(std::move(m));
            predicted_traces.push_back(ingest_trace(base / d["predicted"].get<std::string>()));
        } else if (d.contains("measured_area") && d.contains("predicted_area")) {
            measured.push_back(d["measured_area"].get<double>());
            predicted.push_back(d["predicted_area"].get<double>());
        } else {
            fail(ErrorKind::Format,
                 "each device needs measured/predicted trace paths or measured_area/predicted_area");
        }
    }
    if (from_traces && !measured.empty()) {
        fail(ErrorKind::Format, "a manifest must use either trace paths or areas for every device");
    }
    const WidthStudyResult result = from_traces
                                        ? width_study(measured_traces, predicted_traces, threshold)
                                        : width_study_from_areas(widths, measured, predicted, threshold);
    Result r;
    r.report = to_json(result);
    Curve curve{"ratio_vs_width", "electrode_width_mm", "ratio", {}, {}};
    for (const auto& d : result.devices) {
        curve.x.push_back(d.electrode_width_mm);
        curve.y.push_back(d.ratio);
    }
    r.curves.push_back(std::move(curve));
    deliver(r, c, out);
    return 0;
}

void add_common(CLI::App* app, Common& c, bool input = true) {
    if (input) {
        app->add_option("-i,--input", c.input, "Input trace CSV, or a directory of them");
    }
    app->add_option("-o,--output", c.output, "Output path (JSON report, or CSV for simulate)");
    app->add_option("-c,--config", c.config, "Config JSON file or inline JSON");
    app->add_option("--seed", c.seed, "Seed for noise and multi-start fits");
    app->add_option("--plot", c.plot, "Curve files: none, svg or csv")
        ->check(CLI::IsMember({"none", "svg", "csv"}));
}

void add_fit_options(CLI::App* app, FitArgs& f) {
    app->add_option("--bound", f.bounds, "Free parameter range, [model.]name=lower:upper");
    app->add_option("--freeze", f.frozen, "Fixed parameter value, [model.]name=value");
    app->add_option("--starts", f.starts, "Multi-start count for ODE fits");
    app->add_option("--iterations", f.iterations, "Iteration budget per start");
    app->add_option("--substeps", f.substeps, "RK4 substeps per sample");
    app->add_option("--window", f.window, "Memristor window kind");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Memristor / RC discrimination toolkit", "memdiscern"};
    app.require_subcommand(1);
    Common common;
    std::function<int()> action;

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a circuit under a waveform");
    add_common(simulate_cmd, common, false);
    simulate_cmd->add_option("--waveform", sim.waveform, "Waveform spec JSON (file or inline)")->required();
    simulate_cmd->add_option("--topology", sim.topology, "Circuit topology JSON (file or inline)")->required();
    simulate_cmd->add_option("--substeps", sim.substeps, "RK4 substeps per sample")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--noise-rel", sim.noise_rel, "Gaussian current noise, fraction of |i|");
    simulate_cmd->add_option("--noise-abs", sim.noise_abs, "Gaussian current noise floor, amperes");
    simulate_cmd->add_option("--device-id", sim.device_id, "Device id stored in the sidecar");
    simulate_cmd->add_option("--electrode-width", sim.electrode_width, "Electrode width in mm");
    simulate_cmd->callback([&] { action = [&] { return cmd_simulate(common, sim); }; });

    AnalyzeArgs an;
    ClassifyArgs an_thresholds;
    auto* analyze_cmd = app.add_subcommand("analyze", "Spike features, RC inference or loop fingerprint");
    add_common(analyze_cmd, common);
    analyze_cmd->add_option("--tail-window", an.tail_window, "Trailing fraction used for the asymptote");
    analyze_cmd->add_option("--v-bias", an.v_bias, "Bias voltage for RC inference");
    analyze_cmd->add_option("--dwell-indices", an.dwell_indices, "Iso-dwell positions (1-based)")
        ->delimiter(',');
    analyze_cmd->add_option("--levels-per-cycle", an.levels_per_cycle, "Plateaus per sweep cycle");
    analyze_cmd->callback([&] {
        action = [&] {
            const ClassifierConfig cfg = classifier_config(common, an_thresholds, "analyze");
            return for_each_input(
                common, [&](const Trace& t) { return analyze_trace(t, an, cfg); }, out, err);
        };
    });

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one model to a trace");
    add_common(fit_cmd, common);
    fit_cmd->add_option("--model", fit.model, "exponential, power-law, memristor or rc")->required();
    add_fit_options(fit_cmd, fit);
    fit_cmd->callback([&] {
        action = [&] {
            const DiscriminationConfig config = fit_config(common, fit, "fit");
            return for_each_input(
                common, [&](const Trace& t) { return fit_trace(t, fit, config); }, out, err);
        };
    });

    FitArgs disc;
    auto* disc_cmd = app.add_subcommand("discriminate", "Fit all models and rank them");
    add_common(disc_cmd, common);
    add_fit_options(disc_cmd, disc);
    disc_cmd->add_option("--indeterminacy-factor", disc.indeterminacy_factor,
                         "SSR ratio needed for a verdict");
    disc_cmd->add_flag("--no-closed-form", disc.no_closed_form, "Skip the closed-form spike fits");
    disc_cmd->add_flag("--no-ode", disc.no_ode, "Skip the circuit model fits");
    disc_cmd->callback([&] {
        action = [&] {
            const DiscriminationConfig config = fit_config(common, disc, "discriminate");
            return for_each_input(
                common, [&](const Trace& t) { return discriminate_trace(t, disc, config); }, out, err);
        };
    });

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("freq-sweep", "Lobe area versus drive frequency");
    add_common(sweep_cmd, common, false);
    sweep_cmd->add_option("--waveform", sweep.waveform, "Base periodic waveform JSON")->required();
    sweep_cmd->add_option("--topology", sweep.topology, "Circuit topology JSON")->required();
    sweep_cmd->add_option("--multipliers", sweep.multipliers, "Frequency multipliers")->delimiter(',');
    sweep_cmd->add_option("--substeps", sweep.substeps, "RK4 substeps per sample")->check(CLI::PositiveNumber);
    sweep_cmd->callback([&] { action = [&] { return cmd_freq_sweep(common, sweep, out); }; });

    ClassifyArgs cls;
    auto* classify_cmd = app.add_subcommand("classify", "Fingerprint and label a V-I loop");
    add_common(classify_cmd, common);
    classify_cmd->add_option("--pinch-eps", cls.pinch_eps);
    classify_cmd->add_option("--area-eps", cls.area_eps);
    classify_cmd->add_option("--lin-eps", cls.lin_eps);
    classify_cmd->add_option("--asym-eps", cls.asym_eps);
    classify_cmd->add_option("--switch-eps", cls.switch_eps);
    classify_cmd->add_option("--min-samples", cls.min_samples);
    classify_cmd->add_option("--evidence", cls.evidence, "JSON array of [frequency, area] pairs");
    classify_cmd->callback([&] {
        action = [&] {
            const ClassifierConfig cfg = classifier_config(common, cls, "classify");
            const FrequencyEvidence evidence = load_evidence(cls.evidence);
            return for_each_input(
                common,
                [&](const Trace& t) {
                    Result r;
                    r.report = to_json(fingerprint(t, cfg, evidence));
                    r.curves.push_back(vi_curve(t, "vi"));
                    return r;
                },
                out, err);
        };
    });

    WidthArgs width;
    auto* width_cmd = app.add_subcommand("width-study", "Measured over predicted hysteresis per device");
    add_common(width_cmd, common);
    width_cmd->add_option("--cv-threshold", width.cv_threshold, "Largest CV counted as a constant ratio");
    width_cmd->callback([&] { action = [&] { return cmd_width_study(common, width, out); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error[Usage]: " << e.what() << "\n";
        if (const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
            err << "run '" << sub->get_name() << " --help' for usage\n";
        }
        return 2;
    }

    try {
        return action ? action() : 2;
    } catch (const std::exception& e) {
        return report_error(e, err);
    }
}

}  // namespace memdiscern::cli
