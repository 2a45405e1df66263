// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "cli.hpp"
#include "oracles.hpp"

#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"
#include "memdiscern/fitting.hpp"
#include "memdiscern/io.hpp"
#include "memdiscern/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace memdiscern;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("memdiscern_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

Json run_cli_json(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    if (rc != 0) {
        throw std::runtime_error("cli exit " + std::to_string(rc) + ": " + err.str());
    }
    return Json::parse(out.str());
}

MemristorParams base_memristor() {
    MemristorParams m;
    m.r_on = 100.0;
    m.r_off = 16000.0;
    m.k = 1e4;
    m.x0 = 0.1;
    return m;
}

// 1 -------------------------------------------------------------------------
Outcome williams_rc() {
    Trace trace;
    const SpikeModel model = SpikeModel::exponential(10e-9, 2.7e-9, 5.0);
    for (int k = 0; k <= 2000; ++k) {
        const double t = 0.1 * k;
        trace.push_back(t, 0.1, spike_current(model, t));
    }
    const fs::path csv = scratch_dir() / "williams.csv";
    write_trace(trace, csv);
    const Json report = run_cli_json({"analyze", "--input", csv.string()});
    const double r = report["rc_inference"]["r_parallel"].get<double>();
    const double c = report["rc_inference"]["c_parallel"].get<double>();
    const bool ok = std::abs(r / 37.0e6 - 1.0) <= 0.01 && std::abs(c / 135e-9 - 1.0) <= 0.02;
    return {ok, fmt("r_parallel=%.4g ohm (37.0M +-1%%), c_parallel=%.4g F (135n +-2%%)", r, c)};
}

// 2 -------------------------------------------------------------------------
Outcome chua_frequency_effect() {
    const auto topo = CircuitTopology::memristor_only(base_memristor());
    const auto base = WaveformSpec::sine(1.0, 1.0, 1e-3);
    const auto points = frequency_sweep(topo, base, {1, 3, 10, 30, 100}, 10);
    bool decreasing = true;
    for (std::size_t k = 1; k < points.size(); ++k) {
        decreasing = decreasing && points[k].area < points[k - 1].area;
    }
    const double ratio = points.back().area / points.front().area;
    return {decreasing && ratio < 0.01,
            fmt("areas %.3g -> %.3g, strictly decreasing=%g, area(100x)/area(1x)=%.4f (< 0.01)",
                points.front().area, points.back().area, decreasing ? 1.0 : 0.0, ratio)};
}

// 3 -------------------------------------------------------------------------
Outcome iso_dwell() {
    CircuitTopology topo = CircuitTopology::memristor_only(base_memristor());
    topo.c_parallel = 3e-6;
    topo.r_series = 1000.0;
    const auto spec = WaveformSpec::stepped_triangle(-1.0, 1.0, 0.25, 12, 1e-3);
    const Trace trace = simulate(topo, build_schedule(spec), 20);
    const auto curves = iso_dwell_curves(trace, {1, 6, 12});
    const double a1 = curves[0].areas.total(), a6 = curves[1].areas.total(), a12 = curves[2].areas.total();
    return {a1 > a6 && a6 > a12, fmt("areas idx1=%.4g > idx6=%.4g > idx12=%.4g", a1, a6, a12)};
}

// 4 -------------------------------------------------------------------------
Outcome pinched_vs_offset() {
    const double amplitude = 1.0, period = 1.0, c = 1e-6;
    const auto schedule = build_schedule(WaveformSpec::sine(amplitude, period, 1e-3, 2.0));
    const Trace bare = simulate(CircuitTopology::memristor_only(base_memristor()), schedule, 10);
    double worst_pinch = 0.0;
    for (double o : crossing_offsets(bare)) {
        worst_pinch = std::max(worst_pinch, std::abs(o));
    }
    CircuitTopology with_c = CircuitTopology::memristor_only(base_memristor());
    with_c.c_parallel = c;
    const Trace loaded = simulate(with_c, schedule, 10);
    const auto offsets = crossing_offsets(loaded);
    const double expected = c * 2.0 * std::numbers::pi * amplitude / period;
    double worst_rel = 0.0;
    for (double o : offsets) {
        worst_rel = std::max(worst_rel, std::abs(std::abs(o) / expected - 1.0));
    }
    const bool ok = worst_pinch < 1e-12 && !offsets.empty() && worst_rel <= 0.05;
    return {ok, fmt("max |I(V=0)| bare=%.3g A (< 1e-12); with C: %g crossings, max |offset/(C dV/dt) - 1|=%.3g",
                    worst_pinch, static_cast<double>(offsets.size()), worst_rel)};
}

// 5 -------------------------------------------------------------------------
Outcome discrimination_ordering() {
    const SpikeModel truth = SpikeModel::power_law(1e-9, 0.5, 0.0, 0.1);
    double worst = INFINITY;
    int failures = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Trace trace;
        for (int k = 0; k <= 1000; ++k) {
            const double t = 0.1 * k;
            trace.push_back(t, 0.1, spike_current(truth, t));
        }
        add_current_noise(trace, 0.01, 0.0, seed);
        DiscriminationConfig config;
        config.include_ode = false;
        const auto report = discriminate(trace, schedule_from_trace(trace), config);
        double ssr_exp = NAN, ssr_pl = NAN;
        for (const auto& f : report.fits) {
            (f.model_kind == ModelKind::ExponentialDecay ? ssr_exp : ssr_pl) = f.ssr;
        }
        const double ratio = ssr_exp / ssr_pl;
        worst = std::min(worst, ratio);
        if (!(ratio >= 10.0) || report.verdict != Verdict::MemristorLike) {
            ++failures;
        }
    }
    return {failures == 0, fmt("min SSR(exp)/SSR(power law) over 10 seeds = %.4g (>= 10), failing seeds=%g",
                               worst, failures)};
}

// 6 -------------------------------------------------------------------------
Outcome round_trip() {
    MemristorParams m = base_memristor();
    m.k = 2.5e4;
    m.x0 = 0.3;
    CircuitTopology topo = CircuitTopology::memristor_only(m);
    topo.r_series = 500.0;
    const auto schedule = build_schedule(WaveformSpec::sine(1.0, 1.0, 2e-3));
    const Trace trace = simulate(topo, schedule, 10);

    OdeModelSpec spec = OdeModelSpec::of_kind(ModelKind::MemristorOde);
    spec.frozen = {{"r_on", m.r_on}, {"r_off", m.r_off}, {"r_series", 500.0}};
    spec.free = {{"k", 1e3, 1e6}, {"x0", 0.01, 0.99}};
    OdeFitOptions options;
    options.starts = 8;
    const FitResult fit = fit_ode_model(trace, schedule, spec, options);
    const double ek = std::abs(fit.param("k") / m.k - 1.0);
    const double ex = std::abs(fit.param("x0") / m.x0 - 1.0);
    return {ek <= 0.02 && ex <= 0.02,
            fmt("k=%.6g (true 2.5e4, err %.2g), x0=%.6g (true 0.3, err %.2g)", fit.param("k"), ek,
                fit.param("x0"), ex)};
}

// 7 -------------------------------------------------------------------------
Outcome width_constant_ratio() {
    std::vector<Trace> measured, predicted;
    const std::vector<double> widths = {0.5, 1.0, 2.0, 4.0, 8.0};
    for (double w : widths) {
        MemristorParams m = base_memristor();
        m.k = 1e4 * w;
        Trace p = simulate(CircuitTopology::memristor_only(m), build_schedule(WaveformSpec::sine(1.0, 1.0, 1e-3)), 10);
        Trace q = p;
        for (double& i : q.i) {
            i *= 2.0;
        }
        q.meta.electrode_width_mm = w;
        measured.push_back(q);
        predicted.push_back(p);
    }
    const auto constant = width_study(measured, predicted);
    std::vector<Trace> growing = measured;
    for (std::size_t d = 0; d < growing.size(); ++d) {
        for (double& i : growing[d].i) {
            i *= std::pow(2.0, static_cast<double>(d));
        }
    }
    const auto doubling = width_study(growing, predicted);
    const bool ok = std::abs(constant.ratio_mean - 2.0) <= 1e-9 && constant.constant_ratio &&
                    !doubling.constant_ratio;
    return {ok, fmt("ratio_mean=%.12g, constant=%g; doubling ratios constant=%g (cv=%.3g)", constant.ratio_mean,
                    constant.constant_ratio ? 1.0 : 0.0, doubling.constant_ratio ? 1.0 : 0.0, doubling.ratio_cv)};
}

// 8 -------------------------------------------------------------------------
Outcome simulator_oracles() {
    oracle::EulerCircuit p;
    p.c = 1e-5;
    p.r_series = 100.0;
    const double amplitude = 1.0, period = 1.0, dt = 1e-3;
    CircuitTopology topo = CircuitTopology::memristor_only(base_memristor());
    topo.c_parallel = p.c;
    topo.r_series = p.r_series;
    const auto schedule = build_schedule(WaveformSpec::triangle(amplitude, period, dt));
    constexpr int substeps = 10;
    const Trace rk4 = simulate(topo, schedule, substeps);
    // Euler step 1000x finer than the RK4 step.
    const auto euler = oracle::euler_current(
        p, [&](double t) { return oracle::triangle_wave(amplitude, period, t); }, dt, schedule.size(),
        1000L * substeps);
    double peak = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < rk4.size(); ++k) {
        peak = std::max(peak, std::abs(euler[k]));
        diff = std::max(diff, std::abs(rk4.i[k] - euler[k]));
    }
    const double rel_mem = diff / peak;

    const double v = 0.1, rs = 1e7, rl = 3.7e7, c = 1.35e-7;
    const Trace step = dc_step_response(CircuitTopology::leaky_capacitor(rs, rl, c), v, 60.0, 0.1, 20);
    double rel_rc = 0.0;
    for (std::size_t k = 0; k < step.size(); ++k) {
        const double ref = oracle::rc_step_current(v, rs, rl, c, step.t[k]);
        rel_rc = std::max(rel_rc, std::abs(step.i[k] - ref) / std::abs(ref));
    }
    return {rel_mem <= 1e-4 && rel_rc <= 1e-6,
            fmt("memristor||C vs Euler: max rel %.3g (<= 1e-4); RC step vs closed form: max rel %.3g (<= 1e-6)",
                rel_mem, rel_rc)};
}

// 9 -------------------------------------------------------------------------
Outcome classifier_ground_truth() {
    const auto sine = build_schedule(WaveformSpec::sine(1.0, 1.0, 1e-3));
    const auto low_sine = build_schedule(WaveformSpec::sine(0.2, 1.0, 1e-3));

    CircuitTopology jelly = CircuitTopology::memristor_only(base_memristor());
    jelly.c_parallel = 1e-6;
    CircuitTopology cap;
    cap.c_parallel = 1e-5;
    cap.r_leak = 1e4;

    struct Case {
        const char* name;
        CurveClass expected;
        Trace trace;
    };
    const std::vector<Case> cases = {
        {"Ohmic", CurveClass::Ohmic, simulate(CircuitTopology::resistor(1000.0), sine, 10)},
        {"CurvedMemristor", CurveClass::CurvedMemristor,
         simulate(CircuitTopology::memristor_only(base_memristor()), sine, 10)},
        {"JellyBeanOpen", CurveClass::JellyBeanOpen, simulate(jelly, low_sine, 10)},
        {"Capacitive", CurveClass::Capacitive, simulate(cap, sine, 10)},
    };
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const CurveClass got = classify(c.trace);
        ok = ok && got == c.expected;
        detail += std::string(detail.empty() ? "" : ", ") + c.name + "->" + to_string(got);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "Williams RC reproduction", 1.0, williams_rc},
        {2, "Chua fingerprint / frequency effect", 10.0, chua_frequency_effect},
        {3, "Iso-dwell reconstruction", 10.0, iso_dwell},
        {4, "Pinched vs offset crossing", 5.0, pinched_vs_offset},
        {5, "Discrimination ordering", 30.0, discrimination_ordering},
        {6, "Round-trip parameter recovery", 60.0, round_trip},
        {7, "Constant-ratio width study", 5.0, width_constant_ratio},
        {8, "Simulator oracle equivalence", 30.0, simulator_oracles},
        {9, "Classifier ground truth", 10.0, classifier_ground_truth},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("[%s] criterion %d: %s: %s; runtime %.3f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                    c.name, o.detail.c_str(), secs, c.limit_s, in_time ? "" : " EXCEEDED");
        std::fflush(stdout);
    }
    std::error_code ec;
    fs::remove_all(scratch_dir(), ec);
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
