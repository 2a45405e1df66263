#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace memdiscern {
namespace {

double max_abs(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// RMS residual of the least-squares line i = g*v + b.
double line_fit_rms(const Trace& trace) {
    const double n = static_cast<double>(trace.size());
    double sv = 0.0, si = 0.0, svv = 0.0, svi = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        sv += trace.v[k];
        si += trace.i[k];
        svv += trace.v[k] * trace.v[k];
        svi += trace.v[k] * trace.i[k];
    }
    const double denom = n * svv - sv * sv;
    double g = 0.0;
    double b = si / n;
    if (denom > 0.0) {
        g = (n * svi - sv * si) / denom;
        b = (si - g * sv) / n;
    }
    double ss = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double r = trace.i[k] - (g * trace.v[k] + b);
        ss += r * r;
    }
    return std::sqrt(ss / n);
}

// Largest change of dI/dV between consecutive sweep segments of the same
// monotone run, in units of the chord slope max|I| / max|V|. Segments span
// kSegmentsPerPeak-th of the peak voltage so that turning points, where dV
// shrinks to nothing, do not masquerade as switching events.
constexpr double kSegmentsPerPeak = 16.0;

double max_slope_jump(const Trace& trace, double v_peak, double i_peak) {
    if (v_peak == 0.0 || i_peak == 0.0 || trace.size() < 3) {
        return 0.0;
    }
    const double chord = i_peak / v_peak;
    const double seg = v_peak / kSegmentsPerPeak;
    double worst = 0.0;
    std::size_t a = 0;
    int run_dir = 0;
    bool have_prev = false;
    double prev_slope = 0.0;
    auto close_segment = [&](std::size_t b, bool partial) {
        const double dv = trace.v[b] - trace.v[a];
        if (partial && std::abs(dv) < 0.25 * seg) {
            return;
        }
        const double slope = (trace.i[b] - trace.i[a]) / dv;
        if (have_prev) {
            worst = std::max(worst, std::abs(slope - prev_slope) / chord);
        }
        have_prev = true;
        prev_slope = slope;
    };
    for (std::size_t k = 1; k < trace.size(); ++k) {
        const double step = trace.v[k] - trace.v[k - 1];
        if (step == 0.0) {
            continue;
        }
        const int dir = step > 0.0 ? 1 : -1;
        if (run_dir != 0 && dir != run_dir) {
            // Turning point: finish the run and start a fresh one.
            if (k - 1 != a) {
                close_segment(k - 1, true);
            }
            have_prev = false;
            a = k - 1;
        }
        run_dir = dir;
        if (std::abs(trace.v[k] - trace.v[a]) >= seg) {
            close_segment(k, false);
            a = k;
        }
    }
    return worst;
}

bool area_grows(const FrequencyEvidence& evidence) {
    FrequencyEvidence sorted = evidence;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (!(sorted[k].second > sorted[k - 1].second)) {
            return false;
        }
    }
    return true;
}

}  // namespace

const char* to_string(CurveClass c) {
    switch (c) {
        case CurveClass::Ohmic: return "Ohmic";
        case CurveClass::Capacitive: return "Capacitive";
        case CurveClass::JellyBeanOpen: return "JellyBeanOpen";
        case CurveClass::CurvedMemristor: return "CurvedMemristor";
        case CurveClass::Triangular: return "Triangular";
        case CurveClass::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

CurveClass curve_class_from_string(const std::string& s) {
    for (CurveClass c : {CurveClass::Ohmic, CurveClass::Capacitive, CurveClass::JellyBeanOpen,
                         CurveClass::CurvedMemristor, CurveClass::Triangular,
                         CurveClass::Unclassified}) {
        if (s == to_string(c)) {
            return c;
        }
    }
    fail(ErrorKind::Format, "unknown curve class '" + s + "'");
}

FingerprintReport fingerprint(const Trace& trace, const ClassifierConfig& config,
                              const FrequencyEvidence& evidence) {
    if (static_cast<int>(trace.size()) < config.min_samples) {
        fail(ErrorKind::InsufficientData, "classification needs at least " +
                                              std::to_string(config.min_samples) + " samples, got " +
                                              std::to_string(trace.size()));
    }
    validate(trace);

    FingerprintReport r;
    r.crossing_offsets = crossing_offsets(trace);
    const LobeAreas areas = lobe_areas(trace);
    r.lobe_area_pos = areas.pos;
    r.lobe_area_neg = areas.neg;
    r.cycles = areas.cycles;
    r.open_curve = areas.open_curve;
    if (areas.neg > 0.0) {
        r.asymmetry = areas.pos / areas.neg;
    } else {
        r.asymmetry = areas.pos > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }

    const double v_peak = max_abs(trace.v);
    r.peak_current = max_abs(trace.i);
    r.pinched = std::all_of(r.crossing_offsets.begin(), r.crossing_offsets.end(), [&](double o) {
        return std::abs(o) <= config.pinch_eps * r.peak_current;
    });
    r.linear_residual = r.peak_current > 0.0 ? line_fit_rms(trace) / r.peak_current : 0.0;
    r.max_slope_jump = max_slope_jump(trace, v_peak, r.peak_current);

    const double envelope = v_peak * r.peak_current;
    const bool negligible_area = areas.total() < config.area_eps * envelope;

    if (negligible_area && r.linear_residual < config.lin_eps) {
        r.curve_class = CurveClass::Ohmic;
    } else if (!r.pinched) {
        const bool symmetric = std::abs(r.asymmetry - 1.0) <= config.asym_eps;
        if (r.open_curve) {
            r.curve_class = CurveClass::Unclassified;
        } else if (symmetric) {
            r.curve_class = evidence.empty() || area_grows(evidence) ? CurveClass::Capacitive
                                                                     : CurveClass::Unclassified;
        } else {
            r.curve_class = CurveClass::JellyBeanOpen;
        }
    } else if (r.max_slope_jump > config.switch_eps) {
        r.curve_class = CurveClass::Triangular;
    } else if (!negligible_area) {
        r.curve_class = CurveClass::CurvedMemristor;
    } else {
        r.curve_class = CurveClass::Unclassified;
    }
    return r;
}

CurveClass classify(const Trace& trace, const ClassifierConfig& config,
                    const FrequencyEvidence& evidence) {
    return fingerprint(trace, config, evidence).curve_class;
}

}  // namespace memdiscern
