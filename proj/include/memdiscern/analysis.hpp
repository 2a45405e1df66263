#pragma once

#include "memdiscern/circuit_models.hpp"
#include "memdiscern/trace.hpp"
#include "memdiscern/waveform.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace memdiscern {

enum class SpikePolarity { Positive, Negative };

struct SpikeFeatures {
    double i_peak = 0.0;
    double i_inf = 0.0;
    double tau_1e = 0.0;  // seconds after the peak sample
    SpikePolarity polarity = SpikePolarity::Positive;
    double tail_window = 0.2;
    double t_peak = 0.0;
    double v_bias = 0.0;
};

struct RcInference {
    double r_parallel = 0.0;
    double c_parallel = 0.0;
    double v_bias = 0.0;
};

struct LobeAreas {
    double pos = 0.0;  // V*A per cycle, v >= 0 half-plane
    double neg = 0.0;  // V*A per cycle, v <= 0 half-plane
    int cycles = 1;
    bool open_curve = false;

    double total() const { return pos + neg; }
};

enum class CurveClass { Ohmic, Capacitive, JellyBeanOpen, CurvedMemristor, Triangular, Unclassified };

struct ClassifierConfig {
    double pinch_eps = 0.02;   // fraction of peak |I|
    double area_eps = 1e-4;    // fraction of the max|V| * max|I| envelope
    double lin_eps = 0.01;     // RMS residual of a straight-line fit, fraction of peak |I|
    double asym_eps = 0.1;     // |lobe ratio - 1| still counted as symmetric
    double switch_eps = 5.0;   // slope jump, in units of max|I| / max|V|
    int min_samples = 16;
    double cv_threshold = 0.15;  // width study
};

// Area-versus-frequency data for the trace being classified.
using FrequencyEvidence = std::vector<std::pair<double, double>>;

struct FingerprintReport {
    std::vector<double> crossing_offsets;
    bool pinched = true;
    double lobe_area_pos = 0.0;
    double lobe_area_neg = 0.0;
    double asymmetry = 1.0;  // +inf when only the positive lobe is present
    CurveClass curve_class = CurveClass::Unclassified;
    // Diagnostics behind the decision.
    double peak_current = 0.0;
    double linear_residual = 0.0;
    double max_slope_jump = 0.0;
    int cycles = 1;
    bool open_curve = false;
};

struct IsoDwellCurve {
    int dwell_index = 1;
    double effective_frequency = 0.0;  // Hz
    Trace curve;
    LobeAreas areas;
};

struct FrequencyPoint {
    double multiplier = 1.0;
    double frequency = 0.0;  // Hz
    double area = 0.0;       // total lobe area of one steady cycle
};

struct WidthStudyDevice {
    double electrode_width_mm = 0.0;
    double measured_area = 0.0;
    double predicted_area = 0.0;
    double ratio = 0.0;
};

struct WidthStudyResult {
    std::vector<WidthStudyDevice> devices;
    double ratio_mean = 0.0;
    double ratio_cv = 0.0;
    bool constant_ratio = false;
    double cv_threshold = 0.15;
};

struct CapacitanceEstimateOptions {
    double r_series = 0.0;
    std::optional<double> r_leak;
    int substeps = 10;
    int max_iterations = 200;
};

const char* to_string(CurveClass c);
CurveClass curve_class_from_string(const std::string& s);

SpikeFeatures extract_spike_features(const Trace& trace, double tail_window = 0.2);

RcInference infer_rc(const SpikeFeatures& features, double v_bias);

std::vector<double> crossing_offsets(const Trace& trace);

LobeAreas lobe_areas(const Trace& trace);

// Indices are 1-based dwell positions; levels_per_cycle is inferred from the
// trace when not supplied.
std::vector<IsoDwellCurve> iso_dwell_curves(const Trace& trace, const std::vector<int>& indices,
                                            std::optional<int> levels_per_cycle = std::nullopt);

std::vector<FrequencyPoint> frequency_sweep(const CircuitTopology& topology,
                                            const WaveformSpec& base,
                                            const std::vector<double>& multipliers,
                                            int substeps = 10);

FingerprintReport fingerprint(const Trace& trace, const ClassifierConfig& config = {},
                              const FrequencyEvidence& evidence = {});

CurveClass classify(const Trace& trace, const ClassifierConfig& config = {},
                    const FrequencyEvidence& evidence = {});

WidthStudyResult width_study(const std::vector<Trace>& measured,
                             const std::vector<Trace>& predicted, double cv_threshold = 0.15);

WidthStudyResult width_study_from_areas(const std::vector<double>& widths_mm,
                                        const std::vector<double>& measured_areas,
                                        const std::vector<double>& predicted_areas,
                                        double cv_threshold = 0.15);

double estimate_parallel_capacitance(const Trace& measured, const MemristorParams& memristor_fit,
                                     const SampleSchedule& schedule,
                                     const CapacitanceEstimateOptions& options = {});

}  // namespace memdiscern
