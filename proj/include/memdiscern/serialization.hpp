#pragma once

#include "memdiscern/analysis.hpp"
#include "memdiscern/circuit_models.hpp"
#include "memdiscern/fitting.hpp"
#include "memdiscern/trace.hpp"
#include "memdiscern/waveform.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace memdiscern {

using Json = nlohmann::ordered_json;

// Readers throw ErrorKind::Format for wrong types, missing required fields
// and unknown fields, then run the type's own validation.

Json to_json(const WaveformSpec& spec);
WaveformSpec waveform_spec_from_json(const Json& j);

Json to_json(const MemristorParams& params);
MemristorParams memristor_params_from_json(const Json& j);

Json to_json(const CircuitTopology& topology);
CircuitTopology topology_from_json(const Json& j);

Json to_json(const SpikeModel& model);
SpikeModel spike_model_from_json(const Json& j);

Json to_json(const TraceMeta& meta);
TraceMeta trace_meta_from_json(const Json& j);

Json to_json(const ClassifierConfig& config);
ClassifierConfig classifier_config_from_json(const Json& j);
// Overlays the fields present in `j` onto `base`.
ClassifierConfig classifier_config_from_json(const Json& j, ClassifierConfig base);

Json to_json(const LmOptions& options);
Json to_json(const OdeModelSpec& spec);
Json to_json(const DiscriminationConfig& config);
DiscriminationConfig discrimination_config_from_json(const Json& j);
DiscriminationConfig discrimination_config_from_json(const Json& j, DiscriminationConfig base);

Json to_json(const SpikeFeatures& features);
Json to_json(const RcInference& rc);
Json to_json(const LobeAreas& areas);
Json to_json(const FingerprintReport& report);
Json to_json(const IsoDwellCurve& curve);  // areas and frequency, not samples
Json to_json(const std::vector<FrequencyPoint>& points);
Json to_json(const WidthStudyResult& result);
Json to_json(const FitResult& fit);
FitResult fit_result_from_json(const Json& j);
Json to_json(const DiscriminationReport& report);

// Enum names as they appear in files.
const char* to_string(WaveformKind kind);
const char* to_string(Polarity polarity);
const char* to_string(WindowKind kind);
const char* to_string(SpikeKind kind);
const char* to_string(SpikePolarity polarity);
const char* to_string(TraceSource source);

}  // namespace memdiscern
