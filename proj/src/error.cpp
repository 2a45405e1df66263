#include "memdiscern/error.hpp"

namespace memdiscern {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return "usage";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Format: return "format";
        case ErrorKind::Data: return "data";
        case ErrorKind::Io: return "io";
        case ErrorKind::StateDomain: return "state-domain";
        case ErrorKind::UnsupportedWaveform: return "unsupported-waveform";
        case ErrorKind::IllPosedImpulse: return "ill-posed-impulse";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::WrongExperiment: return "wrong-experiment";
        case ErrorKind::NoDecay: return "no-decay";
        case ErrorKind::Polarity: return "polarity";
        case ErrorKind::NotSteppedTrace: return "not-a-stepped-trace";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::DegeneratePrediction: return "degenerate-prediction";
        case ErrorKind::EstimationFailure: return "estimation-failure";
        case ErrorKind::Unidentifiable: return "unidentifiable-parameter";
    }
    return "unknown";
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage:
        case ErrorKind::UnsupportedWaveform:
            return 2;
        case ErrorKind::Validation:
        case ErrorKind::Format:
        case ErrorKind::Data:
        case ErrorKind::Io:
        case ErrorKind::NotSteppedTrace:
        case ErrorKind::WrongExperiment:
            return 3;
        default:
            return 4;
    }
}

}  // namespace memdiscern
