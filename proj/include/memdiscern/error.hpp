#pragma once

#include <stdexcept>
#include <string>

namespace memdiscern {

enum class ErrorKind {
    Usage,
    Validation,
    Format,
    Data,
    Io,
    StateDomain,
    UnsupportedWaveform,
    IllPosedImpulse,
    Divergence,
    WrongExperiment,
    NoDecay,
    Polarity,
    NotSteppedTrace,
    InsufficientData,
    DegeneratePrediction,
    EstimationFailure,
    Unidentifiable,
};

const char* to_string(ErrorKind kind);

// Process exit status for a given error kind: usage=2, format=3, numeric=4.
int exit_code_for(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Raised when a simulation blows up; carries the time of the first non-finite value.
class DivergenceError : public Error {
public:
    DivergenceError(double time, const std::string& message)
        : Error(ErrorKind::Divergence, message), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

// Raised when an iterative estimator runs out of budget; carries the best value seen.
class EstimationFailure : public Error {
public:
    EstimationFailure(double best_so_far, const std::string& message)
        : Error(ErrorKind::EstimationFailure, message), best_(best_so_far) {}

    double best_so_far() const noexcept { return best_; }

private:
    double best_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace memdiscern
