#pragma once

#include "memdiscern/fitting.hpp"

#include <functional>
#include <span>
#include <vector>

namespace memdiscern::detail {

// Fills `residuals` for parameters `x`; returns false when the model cannot
// be evaluated there (treated as an infinitely bad point).
using ResidualFn = std::function<bool(std::span<const double> x, std::vector<double>& residuals)>;

struct LmOutcome {
    std::vector<double> x;
    double ssr = 0.0;
    int iterations = 0;
    bool converged = false;
    bool evaluable = true;  // false when the start point itself failed
};

// Box-constrained Levenberg-Marquardt with Marquardt (diagonal) scaling and
// forward-difference Jacobians. Trial points are projected onto [lower, upper].
LmOutcome levenberg_marquardt(const ResidualFn& residuals, std::vector<double> x,
                              std::span<const double> lower, std::span<const double> upper,
                              const LmOptions& options);

}  // namespace memdiscern::detail
