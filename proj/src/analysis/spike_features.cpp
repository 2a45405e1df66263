#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace memdiscern {

SpikeFeatures extract_spike_features(const Trace& trace, double tail_window) {
    if (!(tail_window > 0.0 && tail_window < 0.5)) {
        fail(ErrorKind::Validation, "tail_window must lie in (0, 0.5)");
    }
    const std::size_t n = trace.size();
    if (n < 10) {
        fail(ErrorKind::InsufficientData,
             "spike extraction needs at least 10 samples, got " + std::to_string(n));
    }
    const double v0 = trace.v.front();
    const double v_tol = 1e-6 * std::abs(v0) + 1e-12;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(trace.v[k] - v0) > v_tol) {
            fail(ErrorKind::WrongExperiment, "spike extraction needs a constant applied voltage; sample " +
                                                 std::to_string(k) + " differs");
        }
    }

    const std::size_t tail_count =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(tail_window * n)));
    const std::size_t tail_begin = n - tail_count;
    const double i_inf = std::accumulate(trace.i.begin() + tail_begin, trace.i.end(), 0.0) /
                         static_cast<double>(tail_count);
    double tail_var = 0.0;
    for (std::size_t k = tail_begin; k < n; ++k) {
        tail_var += (trace.i[k] - i_inf) * (trace.i[k] - i_inf);
    }
    const double tail_std = std::sqrt(tail_var / static_cast<double>(tail_count));

    std::size_t peak = 0;
    double peak_dev = 0.0;
    double max_abs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        max_abs = std::max(max_abs, std::abs(trace.i[k]));
        const double dev = std::abs(trace.i[k] - i_inf);
        if (dev > peak_dev) {
            peak_dev = dev;
            peak = k;
        }
    }
    const double noise_floor = std::max({4.0 * tail_std, 1e-9 * max_abs,
                                         std::numeric_limits<double>::min()});
    if (peak_dev <= noise_floor) {
        fail(ErrorKind::NoDecay, "no decay above the noise floor (constant-current trace)");
    }

    SpikeFeatures f;
    f.i_peak = trace.i[peak];
    f.i_inf = i_inf;
    f.polarity = f.i_peak >= i_inf ? SpikePolarity::Positive : SpikePolarity::Negative;
    f.tail_window = tail_window;
    f.t_peak = trace.t[peak];
    f.v_bias = v0;

    const double sign = f.polarity == SpikePolarity::Positive ? 1.0 : -1.0;
    const double threshold = peak_dev / std::numbers::e;
    for (std::size_t k = peak + 1; k < n; ++k) {
        const double dev = sign * (trace.i[k] - i_inf);
        if (dev <= threshold) {
            const double prev = sign * (trace.i[k - 1] - i_inf);
            const double frac = (prev - threshold) / (prev - dev);
            f.tau_1e = trace.t[k - 1] + frac * (trace.t[k] - trace.t[k - 1]) - f.t_peak;
            return f;
        }
    }
    fail(ErrorKind::NoDecay, "current never decays to 1/e of the initial excursion");
}

RcInference infer_rc(const SpikeFeatures& features, double v_bias) {
    if (v_bias == 0.0 || !std::isfinite(v_bias)) {
        fail(ErrorKind::Validation, "v_bias must be non-zero");
    }
    if (features.i_inf == 0.0 || std::signbit(features.i_inf) != std::signbit(v_bias)) {
        fail(ErrorKind::Polarity, "asymptotic current and bias voltage have different signs");
    }
    if (!(features.tau_1e > 0.0)) {
        fail(ErrorKind::Validation, "tau_1e must be positive");
    }
    RcInference rc;
    rc.v_bias = v_bias;
    rc.r_parallel = v_bias / features.i_inf;
    rc.c_parallel = features.tau_1e / rc.r_parallel;
    return rc;
}

}  // namespace memdiscern
