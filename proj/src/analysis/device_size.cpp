#include "memdiscern/analysis.hpp"
#include "memdiscern/error.hpp"
#include "memdiscern/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace memdiscern {

WidthStudyResult width_study_from_areas(const std::vector<double>& widths_mm,
                                        const std::vector<double>& measured_areas,
                                        const std::vector<double>& predicted_areas,
                                        double cv_threshold) {
    const std::size_t n = widths_mm.size();
    if (n == 0 || measured_areas.size() != n || predicted_areas.size() != n) {
        fail(ErrorKind::Validation, "width study needs equal, non-empty measured and predicted sets");
    }
    if (!(cv_threshold > 0.0)) {
        fail(ErrorKind::Validation, "cv_threshold must be positive");
    }
    WidthStudyResult r;
    r.cv_threshold = cv_threshold;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(predicted_areas[k] > 0.0)) {
            fail(ErrorKind::DegeneratePrediction,
                 "predicted hysteresis area is zero for device " + std::to_string(k));
        }
        if (!(measured_areas[k] > 0.0)) {
            fail(ErrorKind::Validation, "measured hysteresis area is zero for device " + std::to_string(k));
        }
        r.devices.push_back({widths_mm[k], measured_areas[k], predicted_areas[k],
                             measured_areas[k] / predicted_areas[k]});
    }
    double sum = 0.0;
    for (const auto& d : r.devices) {
        sum += d.ratio;
    }
    r.ratio_mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (const auto& d : r.devices) {
        var += (d.ratio - r.ratio_mean) * (d.ratio - r.ratio_mean);
    }
    // Population standard deviation.
    r.ratio_cv = std::sqrt(var / static_cast<double>(n)) / r.ratio_mean;
    r.constant_ratio = r.ratio_cv < cv_threshold;
    return r;
}

WidthStudyResult width_study(const std::vector<Trace>& measured,
                             const std::vector<Trace>& predicted, double cv_threshold) {
    if (measured.size() != predicted.size()) {
        fail(ErrorKind::Validation, "width study needs one predicted trace per measured trace");
    }
    std::vector<double> widths, m_areas, p_areas;
    for (std::size_t k = 0; k < measured.size(); ++k) {
        const auto& mw = measured[k].meta.electrode_width_mm;
        const auto& pw = predicted[k].meta.electrode_width_mm;
        if (!mw) {
            fail(ErrorKind::Validation, "measured trace " + std::to_string(k) + " has no electrode width");
        }
        if (pw && std::abs(*pw - *mw) > 1e-9 * std::max(1.0, std::abs(*mw))) {
            fail(ErrorKind::Validation, "electrode widths differ for device " + std::to_string(k));
        }
        widths.push_back(*mw);
        m_areas.push_back(lobe_areas(measured[k]).total());
        p_areas.push_back(lobe_areas(predicted[k]).total());
    }
    return width_study_from_areas(widths, m_areas, p_areas, cv_threshold);
}

double estimate_parallel_capacitance(const Trace& measured, const MemristorParams& memristor_fit,
                                     const SampleSchedule& schedule,
                                     const CapacitanceEstimateOptions& options) {
    const std::vector<double> target = crossing_offsets(measured);
    if (target.empty()) {
        fail(ErrorKind::Validation, "capacitance estimate needs a trace that crosses 0 V");
    }

    CircuitTopology topo;
    topo.memristor = memristor_fit;
    topo.r_series = options.r_series;
    topo.r_leak = options.r_leak;

    auto discrepancy = [&](double c) {
        topo.c_parallel = c;
        std::vector<double> sim;
        try {
            sim = crossing_offsets(simulate(topo, schedule, options.substeps));
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
        if (sim.size() != target.size()) {
            return std::numeric_limits<double>::infinity();
        }
        double ss = 0.0;
        for (std::size_t k = 0; k < target.size(); ++k) {
            ss += (sim[k] - target[k]) * (sim[k] - target[k]);
        }
        return ss;
    };

    // Seed the bracket from i = C dV/dt at the measured crossings.
    double seed = 0.0;
    int used = 0;
    for (std::size_t k = 0; k + 1 < measured.size(); ++k) {
        const bool crosses = (measured.v[k] <= 0.0 && measured.v[k + 1] > 0.0) ||
                             (measured.v[k] >= 0.0 && measured.v[k + 1] < 0.0);
        if (!crosses) {
            continue;
        }
        const double slope = (measured.v[k + 1] - measured.v[k]) / (measured.t[k + 1] - measured.t[k]);
        if (slope != 0.0 && static_cast<std::size_t>(used) < target.size()) {
            seed += std::abs(target[static_cast<std::size_t>(used)] / slope);
            ++used;
        }
    }
    seed = used > 0 ? seed / used : 0.0;

    const double d0 = discrepancy(0.0);
    if (!(seed > 0.0)) {
        return 0.0;
    }

    double hi = 4.0 * seed;
    for (int grow = 0; grow < 60 && discrepancy(hi) < discrepancy(0.5 * hi); ++grow) {
        hi *= 2.0;
    }

    // Golden-section search on [0, hi].
    constexpr double inv_phi = 0.6180339887498949;
    double a = 0.0, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = discrepancy(c);
    double fd = discrepancy(d);
    const double tol = 1e-9 * hi;
    int it = 0;
    for (; it < options.max_iterations && (b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = discrepancy(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = discrepancy(d);
        }
    }
    const double best = fc <= fd ? c : d;
    const double f_best = std::min(fc, fd);
    if ((b - a) > tol) {
        throw EstimationFailure(best, "capacitance search did not converge within " +
                                          std::to_string(options.max_iterations) + " iterations");
    }
    if (!std::isfinite(f_best) && !std::isfinite(d0)) {
        throw EstimationFailure(best, "every capacitance trial failed to simulate");
    }
    return d0 <= f_best ? 0.0 : best;
}

}  // namespace memdiscern
