#include "levenberg_marquardt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace memdiscern::detail {
namespace {

double sum_squares(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) {
        s += v * v;
    }
    return s;
}

bool evaluate(const ResidualFn& fn, std::span<const double> x, std::vector<double>& r, double& ssr) {
    if (!fn(x, r)) {
        return false;
    }
    ssr = sum_squares(r);
    return std::isfinite(ssr);
}

}  // namespace

LmOutcome levenberg_marquardt(const ResidualFn& residuals, std::vector<double> x,
                              std::span<const double> lower, std::span<const double> upper,
                              const LmOptions& options) {
    const std::size_t n = x.size();
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = std::clamp(x[j], lower[j], upper[j]);
    }

    LmOutcome out;
    std::vector<double> r;
    double ssr = 0.0;
    if (!evaluate(residuals, x, r, ssr)) {
        out.x = x;
        out.ssr = std::numeric_limits<double>::infinity();
        out.evaluable = false;
        return out;
    }
    const std::size_t m = r.size();

    double lambda = options.lambda0;
    std::vector<double> probe(n), r_probe, x_trial(n), r_trial;
    Eigen::MatrixXd jac(m, n);
    Eigen::VectorXd scale(n);
    Eigen::MatrixXd aug(m + n, n);
    Eigen::VectorXd rhs(m + n);

    int iter = 0;
    bool converged = false;
    while (iter < options.max_iterations && !converged) {
        ++iter;
        if (ssr == 0.0) {
            converged = true;
            break;
        }

        // Forward differences, falling back to backward at an upper bound or failed probe.
        for (std::size_t j = 0; j < n; ++j) {
            const double h = options.diff_step * std::max(std::abs(x[j]), 1.0);
            probe = x;
            double step = h;
            probe[j] = x[j] + h;
            bool ok = probe[j] <= upper[j] && residuals(probe, r_probe);
            if (!ok) {
                step = -h;
                probe[j] = x[j] - h;
                ok = probe[j] >= lower[j] && residuals(probe, r_probe);
            }
            for (std::size_t i = 0; i < m; ++i) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    ok ? (r_probe[i] - r[i]) / step : 0.0;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double norm = jac.col(static_cast<Eigen::Index>(j)).norm();
            scale(static_cast<Eigen::Index>(j)) = norm > 0.0 ? norm : 1.0;
        }
        const Eigen::MatrixXd scaled = jac * scale.cwiseInverse().asDiagonal();
        const Eigen::Map<const Eigen::VectorXd> r_vec(r.data(), static_cast<Eigen::Index>(m));
        const double gradient_cos = (scaled.transpose() * r_vec).cwiseAbs().maxCoeff() / std::sqrt(ssr);
        if (gradient_cos <= options.gtol) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (!accepted) {
            aug.topRows(static_cast<Eigen::Index>(m)) = scaled;
            aug.bottomRows(static_cast<Eigen::Index>(n)) =
                std::sqrt(lambda) * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                              static_cast<Eigen::Index>(n));
            rhs.head(static_cast<Eigen::Index>(m)) = -r_vec;
            rhs.tail(static_cast<Eigen::Index>(n)).setZero();
            const Eigen::VectorXd step_scaled = aug.colPivHouseholderQr().solve(rhs);

            double step_norm = 0.0;
            double x_norm = 0.0;
            bool moved = false;
            for (std::size_t j = 0; j < n; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                x_trial[j] = std::clamp(x[j] + step_scaled(jj) / scale(jj), lower[j], upper[j]);
                moved = moved || x_trial[j] != x[j];
                step_norm += std::pow((x_trial[j] - x[j]) * scale(jj), 2);
                x_norm += std::pow(x[j] * scale(jj), 2);
            }
            if (!moved) {
                converged = true;
                break;
            }

            double ssr_trial = 0.0;
            if (evaluate(residuals, x_trial, r_trial, ssr_trial) && ssr_trial < ssr) {
                const double reduction = (ssr - ssr_trial) / ssr;
                x = x_trial;
                r.swap(r_trial);
                ssr = ssr_trial;
                lambda = std::max(lambda / 3.0, 1e-15);
                accepted = true;
                if (reduction <= options.ftol ||
                    std::sqrt(step_norm) <= options.xtol * (std::sqrt(x_norm) + options.xtol)) {
                    converged = true;
                }
            } else {
                lambda *= 4.0;
                if (lambda > 1e20) {
                    // No descent direction left at machine precision.
                    converged = true;
                    break;
                }
            }
        }
    }

    out.x = x;
    out.ssr = ssr;
    out.iterations = iter;
    out.converged = converged;
    return out;
}

}  // namespace memdiscern::detail
