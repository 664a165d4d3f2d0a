#include "rrdd/newton.hpp"

#include "rrdd/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace rrdd {

void NewtonConfig::validate() const
{
    if (!(tol_residual > 0.0)) {
        throw InvalidArgument("NewtonConfig: tol_residual must be > 0");
    }
    if (max_iter < 1) {
        throw InvalidArgument("NewtonConfig: max_iter must be >= 1");
    }
    if (!(damping > 0.0 && damping < 1.0)) {
        throw InvalidArgument("NewtonConfig: damping must lie in (0,1)");
    }
    if (max_backtracks < 0 || eps_reg < 0.0) {
        throw InvalidArgument("NewtonConfig: max_backtracks and eps_reg must be >= 0");
    }
}

std::pair<Vector, NewtonReport> newton_iterate(const NewtonCallbacks& cb,
                                               const NewtonConfig& cfg, Vector start)
{
    cfg.validate();
    NewtonReport report;

    Vector u = std::move(start);
    Vector r = cb.residual(u);
    double rnorm = r.norm();
    report.residual_history.push_back(rnorm);

    Eigen::SparseLU<SparseMatrix> lu;
    while (rnorm > cfg.tol_residual) {
        if (report.iterations >= cfg.max_iter) {
            report.final_residual = rnorm;
            throw SolveFailure("newton_iterate: no convergence after " +
                                   std::to_string(cfg.max_iter) + " iterations (residual " +
                                   std::to_string(rnorm) + ")",
                               report.residual_history);
        }

        const SparseMatrix jac = cb.jacobian(u);
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            throw SolveFailure("newton_iterate: singular Jacobian",
                               report.residual_history);
        }
        const Vector step = lu.solve(-r);
        if (!step.allFinite()) {
            throw SolveFailure("newton_iterate: non-finite Newton step",
                               report.residual_history);
        }

        double t = 1.0;
        int k = 0;
        Vector trial, r_trial;
        double trial_norm = std::numeric_limits<double>::infinity();
        for (;; ++k) {
            if (k > cfg.max_backtracks) {
                report.final_residual = rnorm;
                throw SolveFailure("newton_iterate: line search exhausted at residual " +
                                       std::to_string(rnorm),
                                   report.residual_history);
            }
            trial = u + t * step;
            if (trial.allFinite()) {
                r_trial = cb.residual(trial);
                trial_norm = r_trial.norm();
                if (std::isfinite(trial_norm) && trial_norm <= (1.0 - 0.5 * t) * rnorm) {
                    break;
                }
            }
            t *= cfg.damping;
        }

        u = std::move(trial);
        r = std::move(r_trial);
        rnorm = trial_norm;
        report.iterations += 1;
        report.backtracks.push_back(k);
        report.residual_history.push_back(rnorm);
    }

    report.converged = true;
    report.final_residual = rnorm;
    return {std::move(u), std::move(report)};
}

} // namespace rrdd
