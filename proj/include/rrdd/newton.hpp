#pragma once

#include "rrdd/types.hpp"

#include <vector>

namespace rrdd {

struct NewtonConfig {
    double tol_residual = 1e-10; ///< absolute, on the constrained residual 2-norm
    int max_iter = 30;
    double damping = 0.5; ///< backtracking factor beta in (0,1)
    int max_backtracks = 40;
    double eps_reg = 1e-10; ///< Jacobian modulus regularization

    void validate() const;
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> residual_history; ///< norm before each step and after the last
    std::vector<int> backtracks;          ///< per accepted step
};

struct NewtonCallbacks {
    /// Residual with constraints already masked.
    std::function<Vector(const Vector&)> residual;
    /// Jacobian with constrained rows/cols eliminated to identity.
    std::function<SparseMatrix(const Vector&)> jacobian;
};

/// Damped Newton with residual backtracking: accepts the step factor
/// t = beta^k for the smallest k >= 0 with |r(u + t d)| <= (1 - t/2)|r(u)|.
/// Throws SolveFailure (with the residual history) on divergence.
std::pair<Vector, NewtonReport> newton_iterate(const NewtonCallbacks& cb,
                                               const NewtonConfig& cfg, Vector start);

} // namespace rrdd
