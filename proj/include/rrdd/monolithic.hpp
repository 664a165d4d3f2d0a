#pragma once

#include "rrdd/fem.hpp"
#include "rrdd/mesh.hpp"
#include "rrdd/newton.hpp"
#include "rrdd/subsolver.hpp"

namespace rrdd {

/// Damped-Newton solve of the global discrete problem on the undecomposed
/// mesh (homogeneous Dirichlet boundary).
SolveResult solve_global(const Mesh& mesh, const PStructure& ps, const SourceFn& f,
                         const QuadratureRule& quad, const NewtonConfig& cfg,
                         const FeFunction* warm_start = nullptr);

/// Discrete transmission equivalence. Forward: the restrictions of u_global
/// satisfy the subdomain equations, share their trace, and balance the
/// interface flux. Reverse (when a subdomain pair is supplied): the glued
/// pair satisfies the global equation.
struct EquivalenceReport {
    double interior_residual1 = 0.0;
    double interior_residual2 = 0.0;
    double trace_mismatch = 0.0;
    double flux_balance = 0.0; ///< max interface-row imbalance
    bool forward_pass = false;
    double forward_tol = 0.0;

    bool reverse_checked = false;
    double global_residual = 0.0;
    bool reverse_pass = false;
    double reverse_tol = 0.0;

    bool pass() const { return forward_pass && (!reverse_checked || reverse_pass); }
};

EquivalenceReport check_transmission(const Decomposition& dec, const PStructure& ps,
                                     const SourceFn& f, const QuadratureRule& quad,
                                     const FeFunction& u_global, const NewtonConfig& cfg,
                                     double forward_tol, const FeFunction* u1 = nullptr,
                                     const FeFunction* u2 = nullptr,
                                     double reverse_tol = 0.0);

} // namespace rrdd
