#pragma once

#include "rrdd/diagnostics.hpp"
#include "rrdd/fem.hpp"
#include "rrdd/mesh.hpp"
#include "rrdd/subsolver.hpp"

#include <optional>

namespace rrdd {

/// Functional on the interface dofs; pairs against TraceVector coefficients
/// by the plain dot product. The L2(Gamma)-identified representative is
/// recovered by applying the inverse interface mass.
struct DualTrace {
    int dec_id = -1;
    Vector values;

    int size() const { return static_cast<int>(values.size()); }
};

/// Everything an interface iteration needs besides its state.
struct InterfaceProblem {
    const Decomposition* dec = nullptr;
    const PStructure* ps = nullptr;
    SourceFn f;
    QuadratureRule quad;
    NewtonConfig newton;
    double s = 1.0;
    /// When set, half-steps re-solve the Dirichlet problem instead of
    /// reusing the stored subdomain solution's residual.
    bool strict_recompute = false;
};

struct InterfaceState {
    int n = 0;
    TraceVector eta1, eta2;
    FeFunction u1, u2;
    double s = 1.0;
    int newton1 = 0; ///< Newton iterations of the latest half-steps
    int newton2 = 0;
};

/// Steklov-Poincare action: entry k is a_i(F_i eta, R_i mu_k) - (f_i, R_i mu_k),
/// i.e. the unmasked residual of the Dirichlet solution at interface rows.
DualTrace steklov_apply(const InterfaceProblem& prob, int side, const TraceVector& eta,
                        const FeFunction* warm_start = nullptr);

struct SteklovResult {
    DualTrace flux;
    FeFunction u; ///< the Dirichlet solution F_i eta
    NewtonReport newton;
};
SteklovResult steklov_apply_full(const InterfaceProblem& prob, int side,
                                 const TraceVector& eta,
                                 const FeFunction* warm_start = nullptr);

/// S1 eta + S2 eta; zero iff eta solves the discrete interface equation.
DualTrace steklov_residual(const InterfaceProblem& prob, const TraceVector& eta);

/// Interface rows of an already assembled unmasked subdomain residual.
DualTrace gather_interface_dual(const Decomposition& dec, int side, const Vector& raw_residual);

/// Initial state: u2 = F_2 eta20 (one Dirichlet solve); eta1/u1 mirror the
/// initial data until the first step replaces them.
InterfaceState make_initial_state(const InterfaceProblem& prob, const TraceVector& eta20);

/// Robin data eta20 with vanishing interface flux, from a zero-Neumann solve
/// on subdomain 2.
TraceVector default_initial_trace(const InterfaceProblem& prob);

/// One alternating Robin-Robin sweep: the Omega_1 solve uses the dual data
/// s J eta2^n - S2 eta2^n, the Omega_2 solve uses s J eta1^{n+1} - S1 eta1^{n+1}.
InterfaceState robin_robin_step(const InterfaceProblem& prob, const InterfaceState& state);

/// The same update expressed on interface data: materializes the
/// L2-identified actions S_i = M^{-1} (dual) and solves the two resolvent
/// half-steps (s I + S_i)^{-1}. Exists as a distinct code path so the
/// equivalence with robin_robin_step is testable.
InterfaceState peaceman_rachford_step(const InterfaceProblem& prob,
                                      const InterfaceState& state);

struct StopRule {
    double tol_gap = 1e-8;
    int max_outer = 200;
};

/// Reference quantities from a monolithic solve, used for the error columns
/// and the contraction certificates.
struct ReferenceData {
    TraceVector eta_star;
    FeFunction u_global;
};

/// Iterates robin_robin_step until the interface gap falls below
/// stop.tol_gap or max_outer is reached; never throws on plain
/// non-convergence (the history carries converged = false). The final
/// iterate is copied into *final_state when requested.
ConvergenceHistory run(const InterfaceProblem& prob, const TraceVector& eta20,
                       const StopRule& stop,
                       const std::optional<ReferenceData>& reference = std::nullopt,
                       InterfaceState* final_state = nullptr);

} // namespace rrdd
