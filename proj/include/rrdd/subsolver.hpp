#pragma once

#include "rrdd/fem.hpp"
#include "rrdd/mesh.hpp"
#include "rrdd/newton.hpp"
#include "rrdd/pstructure.hpp"
#include "rrdd/quadrature.hpp"

#include <optional>

namespace rrdd {

/// One nonlinear subdomain problem on side i of a decomposition. The
/// boundary mode is either inhomogeneous Dirichlet data eta on the interface
/// or a Robin condition with parameter s and dual data chi.
struct SubdomainProblem {
    enum class Mode { dirichlet, robin, natural };

    const Decomposition* dec = nullptr;
    int side = 1;
    const PStructure* ps = nullptr;
    SourceFn f;
    QuadratureRule quad;

    Mode mode = Mode::dirichlet;
    TraceVector eta; ///< dirichlet data
    double s = 0.0;  ///< robin parameter, > 0 in robin mode
    TraceVector chi; ///< robin dual data, paired by plain dot product

    const Mesh& mesh() const { return dec->sub[side - 1]; }
};

SubdomainProblem dirichlet_problem(const Decomposition& dec, int side, const PStructure& ps,
                                   SourceFn f, QuadratureRule quad, TraceVector eta);

SubdomainProblem robin_problem(const Decomposition& dec, int side, const PStructure& ps,
                               SourceFn f, QuadratureRule quad, double s, TraceVector chi);

/// Zero-Neumann data on the interface; used to start the outer iteration
/// from a trace with vanishing interface flux.
SubdomainProblem natural_problem(const Decomposition& dec, int side, const PStructure& ps,
                                 SourceFn f, QuadratureRule quad);

struct SolveResult {
    FeFunction u;
    NewtonReport newton;
};

/// Discrete Dirichlet solution operator: the unique u with trace(u) = eta
/// (interface dofs pinned), zero dirichlet dofs and interior residual below
/// cfg.tol_residual. Throws SolveFailure on Newton divergence.
SolveResult solve_dirichlet(const SubdomainProblem& prob, const NewtonConfig& cfg,
                            const FeFunction* warm_start = nullptr);

/// Robin solve: find u, free on the interface, with
///   a_i(u, v) + s (T u, T v)_Gamma = (f, v) + <chi, T v>  for all v.
SolveResult solve_robin(const SubdomainProblem& prob, const NewtonConfig& cfg,
                        const FeFunction* warm_start = nullptr);

/// Interface-flux-free solve (natural boundary condition on the interface).
SolveResult solve_natural(const SubdomainProblem& prob, const NewtonConfig& cfg,
                          const FeFunction* warm_start = nullptr);

/// Generic constrained solve on an arbitrary mesh with pinned dofs holding
/// the values already present in `start`. Newton starts from the solution of
/// the p=2 surrogate problem unless a warm start is supplied.
SolveResult solve_on_mesh(const PStructure& ps, const Mesh& mesh, const SourceFn& f,
                          const QuadratureRule& quad, const NewtonConfig& cfg,
                          const std::vector<int>& pinned, Vector start,
                          const FeFunction* warm_start = nullptr);

} // namespace rrdd
