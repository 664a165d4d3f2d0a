#include "rrdd/monolithic.hpp"

#include "rrdd/errors.hpp"

#include <cmath>

namespace rrdd {

SolveResult solve_global(const Mesh& mesh, const PStructure& ps, const SourceFn& f,
                         const QuadratureRule& quad, const NewtonConfig& cfg,
                         const FeFunction* warm_start)
{
    validate_exponents(ps.p, ps.r, mesh.dim);
    const std::vector<int> pinned = mesh.tagged_vertices(VertexTag::dirichlet);
    return solve_on_mesh(ps, mesh, f, quad, cfg, pinned, Vector::Zero(mesh.n_vertices()),
                         warm_start);
}

EquivalenceReport check_transmission(const Decomposition& dec, const PStructure& ps,
                                     const SourceFn& f, const QuadratureRule& quad,
                                     const FeFunction& u_global, const NewtonConfig& cfg,
                                     double forward_tol, const FeFunction* u1,
                                     const FeFunction* u2, double reverse_tol)
{
    EquivalenceReport report;
    report.forward_tol = forward_tol > 0.0 ? forward_tol : 10.0 * cfg.tol_residual;

    const FeFunction r1 = restrict_to(dec, 1, u_global);
    const FeFunction r2 = restrict_to(dec, 2, u_global);

    // (i) interior residuals of the restrictions
    std::array<double, 2> interior{};
    std::array<Vector, 2> raw{};
    for (int i = 0; i < 2; ++i) {
        const Mesh& mesh = dec.sub[i];
        const FeFunction& ui = (i == 0) ? r1 : r2;
        raw[i] = assemble_residual_raw(ps, mesh, ui, f, quad);
        Vector masked = raw[i];
        std::vector<int> constrained = mesh.tagged_vertices(VertexTag::dirichlet);
        const auto& iface = mesh.tagged_vertices(VertexTag::interface);
        constrained.insert(constrained.end(), iface.begin(), iface.end());
        mask_entries(masked, constrained);
        interior[i] = masked.norm();
    }
    report.interior_residual1 = interior[0];
    report.interior_residual2 = interior[1];

    // (ii) trace equality on the shared dofs
    const TraceVector t1 = trace(dec, 1, r1);
    const TraceVector t2 = trace(dec, 2, r2);
    report.trace_mismatch = (t1.values - t2.values).lpNorm<Eigen::Infinity>();

    // (iii) flux balance per interface basis function
    double flux = 0.0;
    for (int k = 0; k < dec.n_interface(); ++k) {
        flux = std::max(flux, std::abs(raw[0][dec.iface_to_sub[0][k]] +
                                       raw[1][dec.iface_to_sub[1][k]]));
    }
    report.flux_balance = flux;

    report.forward_pass = interior[0] <= report.forward_tol &&
                          interior[1] <= report.forward_tol &&
                          report.trace_mismatch <= 1e-14 &&
                          report.flux_balance <= report.forward_tol;

    if (u1 != nullptr && u2 != nullptr) {
        report.reverse_checked = true;
        report.reverse_tol = reverse_tol > 0.0 ? reverse_tol : report.forward_tol;
        const FeFunction glued = glue(dec, *u1, *u2);
        AssembledResidual res = assemble_residual(ps, dec.global, glued, f, quad);
        report.global_residual = res.values.norm();
        report.reverse_pass = report.global_residual <= report.reverse_tol;
    }
    return report;
}

} // namespace rrdd
