#include "rrdd/subsolver.hpp"

#include "rrdd/errors.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace rrdd {

namespace {

void check_problem(const SubdomainProblem& prob)
{
    if (prob.dec == nullptr || prob.ps == nullptr) {
        throw InvalidArgument("SubdomainProblem: missing decomposition or nonlinearity");
    }
    if (prob.side != 1 && prob.side != 2) {
        throw InvalidArgument("SubdomainProblem: side must be 1 or 2");
    }
    if (!prob.f) {
        throw InvalidArgument("SubdomainProblem: missing source term");
    }
    if (prob.mode == SubdomainProblem::Mode::dirichlet &&
        (prob.eta.dec_id != prob.dec->id || prob.eta.size() != prob.dec->n_interface())) {
        throw InvalidArgument("SubdomainProblem: dirichlet data size mismatch");
    }
    if (prob.mode == SubdomainProblem::Mode::robin) {
        if (!(prob.s > 0.0)) {
            throw InvalidArgument("SubdomainProblem: robin parameter s must be > 0");
        }
        if (prob.chi.dec_id != prob.dec->id || prob.chi.size() != prob.dec->n_interface()) {
            throw InvalidArgument("SubdomainProblem: robin dual data size mismatch");
        }
    }
}

/// p=2 surrogate with the reaction linearized at zero; its solution is the
/// Newton starting point when no warm start is given.
PStructure linear_surrogate(const PStructure& ps, double eps_reg)
{
    const double lam0 = std::max(0.0, g_derivative(ps, 0.0, eps_reg));
    PStructure s;
    s.p = 2.0;
    s.r = 2.0;
    s.lambda = lam0;
    s.name = "surrogate";
    s.alpha = [](const Vec2& z) { return z; };
    s.alpha_jac = [](const Vec2&, double) { return Mat2::Identity().eval(); };
    s.g = [lam0](double x) { return lam0 * x; };
    s.g_deriv = [lam0](double, double) { return lam0; };
    return s;
}

struct RobinTerm {
    Matrix mass;               ///< s * interface mass
    Vector chi;                ///< dual data
    const std::vector<int>* iface_to_mesh = nullptr;

    void add_residual(const Vector& u, Vector& r) const
    {
        const auto& map = *iface_to_mesh;
        const int m = static_cast<int>(map.size());
        Vector eta(m);
        for (int k = 0; k < m; ++k) {
            eta[k] = u[map[k]];
        }
        const Vector flux = mass * eta - chi;
        for (int k = 0; k < m; ++k) {
            r[map[k]] += flux[k];
        }
    }

    void add_jacobian(std::vector<Triplet>& trips) const
    {
        const auto& map = *iface_to_mesh;
        const int m = static_cast<int>(map.size());
        for (int k = 0; k < m; ++k) {
            for (int l = 0; l < m; ++l) {
                trips.emplace_back(map[k], map[l], mass(k, l));
            }
        }
    }
};

SolveResult solve_constrained(const PStructure& ps, const Mesh& mesh, const SourceFn& f,
                              const QuadratureRule& quad, const NewtonConfig& cfg,
                              const std::vector<int>& pinned, Vector start,
                              const FeFunction* warm_start, const RobinTerm* robin)
{
    cfg.validate();
    if (warm_start != nullptr) {
        if (warm_start->mesh_id != mesh.id || warm_start->coeffs.size() != mesh.n_vertices()) {
            throw InvalidArgument("warm start does not live on the subdomain mesh");
        }
        Vector pins = start;
        start = warm_start->coeffs;
        for (int d : pinned) {
            start[d] = pins[d]; // constraints win over the warm start
        }
    }

    auto residual_of = [&](const PStructure& which, const Vector& u) {
        FeFunction uf{mesh.id, u};
        Vector r = assemble_residual_raw(which, mesh, uf, f, quad);
        if (robin != nullptr) {
            robin->add_residual(u, r);
        }
        mask_entries(r, pinned);
        return r;
    };
    auto jacobian_of = [&](const PStructure& which, const Vector& u) {
        FeFunction uf{mesh.id, u};
        SparseMatrix a = assemble_jacobian_raw(which, mesh, uf, quad, cfg.eps_reg);
        if (robin != nullptr) {
            std::vector<Triplet> trips;
            robin->add_jacobian(trips);
            SparseMatrix extra(a.rows(), a.cols());
            extra.setFromTriplets(trips.begin(), trips.end());
            a += extra;
        }
        return constrain_matrix(a, pinned);
    };

    if (warm_start == nullptr) {
        // One exact step on the linear surrogate; solves it completely.
        const PStructure surrogate = linear_surrogate(ps, cfg.eps_reg);
        const Vector r0 = residual_of(surrogate, start);
        Eigen::SparseLU<SparseMatrix> lu(jacobian_of(surrogate, start));
        if (lu.info() == Eigen::Success) {
            const Vector step = lu.solve(-r0);
            if (step.allFinite()) {
                start += step;
            }
        }
    }

    NewtonCallbacks cb;
    cb.residual = [&](const Vector& u) { return residual_of(ps, u); };
    cb.jacobian = [&](const Vector& u) { return jacobian_of(ps, u); };
    auto [u, report] = newton_iterate(cb, cfg, std::move(start));
    return SolveResult{FeFunction{mesh.id, std::move(u)}, std::move(report)};
}

} // namespace

SubdomainProblem dirichlet_problem(const Decomposition& dec, int side, const PStructure& ps,
                                   SourceFn f, QuadratureRule quad, TraceVector eta)
{
    SubdomainProblem prob;
    prob.dec = &dec;
    prob.side = side;
    prob.ps = &ps;
    prob.f = std::move(f);
    prob.quad = std::move(quad);
    prob.mode = SubdomainProblem::Mode::dirichlet;
    prob.eta = std::move(eta);
    check_problem(prob);
    return prob;
}

SubdomainProblem robin_problem(const Decomposition& dec, int side, const PStructure& ps,
                               SourceFn f, QuadratureRule quad, double s, TraceVector chi)
{
    SubdomainProblem prob;
    prob.dec = &dec;
    prob.side = side;
    prob.ps = &ps;
    prob.f = std::move(f);
    prob.quad = std::move(quad);
    prob.mode = SubdomainProblem::Mode::robin;
    prob.s = s;
    prob.chi = std::move(chi);
    check_problem(prob);
    return prob;
}

SubdomainProblem natural_problem(const Decomposition& dec, int side, const PStructure& ps,
                                 SourceFn f, QuadratureRule quad)
{
    SubdomainProblem prob;
    prob.dec = &dec;
    prob.side = side;
    prob.ps = &ps;
    prob.f = std::move(f);
    prob.quad = std::move(quad);
    prob.mode = SubdomainProblem::Mode::natural;
    check_problem(prob);
    return prob;
}

SolveResult solve_dirichlet(const SubdomainProblem& prob, const NewtonConfig& cfg,
                            const FeFunction* warm_start)
{
    check_problem(prob);
    if (prob.mode != SubdomainProblem::Mode::dirichlet) {
        throw InvalidArgument("solve_dirichlet: problem is not in dirichlet mode");
    }
    const Mesh& mesh = prob.mesh();
    std::vector<int> pinned = mesh.tagged_vertices(VertexTag::dirichlet);
    const auto& iface = prob.dec->iface_to_sub[prob.side - 1];
    pinned.insert(pinned.end(), iface.begin(), iface.end());

    Vector start = Vector::Zero(mesh.n_vertices());
    for (std::size_t k = 0; k < iface.size(); ++k) {
        start[iface[k]] = prob.eta.values[static_cast<Eigen::Index>(k)];
    }
    return solve_constrained(*prob.ps, mesh, prob.f, prob.quad, cfg, pinned,
                             std::move(start), warm_start, nullptr);
}

SolveResult solve_robin(const SubdomainProblem& prob, const NewtonConfig& cfg,
                        const FeFunction* warm_start)
{
    check_problem(prob);
    if (prob.mode != SubdomainProblem::Mode::robin) {
        throw InvalidArgument("solve_robin: problem is not in robin mode");
    }
    const Mesh& mesh = prob.mesh();
    const std::vector<int> pinned = mesh.tagged_vertices(VertexTag::dirichlet);

    RobinTerm robin;
    robin.mass = prob.s * interface_mass(*prob.dec, prob.quad).m;
    robin.chi = prob.chi.values;
    robin.iface_to_mesh = &prob.dec->iface_to_sub[prob.side - 1];

    return solve_constrained(*prob.ps, mesh, prob.f, prob.quad, cfg, pinned,
                             Vector::Zero(mesh.n_vertices()), warm_start, &robin);
}

SolveResult solve_natural(const SubdomainProblem& prob, const NewtonConfig& cfg,
                          const FeFunction* warm_start)
{
    check_problem(prob);
    const Mesh& mesh = prob.mesh();
    const std::vector<int> pinned = mesh.tagged_vertices(VertexTag::dirichlet);
    return solve_constrained(*prob.ps, mesh, prob.f, prob.quad, cfg, pinned,
                             Vector::Zero(mesh.n_vertices()), warm_start, nullptr);
}

SolveResult solve_on_mesh(const PStructure& ps, const Mesh& mesh, const SourceFn& f,
                          const QuadratureRule& quad, const NewtonConfig& cfg,
                          const std::vector<int>& pinned, Vector start,
                          const FeFunction* warm_start)
{
    if (start.size() != mesh.n_vertices()) {
        throw InvalidArgument("solve_on_mesh: start vector size mismatch");
    }
    return solve_constrained(ps, mesh, f, quad, cfg, pinned, std::move(start), warm_start,
                             nullptr);
}

} // namespace rrdd
