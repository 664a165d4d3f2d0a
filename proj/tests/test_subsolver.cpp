#include "rrdd/subsolver.hpp"

#include "oracles.hpp"
#include "rrdd/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rrdd;

namespace {

struct Fixture {
    Mesh mesh;
    Decomposition dec;
    QuadratureRule quad;
    NewtonConfig cfg;

    explicit Fixture(int dim, int n = 16)
    {
        if (dim == 1) {
            mesh = build_interval_mesh(0.0, 1.0, n);
            dec = decompose(mesh, Axis::x, 0.5);
            quad = make_quadrature(1, 4);
        } else {
            mesh = build_rect_mesh(1.0, 1.0, n, n);
            dec = decompose(mesh, Axis::x, 0.5);
            quad = make_quadrature(2, 4);
        }
        cfg.tol_residual = 1e-11;
        cfg.max_iter = 40;
    }

    TraceVector random_trace(std::mt19937_64& rng, double scale = 1.0) const
    {
        std::uniform_real_distribution<double> box(-scale, scale);
        TraceVector eta{dec.id, Vector(dec.n_interface())};
        for (int k = 0; k < eta.size(); ++k) {
            eta.values[k] = box(rng);
        }
        return eta;
    }
};

} // namespace

TEST_CASE("newton_iterate solves a linear system in one step")
{
    const Fixture fx(1);
    const PStructure ps = make_preset(Preset::resolvent, 2.0, 1.0);
    const Mesh& mesh = fx.dec.sub[0];
    const SourceFn f = [](const Vec2& xy) { return 1.0 + xy[0]; };
    const std::vector<int> pinned = mesh.tagged_vertices(VertexTag::dirichlet);

    NewtonCallbacks cb;
    cb.residual = [&](const Vector& u) {
        Vector r = assemble_residual_raw(ps, mesh, FeFunction{mesh.id, u}, f, fx.quad);
        mask_entries(r, pinned);
        return r;
    };
    cb.jacobian = [&](const Vector& u) {
        return constrain_matrix(
            assemble_jacobian_raw(ps, mesh, FeFunction{mesh.id, u}, fx.quad, 0.0), pinned);
    };

    auto [u, report] = newton_iterate(cb, fx.cfg, Vector::Zero(mesh.n_vertices()));
    CHECK(report.converged);
    CHECK(report.iterations == 1);
    CHECK(report.final_residual <= fx.cfg.tol_residual);

    // restarting from the solution accepts immediately
    auto [u2, report2] = newton_iterate(cb, fx.cfg, u);
    CHECK(report2.iterations == 0);
    CHECK((u2 - u).norm() == 0.0);
}

TEST_CASE("newton_iterate on a p=4 problem: decreasing residuals, divergence error")
{
    const Fixture fx(1, 32);
    const PStructure ps = make_preset(Preset::resolvent, 4.0, 1.0);
    const Mesh& mesh = fx.dec.sub[0];
    const SourceFn f = [](const Vec2&) { return 1.0; };
    const std::vector<int> pinned = mesh.tagged_vertices(VertexTag::dirichlet);

    NewtonCallbacks cb;
    cb.residual = [&](const Vector& u) {
        Vector r = assemble_residual_raw(ps, mesh, FeFunction{mesh.id, u}, f, fx.quad);
        mask_entries(r, pinned);
        return r;
    };
    cb.jacobian = [&](const Vector& u) {
        return constrain_matrix(
            assemble_jacobian_raw(ps, mesh, FeFunction{mesh.id, u}, fx.quad, 1e-10), pinned);
    };

    // start from the p=2 solution as the production path does
    const PStructure lin = make_preset(Preset::linear, 2.0, 1.0);
    NewtonCallbacks lin_cb;
    lin_cb.residual = [&](const Vector& u) {
        Vector r = assemble_residual_raw(lin, mesh, FeFunction{mesh.id, u}, f, fx.quad);
        mask_entries(r, pinned);
        return r;
    };
    lin_cb.jacobian = [&](const Vector& u) {
        return constrain_matrix(
            assemble_jacobian_raw(lin, mesh, FeFunction{mesh.id, u}, fx.quad, 0.0), pinned);
    };
    const Vector start =
        newton_iterate(lin_cb, fx.cfg, Vector::Zero(mesh.n_vertices())).first;

    auto [u, report] = newton_iterate(cb, fx.cfg, start);
    CHECK(report.converged);
    CHECK(report.final_residual <= fx.cfg.tol_residual);
    for (std::size_t i = 1; i < report.residual_history.size(); ++i) {
        CHECK(report.residual_history[i] < report.residual_history[i - 1]);
    }

    NewtonConfig strict = fx.cfg;
    strict.max_iter = 1;
    try {
        (void)newton_iterate(cb, strict, Vector::Zero(mesh.n_vertices()));
        FAIL("expected SolveFailure");
    } catch (const SolveFailure& e) {
        CHECK(!e.residual_history.empty());
    }
}

TEST_CASE("solve_dirichlet: zero data gives the zero solution")
{
    const Fixture fx(2, 6);
    const PStructure ps = make_preset(Preset::reaction, 3.0, 1.0);
    TraceVector eta{fx.dec.id, Vector::Zero(fx.dec.n_interface())};
    const auto prob = dirichlet_problem(fx.dec, 1, ps, zero_source(), fx.quad, eta);
    const SolveResult result = solve_dirichlet(prob, fx.cfg);
    CHECK(result.u.coeffs.norm() <= 1e-12);
}

TEST_CASE("solve_dirichlet matches the dense linear oracle")
{
    const Fixture fx(2, 6);
    const double lambda = 1.5;
    const PStructure ps = make_preset(Preset::resolvent, 2.0, lambda);
    const SourceFn f = [](const Vec2& xy) { return 2.0 - xy[0] + 0.5 * xy[1]; };
    std::mt19937_64 rng(13);

    for (int side = 1; side <= 2; ++side) {
        const TraceVector eta = fx.random_trace(rng);
        const auto prob = dirichlet_problem(fx.dec, side, ps, f, fx.quad, eta);
        const SolveResult result = solve_dirichlet(prob, fx.cfg);

        const oracle::LinearSubdomain sub =
            oracle::build_linear_subdomain(fx.dec, side, lambda, f);
        std::vector<int> pinned = sub.dirichlet;
        Vector pinned_vals = Vector::Zero(
            static_cast<Eigen::Index>(pinned.size() + sub.iface.size()));
        for (std::size_t k = 0; k < sub.iface.size(); ++k) {
            pinned.push_back(sub.iface[k]);
            pinned_vals[static_cast<Eigen::Index>(sub.dirichlet.size() + k)] =
                eta.values[static_cast<Eigen::Index>(k)];
        }
        const Vector expected =
            oracle::dense_constrained_solve(sub.a, sub.b, pinned, pinned_vals);
        CHECK((result.u.coeffs - expected).norm() <= 1e-10);

        // trace is pinned exactly
        const TraceVector back = trace(fx.dec, side, result.u);
        CHECK((back.values - eta.values).norm() == 0.0);
    }
}

TEST_CASE("solve_dirichlet: manufactured p=3 solution converges under refinement")
{
    const PStructure ps = make_preset(Preset::resolvent, 3.0, 1.0);
    const SourceFn f = [](const Vec2& xy) {
        return 4.0 * std::abs(1.0 - 2.0 * xy[0]) + xy[0] * (1.0 - xy[0]);
    };
    const SourceFn exact = [](const Vec2& xy) { return xy[0] * (1.0 - xy[0]); };

    NewtonConfig cfg;
    cfg.tol_residual = 1e-12;
    cfg.max_iter = 60;

    std::vector<double> errors;
    for (int n : {16, 32, 64}) {
        const Mesh mesh = build_interval_mesh(0.0, 1.0, n);
        const Decomposition dec = decompose(mesh, Axis::x, 0.5);
        const QuadratureRule quad = make_quadrature(1, 4);
        TraceVector eta{dec.id, Vector::Constant(1, 0.25)};
        const auto prob = dirichlet_problem(dec, 1, ps, f, quad, eta);
        const SolveResult result = solve_dirichlet(prob, cfg);

        const FeFunction exact_h = interpolate(dec.sub[0], exact);
        const FeFunction diff{result.u.mesh_id, result.u.coeffs - exact_h.coeffs};
        errors.push_back(norm_w1p(dec.sub[0], diff, ps, quad));
    }
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] < errors[1]);
    MESSAGE("manufactured dirichlet W1p errors: ", errors[0], " ", errors[1], " ", errors[2]);
}

TEST_CASE("solve_dirichlet is start-independent (discrete uniqueness)")
{
    const Fixture fx(1, 16);
    const PStructure ps = make_preset(Preset::reaction, 3.0, 1.0);
    const SourceFn f = [](const Vec2& xy) { return 1.0 + xy[0]; };
    std::mt19937_64 rng(29);
    const TraceVector eta = fx.random_trace(rng, 0.5);
    const auto prob = dirichlet_problem(fx.dec, 2, ps, f, fx.quad, eta);

    std::vector<FeFunction> solutions;
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        FeFunction warm = zero_function(fx.dec.sub[1]);
        for (int v = 0; v < warm.coeffs.size(); ++v) {
            warm.coeffs[v] = box(rng);
        }
        solutions.push_back(solve_dirichlet(prob, fx.cfg, &warm).u);
    }
    for (std::size_t a = 0; a < solutions.size(); ++a) {
        for (std::size_t b = a + 1; b < solutions.size(); ++b) {
            const FeFunction diff{solutions[a].mesh_id,
                                  solutions[a].coeffs - solutions[b].coeffs};
            CHECK(norm_w1p(fx.dec.sub[1], diff, ps, fx.quad) <= 10.0 * fx.cfg.tol_residual);
        }
    }
}

TEST_CASE("solve_robin: zero data gives the zero solution")
{
    const Fixture fx(2, 6);
    const PStructure ps = make_preset(Preset::reaction, 3.0, 1.0);
    TraceVector chi{fx.dec.id, Vector::Zero(fx.dec.n_interface())};
    const auto prob = robin_problem(fx.dec, 1, ps, zero_source(), fx.quad, 1.0, chi);
    const SolveResult result = solve_robin(prob, fx.cfg);
    CHECK(result.u.coeffs.norm() <= 1e-12);

    CHECK_THROWS_AS((void)robin_problem(fx.dec, 1, ps, zero_source(), fx.quad, -1.0, chi),
                    InvalidArgument);
}

TEST_CASE("solve_robin matches the dense robin-augmented linear oracle")
{
    const Fixture fx(2, 6);
    const double lambda = 1.0, s = 2.0;
    const PStructure ps = make_preset(Preset::resolvent, 2.0, lambda);
    const SourceFn f = [](const Vec2& xy) { return 1.0 + xy[0] + xy[1]; };
    std::mt19937_64 rng(37);
    const TraceVector chi = fx.random_trace(rng);

    const auto prob = robin_problem(fx.dec, 2, ps, f, fx.quad, s, chi);
    const SolveResult result = solve_robin(prob, fx.cfg);

    const oracle::LinearSubdomain sub = oracle::build_linear_subdomain(fx.dec, 2, lambda, f);
    const Matrix m_gamma = oracle::interface_mass_oracle(fx.dec);
    Matrix a = sub.a;
    Vector b = sub.b;
    for (std::size_t k = 0; k < sub.iface.size(); ++k) {
        b[sub.iface[k]] += chi.values[static_cast<Eigen::Index>(k)];
        for (std::size_t l = 0; l < sub.iface.size(); ++l) {
            a(sub.iface[k], sub.iface[l]) +=
                s * m_gamma(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
        }
    }
    const Vector expected = oracle::dense_constrained_solve(
        a, b, sub.dirichlet, Vector::Zero(static_cast<Eigen::Index>(sub.dirichlet.size())));
    CHECK((result.u.coeffs - expected).norm() <= 1e-10);
}

TEST_CASE("solve_robin round-trips a dirichlet solution through its flux data")
{
    // With chi = s J eta* + S eta* the robin solution equals F eta*.
    const Fixture fx(2, 6);
    const double s = 1.5;
    const PStructure ps = make_preset(Preset::reaction, 3.0, 1.0);
    const SourceFn f = [](const Vec2& xy) { return 1.0 + xy[1]; };
    std::mt19937_64 rng(43);
    const TraceVector eta = fx.random_trace(rng, 0.5);

    const auto dprob = dirichlet_problem(fx.dec, 1, ps, f, fx.quad, eta);
    const SolveResult dirichlet = solve_dirichlet(dprob, fx.cfg);

    const Vector raw = assemble_residual_raw(ps, fx.dec.sub[0], dirichlet.u, f, fx.quad);
    Vector flux(fx.dec.n_interface());
    for (int k = 0; k < fx.dec.n_interface(); ++k) {
        flux[k] = raw[fx.dec.iface_to_sub[0][k]];
    }
    const InterfaceMass mass = interface_mass(fx.dec, fx.quad);
    TraceVector chi{fx.dec.id, s * mass.apply(eta.values) + flux};

    const auto rprob = robin_problem(fx.dec, 1, ps, f, fx.quad, s, chi);
    const SolveResult robin = solve_robin(rprob, fx.cfg);
    CHECK((robin.u.coeffs - dirichlet.u.coeffs).lpNorm<Eigen::Infinity>() <=
          10.0 * fx.cfg.tol_residual);
}

TEST_CASE("solve_robin satisfies the discrete variational identity post hoc")
{
    const Fixture fx(2, 6);
    const double s = 0.7;
    const PStructure ps = make_preset(Preset::resolvent, 3.0, 2.0);
    const SourceFn f = [](const Vec2& xy) { return std::sin(3.0 * xy[0]) + 1.0; };
    std::mt19937_64 rng(47);
    const TraceVector chi = fx.random_trace(rng);

    const auto prob = robin_problem(fx.dec, 1, ps, f, fx.quad, s, chi);
    const SolveResult result = solve_robin(prob, fx.cfg);

    Vector r = assemble_residual_raw(ps, fx.dec.sub[0], result.u, f, fx.quad);
    const InterfaceMass mass = interface_mass(fx.dec, fx.quad);
    const TraceVector tu = trace(fx.dec, 1, result.u);
    const Vector robin_rows = s * mass.apply(tu.values) - chi.values;
    for (int k = 0; k < fx.dec.n_interface(); ++k) {
        r[fx.dec.iface_to_sub[0][k]] += robin_rows[k];
    }
    mask_entries(r, fx.dec.sub[0].tagged_vertices(VertexTag::dirichlet));
    CHECK(r.norm() <= 10.0 * fx.cfg.tol_residual);
}
