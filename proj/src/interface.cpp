#include "rrdd/interface.hpp"

#include "rrdd/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace rrdd {

namespace {

void check_problem(const InterfaceProblem& prob)
{
    if (prob.dec == nullptr || prob.ps == nullptr || !prob.f) {
        throw InvalidArgument("InterfaceProblem: missing decomposition, nonlinearity or source");
    }
    if (!(prob.s > 0.0)) {
        throw InvalidArgument("InterfaceProblem: method parameter s must be > 0");
    }
}

void check_trace(const InterfaceProblem& prob, const TraceVector& eta, const char* where)
{
    if (eta.dec_id != prob.dec->id || eta.size() != prob.dec->n_interface()) {
        throw InvalidArgument(std::string(where) + ": trace vector size mismatch");
    }
}

Vector raw_residual_of(const InterfaceProblem& prob, int side, const FeFunction& u)
{
    return assemble_residual_raw(*prob.ps, prob.dec->sub[side - 1], u, prob.f, prob.quad);
}

/// Robin dual data s J eta - S_side eta, with S_side eta taken from the
/// unmasked residual of `u` (assumed equal to F_side eta at its own trace).
TraceVector robin_dual_data(const InterfaceProblem& prob, const InterfaceMass& mass,
                            int side, const TraceVector& eta, const FeFunction& u)
{
    const DualTrace flux = gather_interface_dual(*prob.dec, side, raw_residual_of(prob, side, u));
    return TraceVector{prob.dec->id, prob.s * mass.apply(eta.values) - flux.values};
}

[[noreturn]] void rethrow_half_step(const SolveFailure& failure, int n, int side)
{
    throw SolveFailure("outer iteration " + std::to_string(n) + ", half-step on subdomain " +
                           std::to_string(side) + ": " + failure.what(),
                       failure.residual_history);
}

double mesh_width(const Mesh& mesh)
{
    double h = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& el = mesh.elements[e];
        for (int a = 0; a < mesh.verts_per_element(); ++a) {
            for (int b = a + 1; b < mesh.verts_per_element(); ++b) {
                h = std::max(h, (mesh.vertices[el[a]] - mesh.vertices[el[b]]).norm());
            }
        }
    }
    return h;
}

} // namespace

DualTrace gather_interface_dual(const Decomposition& dec, int side, const Vector& raw_residual)
{
    if (side != 1 && side != 2) {
        throw InvalidArgument("gather_interface_dual: side must be 1 or 2");
    }
    const auto& map = dec.iface_to_sub[side - 1];
    if (raw_residual.size() != dec.sub[side - 1].n_vertices()) {
        throw InvalidArgument("gather_interface_dual: residual size mismatch");
    }
    DualTrace out{dec.id, Vector(dec.n_interface())};
    for (int k = 0; k < dec.n_interface(); ++k) {
        out.values[k] = raw_residual[map[k]];
    }
    return out;
}

SteklovResult steklov_apply_full(const InterfaceProblem& prob, int side,
                                 const TraceVector& eta, const FeFunction* warm_start)
{
    check_problem(prob);
    check_trace(prob, eta, "steklov_apply");
    auto dirichlet =
        dirichlet_problem(*prob.dec, side, *prob.ps, prob.f, prob.quad, eta);
    SolveResult solved = solve_dirichlet(dirichlet, prob.newton, warm_start);
    DualTrace flux = gather_interface_dual(*prob.dec, side,
                                           raw_residual_of(prob, side, solved.u));
    return SteklovResult{std::move(flux), std::move(solved.u), std::move(solved.newton)};
}

DualTrace steklov_apply(const InterfaceProblem& prob, int side, const TraceVector& eta,
                        const FeFunction* warm_start)
{
    return steklov_apply_full(prob, side, eta, warm_start).flux;
}

DualTrace steklov_residual(const InterfaceProblem& prob, const TraceVector& eta)
{
    const DualTrace s1 = steklov_apply(prob, 1, eta);
    const DualTrace s2 = steklov_apply(prob, 2, eta);
    return DualTrace{prob.dec->id, s1.values + s2.values};
}

TraceVector default_initial_trace(const InterfaceProblem& prob)
{
    check_problem(prob);
    auto natural = natural_problem(*prob.dec, 2, *prob.ps, prob.f, prob.quad);
    const SolveResult solved = solve_natural(natural, prob.newton);
    return trace(*prob.dec, 2, solved.u);
}

InterfaceState make_initial_state(const InterfaceProblem& prob, const TraceVector& eta20)
{
    check_problem(prob);
    check_trace(prob, eta20, "make_initial_state");
    InterfaceState state;
    state.n = 0;
    state.s = prob.s;
    state.eta1 = eta20;
    state.eta2 = eta20;
    state.u1 = zero_function(prob.dec->sub[0]);
    auto dirichlet = dirichlet_problem(*prob.dec, 2, *prob.ps, prob.f, prob.quad, eta20);
    SolveResult solved = solve_dirichlet(dirichlet, prob.newton);
    state.u2 = std::move(solved.u);
    state.newton2 = solved.newton.iterations;
    return state;
}

InterfaceState robin_robin_step(const InterfaceProblem& prob, const InterfaceState& state)
{
    check_problem(prob);
    check_trace(prob, state.eta2, "robin_robin_step");
    const InterfaceMass mass = interface_mass(*prob.dec, prob.quad);

    InterfaceState next;
    next.n = state.n + 1;
    next.s = prob.s;

    // S2 eta2^n: the stored u2 already equals F_2 eta2^n at its own trace,
    // so its unmasked residual provides the dual data without a new solve.
    TraceVector chi1{prob.dec->id, Vector()};
    if (prob.strict_recompute) {
        const SteklovResult s2 = steklov_apply_full(prob, 2, state.eta2, &state.u2);
        chi1.values = prob.s * mass.apply(state.eta2.values) - s2.flux.values;
    } else {
        chi1 = robin_dual_data(prob, mass, 2, state.eta2, state.u2);
    }

    try {
        auto robin1 = robin_problem(*prob.dec, 1, *prob.ps, prob.f, prob.quad, prob.s, chi1);
        SolveResult solved = solve_robin(robin1, prob.newton,
                                         state.n > 0 ? &state.u1 : nullptr);
        next.u1 = std::move(solved.u);
        next.newton1 = solved.newton.iterations;
    } catch (const SolveFailure& failure) {
        rethrow_half_step(failure, next.n, 1);
    }
    next.eta1 = trace(*prob.dec, 1, next.u1);

    TraceVector chi2{prob.dec->id, Vector()};
    if (prob.strict_recompute) {
        const SteklovResult s1 = steklov_apply_full(prob, 1, next.eta1, &next.u1);
        chi2.values = prob.s * mass.apply(next.eta1.values) - s1.flux.values;
    } else {
        chi2 = robin_dual_data(prob, mass, 1, next.eta1, next.u1);
    }

    try {
        auto robin2 = robin_problem(*prob.dec, 2, *prob.ps, prob.f, prob.quad, prob.s, chi2);
        SolveResult solved = solve_robin(robin2, prob.newton, &state.u2);
        next.u2 = std::move(solved.u);
        next.newton2 = solved.newton.iterations;
    } catch (const SolveFailure& failure) {
        rethrow_half_step(failure, next.n, 2);
    }
    next.eta2 = trace(*prob.dec, 2, next.u2);
    return next;
}

InterfaceState peaceman_rachford_step(const InterfaceProblem& prob,
                                      const InterfaceState& state)
{
    check_problem(prob);
    check_trace(prob, state.eta2, "peaceman_rachford_step");
    const InterfaceMass mass = interface_mass(*prob.dec, prob.quad);

    InterfaceState next;
    next.n = state.n + 1;
    next.s = prob.s;

    // First resolvent: eta1^{n+1} = (sI + S_1)^{-1} (sI - S_2) eta2^n, with
    // S_i = M^{-1} S_i materialized on L2(Gamma).
    const SteklovResult s2 = steklov_apply_full(prob, 2, state.eta2, &state.u2);
    const Vector cal_s2 = mass.solve(s2.flux.values);
    const Vector rhs1 = prob.s * state.eta2.values - cal_s2;
    try {
        auto robin1 = robin_problem(*prob.dec, 1, *prob.ps, prob.f, prob.quad, prob.s,
                                    TraceVector{prob.dec->id, mass.apply(rhs1)});
        SolveResult solved = solve_robin(robin1, prob.newton,
                                         state.n > 0 ? &state.u1 : nullptr);
        next.u1 = std::move(solved.u);
        next.newton1 = solved.newton.iterations + s2.newton.iterations;
    } catch (const SolveFailure& failure) {
        rethrow_half_step(failure, next.n, 1);
    }
    next.eta1 = trace(*prob.dec, 1, next.u1);

    const SteklovResult s1 = steklov_apply_full(prob, 1, next.eta1, &next.u1);
    const Vector cal_s1 = mass.solve(s1.flux.values);
    const Vector rhs2 = prob.s * next.eta1.values - cal_s1;
    try {
        auto robin2 = robin_problem(*prob.dec, 2, *prob.ps, prob.f, prob.quad, prob.s,
                                    TraceVector{prob.dec->id, mass.apply(rhs2)});
        SolveResult solved = solve_robin(robin2, prob.newton, &state.u2);
        next.u2 = std::move(solved.u);
        next.newton2 = solved.newton.iterations + s1.newton.iterations;
    } catch (const SolveFailure& failure) {
        rethrow_half_step(failure, next.n, 2);
    }
    next.eta2 = trace(*prob.dec, 2, next.u2);
    return next;
}

ConvergenceHistory run(const InterfaceProblem& prob, const TraceVector& eta20,
                       const StopRule& stop,
                       const std::optional<ReferenceData>& reference,
                       InterfaceState* final_state)
{
    check_problem(prob);
    check_trace(prob, eta20, "run");
    if (stop.max_outer < 1 || !(stop.tol_gap > 0.0)) {
        throw InvalidArgument("run: requires max_outer >= 1 and tol_gap > 0");
    }

    const InterfaceMass mass = interface_mass(*prob.dec, prob.quad);

    ConvergenceHistory hist;
    hist.meta.p = prob.ps->p;
    hist.meta.r = prob.ps->r;
    hist.meta.s = prob.s;
    hist.meta.h = mesh_width(prob.dec->global);
    hist.meta.preset = prob.ps->name;
    hist.meta.tol_gap = stop.tol_gap;
    hist.meta.newton_tol = prob.newton.tol_residual;
    hist.meta.has_reference = reference.has_value();

    // Reference quantities mu = (sI + S_2) eta*, lambda = (sI - S_2) eta*.
    Vector mu_ref, lambda_ref;
    std::array<FeFunction, 2> u_ref;
    if (reference) {
        check_trace(prob, reference->eta_star, "run (reference)");
        const DualTrace s2_star = steklov_apply(prob, 2, reference->eta_star);
        const Vector cal_s2 = mass.solve(s2_star.values);
        mu_ref = prob.s * reference->eta_star.values + cal_s2;
        lambda_ref = prob.s * reference->eta_star.values - cal_s2;
        u_ref[0] = restrict_to(*prob.dec, 1, reference->u_global);
        u_ref[1] = restrict_to(*prob.dec, 2, reference->u_global);
    }

    auto mu_lambda_errors = [&](const InterfaceState& state, double& mu_err,
                                double& lambda_err) {
        if (!reference) {
            mu_err = kNoValue;
            lambda_err = kNoValue;
            return;
        }
        const DualTrace s2 =
            gather_interface_dual(*prob.dec, 2, raw_residual_of(prob, 2, state.u2));
        const Vector cal_s2 = mass.solve(s2.values);
        const Vector mu_n = prob.s * state.eta2.values + cal_s2;
        const Vector lambda_n = prob.s * state.eta2.values - cal_s2;
        mu_err = mass.norm(mu_n - mu_ref);
        lambda_err = mass.norm(lambda_n - lambda_ref);
    };

    InterfaceState state = make_initial_state(prob, eta20);
    mu_lambda_errors(state, hist.meta.mu0_err, hist.meta.lambda0_err);

    for (int n = 1; n <= stop.max_outer; ++n) {
        state = robin_robin_step(prob, state);

        IterationRecord rec;
        rec.n = state.n;
        rec.gap = mass.norm(state.eta1.values - state.eta2.values);
        rec.newton1 = state.newton1;
        rec.newton2 = state.newton2;
        if (reference) {
            rec.err_eta1 = mass.norm(state.eta1.values - reference->eta_star.values);
            rec.err_eta2 = mass.norm(state.eta2.values - reference->eta_star.values);
            FeFunction d1{state.u1.mesh_id, state.u1.coeffs - u_ref[0].coeffs};
            FeFunction d2{state.u2.mesh_id, state.u2.coeffs - u_ref[1].coeffs};
            rec.err_u1 = norm_w1p(prob.dec->sub[0], d1, *prob.ps, prob.quad);
            rec.err_u2 = norm_w1p(prob.dec->sub[1], d2, *prob.ps, prob.quad);
        }
        mu_lambda_errors(state, rec.mu_err, rec.lambda_err);
        hist.records.push_back(rec);

        if (rec.gap <= stop.tol_gap) {
            hist.converged = true;
            break;
        }
    }

    if (!hist.records.empty()) {
        hist.final_gap = hist.records.back().gap;
    }

    // Flux balance at the final iterate, in the dual (M^{-1}) norm.
    const DualTrace s1 = gather_interface_dual(*prob.dec, 1, raw_residual_of(prob, 1, state.u1));
    const DualTrace s2 = gather_interface_dual(*prob.dec, 2, raw_residual_of(prob, 2, state.u2));
    const Vector imbalance = s1.values + s2.values;
    hist.flux_residual = std::sqrt(std::max(0.0, imbalance.dot(mass.solve(imbalance))));
    if (final_state != nullptr) {
        *final_state = std::move(state);
    }
    return hist;
}

} // namespace rrdd
