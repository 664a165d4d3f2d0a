#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace oracle {

using rrdd::Matrix;
using rrdd::Mesh;
using rrdd::Vec2;
using rrdd::Vector;
using rrdd::VertexTag;

LinearOperators build_linear_operators(const Mesh& mesh)
{
    const int n = mesh.n_vertices();
    LinearOperators ops{Matrix::Zero(n, n), Matrix::Zero(n, n)};

    if (mesh.dim == 1) {
        for (const auto& el : mesh.elements) {
            const int a = el[0], b = el[1];
            const double h = std::abs(mesh.vertices[b][0] - mesh.vertices[a][0]);
            ops.stiffness(a, a) += 1.0 / h;
            ops.stiffness(b, b) += 1.0 / h;
            ops.stiffness(a, b) -= 1.0 / h;
            ops.stiffness(b, a) -= 1.0 / h;
            ops.mass(a, a) += h / 3.0;
            ops.mass(b, b) += h / 3.0;
            ops.mass(a, b) += h / 6.0;
            ops.mass(b, a) += h / 6.0;
        }
        return ops;
    }

    for (const auto& el : mesh.elements) {
        const Vec2& p0 = mesh.vertices[el[0]];
        const Vec2& p1 = mesh.vertices[el[1]];
        const Vec2& p2 = mesh.vertices[el[2]];
        // K_ij = (b_i b_j + c_i c_j) / (4 A) with the edge-opposite
        // coefficients b_i = y_j - y_k, c_i = x_k - x_j.
        const double bcoef[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
        const double ccoef[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
        const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) -
                           (p1[1] - p0[1]) * (p2[0] - p0[0]);
        const double area = 0.5 * std::abs(det);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                ops.stiffness(el[i], el[j]) +=
                    (bcoef[i] * bcoef[j] + ccoef[i] * ccoef[j]) / (4.0 * area);
                ops.mass(el[i], el[j]) += area / 12.0 * (i == j ? 2.0 : 1.0);
            }
        }
    }
    return ops;
}

Vector nodal_values(const Mesh& mesh, const std::function<double(const Vec2&)>& field)
{
    Vector v(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        v[i] = field(mesh.vertices[i]);
    }
    return v;
}

Vector dense_constrained_solve(const Matrix& a, const Vector& rhs,
                               const std::vector<int>& pinned,
                               const Vector& pinned_values)
{
    Matrix ac = a;
    Vector bc = rhs;
    for (std::size_t k = 0; k < pinned.size(); ++k) {
        const int d = pinned[k];
        bc -= ac.col(d) * pinned_values[static_cast<Eigen::Index>(k)];
        ac.row(d).setZero();
        ac.col(d).setZero();
        ac(d, d) = 1.0;
        bc[d] = pinned_values[static_cast<Eigen::Index>(k)];
    }
    return ac.lu().solve(bc);
}

LinearSubdomain build_linear_subdomain(const rrdd::Decomposition& dec, int side,
                                       double lambda,
                                       const std::function<double(const Vec2&)>& f)
{
    const Mesh& mesh = dec.sub[side - 1];
    const LinearOperators ops = build_linear_operators(mesh);
    LinearSubdomain sub;
    sub.a = ops.stiffness + lambda * ops.mass;
    sub.b = ops.mass * nodal_values(mesh, f);
    sub.dirichlet = mesh.tagged_vertices(VertexTag::dirichlet);
    sub.iface = dec.iface_to_sub[side - 1];
    std::vector<char> skip(mesh.n_vertices(), 0);
    for (int d : sub.dirichlet) skip[d] = 1;
    for (int d : sub.iface) skip[d] = 1;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (!skip[v]) {
            sub.interior.push_back(v);
        }
    }
    return sub;
}

SchurOracle build_schur(const LinearSubdomain& sub)
{
    const auto& ii = sub.interior;
    const auto& gg = sub.iface;
    const int ni = static_cast<int>(ii.size());
    const int ng = static_cast<int>(gg.size());

    Matrix a_ii(ni, ni), a_ig(ni, ng), a_gi(ng, ni), a_gg(ng, ng);
    Vector b_i(ni), b_g(ng);
    for (int i = 0; i < ni; ++i) {
        b_i[i] = sub.b[ii[i]];
        for (int j = 0; j < ni; ++j) a_ii(i, j) = sub.a(ii[i], ii[j]);
        for (int j = 0; j < ng; ++j) a_ig(i, j) = sub.a(ii[i], gg[j]);
    }
    for (int i = 0; i < ng; ++i) {
        b_g[i] = sub.b[gg[i]];
        for (int j = 0; j < ni; ++j) a_gi(i, j) = sub.a(gg[i], ii[j]);
        for (int j = 0; j < ng; ++j) a_gg(i, j) = sub.a(gg[i], gg[j]);
    }

    const Eigen::PartialPivLU<Matrix> lu(a_ii);
    SchurOracle schur;
    schur.schur = a_gg - a_gi * lu.solve(a_ig);
    schur.load = a_gi * lu.solve(b_i) - b_g;
    return schur;
}

Matrix interface_mass_oracle(const rrdd::Decomposition& dec)
{
    const int m = dec.n_interface();
    if (dec.global.dim == 1) {
        return Matrix::Identity(1, 1);
    }
    Matrix mass = Matrix::Zero(m, m);
    const int tr = 1 - static_cast<int>(dec.axis);
    for (std::size_t seg = 0; seg + 1 < dec.gamma_line.size(); ++seg) {
        const double h = dec.global.vertices[dec.gamma_line[seg + 1]][tr] -
                         dec.global.vertices[dec.gamma_line[seg]][tr];
        const int d0 = dec.gamma_line_dof[seg];
        const int d1 = dec.gamma_line_dof[seg + 1];
        if (d0 >= 0) mass(d0, d0) += h / 3.0;
        if (d1 >= 0) mass(d1, d1) += h / 3.0;
        if (d0 >= 0 && d1 >= 0) {
            mass(d0, d1) += h / 6.0;
            mass(d1, d0) += h / 6.0;
        }
    }
    return mass;
}

namespace {

struct DenseHalfStep {
    // [A + s * scatter(M_G)] with dirichlet pinned, factorized once.
    Eigen::PartialPivLU<Matrix> lu;
    const LinearSubdomain* sub = nullptr;
    Matrix robin; ///< s * M_G

    void init(const LinearSubdomain& s_in, const Matrix& m_gamma, double s)
    {
        sub = &s_in;
        robin = s * m_gamma;
        Matrix a = sub->a;
        const int ng = static_cast<int>(sub->iface.size());
        for (int k = 0; k < ng; ++k) {
            for (int l = 0; l < ng; ++l) {
                a(sub->iface[k], sub->iface[l]) += robin(k, l);
            }
        }
        for (int d : sub->dirichlet) {
            a.row(d).setZero();
            a.col(d).setZero();
            a(d, d) = 1.0;
        }
        lu.compute(a);
    }

    Vector solve(const Vector& chi) const
    {
        Vector rhs = sub->b;
        const int ng = static_cast<int>(sub->iface.size());
        for (int k = 0; k < ng; ++k) {
            rhs[sub->iface[k]] += chi[k];
        }
        for (int d : sub->dirichlet) {
            rhs[d] = 0.0;
        }
        return lu.solve(rhs);
    }

    /// Unconstrained residual rows at the interface: (A u - b)_Gamma.
    Vector flux(const Vector& u) const
    {
        const Vector r = sub->a * u - sub->b;
        const int ng = static_cast<int>(sub->iface.size());
        Vector out(ng);
        for (int k = 0; k < ng; ++k) {
            out[k] = r[sub->iface[k]];
        }
        return out;
    }

    Vector trace_of(const Vector& u) const
    {
        const int ng = static_cast<int>(sub->iface.size());
        Vector out(ng);
        for (int k = 0; k < ng; ++k) {
            out[k] = u[sub->iface[k]];
        }
        return out;
    }
};

} // namespace

std::vector<LinearRobinIterate> dense_robin_robin(const rrdd::Decomposition& dec,
                                                  double lambda, double s,
                                                  const std::function<double(const Vec2&)>& f,
                                                  const Vector& eta20, int steps)
{
    const LinearSubdomain sub1 = build_linear_subdomain(dec, 1, lambda, f);
    const LinearSubdomain sub2 = build_linear_subdomain(dec, 2, lambda, f);
    const Matrix m_gamma = interface_mass_oracle(dec);

    DenseHalfStep half1, half2;
    half1.init(sub1, m_gamma, s);
    half2.init(sub2, m_gamma, s);

    // u2^0 = F_2 eta20 via a dense Dirichlet solve.
    std::vector<int> pinned2 = sub2.dirichlet;
    Vector pinned_vals = Vector::Zero(static_cast<Eigen::Index>(pinned2.size()) +
                                      static_cast<Eigen::Index>(sub2.iface.size()));
    for (std::size_t k = 0; k < sub2.iface.size(); ++k) {
        pinned2.push_back(sub2.iface[k]);
        pinned_vals[static_cast<Eigen::Index>(sub2.dirichlet.size() + k)] = eta20[static_cast<Eigen::Index>(k)];
    }
    Vector u2 = dense_constrained_solve(sub2.a, sub2.b, pinned2, pinned_vals);
    Vector eta2 = eta20;

    std::vector<LinearRobinIterate> iterates;
    for (int n = 0; n < steps; ++n) {
        const Vector chi1 = s * (m_gamma * eta2) - half2.flux(u2);
        const Vector u1 = half1.solve(chi1);
        const Vector eta1 = half1.trace_of(u1);

        const Vector chi2 = s * (m_gamma * eta1) - half1.flux(u1);
        u2 = half2.solve(chi2);
        eta2 = half2.trace_of(u2);

        iterates.push_back(LinearRobinIterate{eta1, eta2, u1, u2});
    }
    return iterates;
}

std::vector<LinearRobinIterate> dense_peaceman_rachford(
    const rrdd::Decomposition& dec, double lambda, double s,
    const std::function<double(const Vec2&)>& f, const Vector& eta20, int steps)
{
    const SchurOracle s1 = build_schur(build_linear_subdomain(dec, 1, lambda, f));
    const SchurOracle s2 = build_schur(build_linear_subdomain(dec, 2, lambda, f));
    const Matrix m_gamma = interface_mass_oracle(dec);

    const Eigen::PartialPivLU<Matrix> lhs1(s * m_gamma + s1.schur);
    const Eigen::PartialPivLU<Matrix> lhs2(s * m_gamma + s2.schur);

    Vector eta2 = eta20;
    std::vector<LinearRobinIterate> iterates;
    for (int n = 0; n < steps; ++n) {
        const Vector eta1 = lhs1.solve(s * (m_gamma * eta2) - s2.apply(eta2) - s1.load);
        eta2 = lhs2.solve(s * (m_gamma * eta1) - s1.apply(eta1) - s2.load);
        iterates.push_back(LinearRobinIterate{eta1, eta2, Vector(), Vector()});
    }
    return iterates;
}

Matrix central_jacobian(const std::function<Vector(const Vector&)>& fn, const Vector& at,
                        double h)
{
    const Vector f0 = fn(at);
    Matrix jac(f0.size(), at.size());
    for (Eigen::Index j = 0; j < at.size(); ++j) {
        Vector xp = at, xm = at;
        xp[j] += h;
        xm[j] -= h;
        jac.col(j) = (fn(xp) - fn(xm)) / (2.0 * h);
    }
    return jac;
}

double triangle_monomial_integral(int a, int b)
{
    auto factorial = [](int k) {
        double out = 1.0;
        for (int i = 2; i <= k; ++i) out *= i;
        return out;
    };
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

} // namespace oracle
