#include "rrdd/fem.hpp"

#include "rrdd/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace rrdd {

namespace {

/// Affine geometry of one P1 element: physical quadrature points, scaled
/// weights, basis values per point, and the constant basis gradients.
struct ElementGeometry {
    int nv = 0;
    std::array<int, 3> verts{};
    std::array<Vec2, 3> grad{};
    double measure = 0.0;

    void init(const Mesh& mesh, int e)
    {
        nv = mesh.verts_per_element();
        const auto& el = mesh.elements[e];
        verts = el;
        if (mesh.dim == 1) {
            const double x0 = mesh.vertices[el[0]][0];
            const double x1 = mesh.vertices[el[1]][0];
            const double h = x1 - x0;
            measure = std::abs(h);
            grad[0] = Vec2(-1.0 / h, 0.0);
            grad[1] = Vec2(1.0 / h, 0.0);
        } else {
            const Vec2& a = mesh.vertices[el[0]];
            const Vec2& b = mesh.vertices[el[1]];
            const Vec2& c = mesh.vertices[el[2]];
            const double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            measure = 0.5 * std::abs(det);
            // grad of barycentric coordinates
            grad[0] = Vec2(b[1] - c[1], c[0] - b[0]) / det;
            grad[1] = Vec2(c[1] - a[1], a[0] - c[0]) / det;
            grad[2] = Vec2(a[1] - b[1], b[0] - a[0]) / det;
        }
    }

    Vec2 map_point(const Mesh& mesh, const Vec2& ref) const
    {
        if (mesh.dim == 1) {
            const Vec2& a = mesh.vertices[verts[0]];
            const Vec2& b = mesh.vertices[verts[1]];
            return a + ref[0] * (b - a);
        }
        const Vec2& a = mesh.vertices[verts[0]];
        const Vec2& b = mesh.vertices[verts[1]];
        const Vec2& c = mesh.vertices[verts[2]];
        return a + ref[0] * (b - a) + ref[1] * (c - a);
    }

    void basis(int dim, const Vec2& ref, std::array<double, 3>& phi) const
    {
        if (dim == 1) {
            phi = {1.0 - ref[0], ref[0], 0.0};
        } else {
            phi = {1.0 - ref[0] - ref[1], ref[0], ref[1]};
        }
    }

    /// Physical weight scale: reference weights already sum to the
    /// reference measure, so scale by measure / reference measure.
    double weight_scale(int dim) const { return dim == 1 ? measure : 2.0 * measure; }
};

void check_mesh_fn(const Mesh& mesh, const FeFunction& u, const char* where)
{
    if (u.mesh_id != mesh.id || u.coeffs.size() != mesh.n_vertices()) {
        throw InvalidArgument(std::string(where) + ": function does not live on this mesh");
    }
}

void check_quad(const Mesh& mesh, const QuadratureRule& quad, const char* where)
{
    if (quad.dim != mesh.dim || quad.order < 1) {
        throw InvalidArgument(std::string(where) + ": quadrature rule does not match mesh");
    }
}

} // namespace

Vector assemble_residual_raw(const PStructure& ps, const Mesh& mesh, const FeFunction& u,
                             const SourceFn& f, const QuadratureRule& quad)
{
    check_mesh_fn(mesh, u, "assemble_residual");
    check_quad(mesh, quad, "assemble_residual");

    Vector r = Vector::Zero(mesh.n_vertices());
    ElementGeometry geom;
    std::array<double, 3> phi{};

    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.init(mesh, e);
        Vec2 grad_u = Vec2::Zero();
        for (int k = 0; k < geom.nv; ++k) {
            grad_u += u.coeffs[geom.verts[k]] * geom.grad[k];
        }
        const Vec2 flux = alpha_eval(ps, grad_u);
        const double wscale = geom.weight_scale(mesh.dim);

        for (int q = 0; q < quad.n_points(); ++q) {
            geom.basis(mesh.dim, quad.points[q], phi);
            double uq = 0.0;
            for (int k = 0; k < geom.nv; ++k) {
                uq += phi[k] * u.coeffs[geom.verts[k]];
            }
            const double gq = g_eval(ps, uq);
            const double fq = f(geom.map_point(mesh, quad.points[q]));
            const double w = quad.weights[q] * wscale;
            for (int k = 0; k < geom.nv; ++k) {
                r[geom.verts[k]] += w * (flux.dot(geom.grad[k]) + (gq - fq) * phi[k]);
            }
        }
    }
    return r;
}

AssembledResidual assemble_residual(const PStructure& ps, const Mesh& mesh,
                                    const FeFunction& u, const SourceFn& f,
                                    const QuadratureRule& quad)
{
    AssembledResidual out{assemble_residual_raw(ps, mesh, u, f, quad)};
    mask_entries(out.values, mesh.tagged_vertices(VertexTag::dirichlet));
    return out;
}

SparseMatrix assemble_jacobian_raw(const PStructure& ps, const Mesh& mesh,
                                   const FeFunction& u, const QuadratureRule& quad,
                                   double eps_reg)
{
    check_mesh_fn(mesh, u, "assemble_jacobian");
    check_quad(mesh, quad, "assemble_jacobian");

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(mesh.n_elements()) * 9);
    ElementGeometry geom;
    std::array<double, 3> phi{};

    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.init(mesh, e);
        Vec2 grad_u = Vec2::Zero();
        for (int k = 0; k < geom.nv; ++k) {
            grad_u += u.coeffs[geom.verts[k]] * geom.grad[k];
        }
        const Mat2 dalpha = alpha_jacobian(ps, grad_u, eps_reg);
        const double wscale = geom.weight_scale(mesh.dim);

        for (int q = 0; q < quad.n_points(); ++q) {
            geom.basis(mesh.dim, quad.points[q], phi);
            double uq = 0.0;
            for (int k = 0; k < geom.nv; ++k) {
                uq += phi[k] * u.coeffs[geom.verts[k]];
            }
            const double dg = g_derivative(ps, uq, eps_reg);
            const double w = quad.weights[q] * wscale;
            for (int k = 0; k < geom.nv; ++k) {
                const Vec2 dflux = dalpha * geom.grad[k];
                for (int l = 0; l < geom.nv; ++l) {
                    const double val = w * (dflux.dot(geom.grad[l]) + dg * phi[k] * phi[l]);
                    trips.emplace_back(geom.verts[l], geom.verts[k], val);
                }
            }
        }
    }
    SparseMatrix a(mesh.n_vertices(), mesh.n_vertices());
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

SparseMatrix assemble_jacobian(const PStructure& ps, const Mesh& mesh, const FeFunction& u,
                               const QuadratureRule& quad, double eps_reg)
{
    return constrain_matrix(assemble_jacobian_raw(ps, mesh, u, quad, eps_reg),
                            mesh.tagged_vertices(VertexTag::dirichlet));
}

SparseMatrix constrain_matrix(const SparseMatrix& a, const std::vector<int>& dofs)
{
    std::vector<char> fixed(a.rows(), 0);
    for (int d : dofs) {
        fixed[d] = 1;
    }
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) + dofs.size());
    for (int col = 0; col < a.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
            if (!fixed[it.row()] && !fixed[it.col()]) {
                trips.emplace_back(it.row(), it.col(), it.value());
            }
        }
    }
    for (int d : dofs) {
        trips.emplace_back(d, d, 1.0);
    }
    SparseMatrix out(a.rows(), a.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

void mask_entries(Vector& v, const std::vector<int>& dofs)
{
    for (int d : dofs) {
        v[d] = 0.0;
    }
}

double InterfaceMass::norm(const Vector& a) const
{
    return std::sqrt(std::max(0.0, inner(a, a)));
}

Vector InterfaceMass::solve(const Vector& a) const
{
    return m.ldlt().solve(a);
}

InterfaceMass interface_mass(const Decomposition& dec, const QuadratureRule& quad)
{
    const int m = dec.n_interface();
    if (dec.global.dim == 1) {
        return InterfaceMass{Matrix::Identity(1, 1)};
    }

    // 1D P1 mass along the cut line; rows/cols of the dirichlet endpoints
    // are dropped, which restricts the pairing to the interface basis.
    const QuadratureRule line_quad = make_quadrature(1, std::max(2, quad.order));
    Matrix mass = Matrix::Zero(m, m);
    const int tr = 1 - static_cast<int>(dec.axis);
    for (std::size_t s = 0; s + 1 < dec.gamma_line.size(); ++s) {
        const double h = dec.global.vertices[dec.gamma_line[s + 1]][tr] -
                         dec.global.vertices[dec.gamma_line[s]][tr];
        const int d0 = dec.gamma_line_dof[s];
        const int d1 = dec.gamma_line_dof[s + 1];
        double m00 = 0.0, m01 = 0.0, m11 = 0.0;
        for (int q = 0; q < line_quad.n_points(); ++q) {
            const double t = line_quad.points[q][0];
            const double w = line_quad.weights[q] * h;
            m00 += w * (1.0 - t) * (1.0 - t);
            m01 += w * (1.0 - t) * t;
            m11 += w * t * t;
        }
        if (d0 >= 0) mass(d0, d0) += m00;
        if (d1 >= 0) mass(d1, d1) += m11;
        if (d0 >= 0 && d1 >= 0) {
            mass(d0, d1) += m01;
            mass(d1, d0) += m01;
        }
    }
    return InterfaceMass{std::move(mass)};
}

double seminorm_grad_lp(const Mesh& mesh, const FeFunction& u, const PStructure& ps)
{
    check_mesh_fn(mesh, u, "seminorm_grad_lp");
    ElementGeometry geom;
    double acc = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.init(mesh, e);
        Vec2 grad_u = Vec2::Zero();
        for (int k = 0; k < geom.nv; ++k) {
            grad_u += u.coeffs[geom.verts[k]] * geom.grad[k];
        }
        acc += geom.measure * std::pow(grad_u.norm(), ps.p);
    }
    return std::pow(acc, 1.0 / ps.p);
}

double norm_lr(const Mesh& mesh, const FeFunction& u, const PStructure& ps,
               const QuadratureRule& quad)
{
    check_mesh_fn(mesh, u, "norm_lr");
    check_quad(mesh, quad, "norm_lr");
    ElementGeometry geom;
    std::array<double, 3> phi{};
    double acc = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        geom.init(mesh, e);
        const double wscale = geom.weight_scale(mesh.dim);
        for (int q = 0; q < quad.n_points(); ++q) {
            geom.basis(mesh.dim, quad.points[q], phi);
            double uq = 0.0;
            for (int k = 0; k < geom.nv; ++k) {
                uq += phi[k] * u.coeffs[geom.verts[k]];
            }
            acc += quad.weights[q] * wscale * std::pow(std::abs(uq), ps.r);
        }
    }
    return std::pow(acc, 1.0 / ps.r);
}

double norm_w1p(const Mesh& mesh, const FeFunction& u, const PStructure& ps,
                const QuadratureRule& quad)
{
    return seminorm_grad_lp(mesh, u, ps) + norm_lr(mesh, u, ps, quad);
}

FeFunction interpolate(const Mesh& mesh, const SourceFn& field)
{
    FeFunction u{mesh.id, Vector(mesh.n_vertices())};
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        u.coeffs[v] = field(mesh.vertices[v]);
    }
    return u;
}

} // namespace rrdd
