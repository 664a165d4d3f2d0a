#pragma once

#include "rrdd/mesh.hpp"
#include "rrdd/pstructure.hpp"
#include "rrdd/quadrature.hpp"
#include "rrdd/types.hpp"

#include <vector>

namespace rrdd {

/// Coefficient vector dual to the FE dofs: entry k is a(u, phi_k) - (f, phi_k),
/// with dirichlet entries masked to zero.
struct AssembledResidual {
    Vector values;
};

/// Symmetric positive-definite P1 mass matrix on the interface dofs. In 1D
/// the interface is a single point and the matrix is the 1x1 identity
/// (pointwise pairing).
struct InterfaceMass {
    Matrix m;

    int size() const { return static_cast<int>(m.rows()); }
    double inner(const Vector& a, const Vector& b) const { return a.dot(m * b); }
    double norm(const Vector& a) const;
    Vector apply(const Vector& a) const { return m * a; }
    Vector solve(const Vector& a) const;
};

/// Unmasked residual: entry k equals a(u, phi_k) - (f, phi_k) for every
/// vertex k, dirichlet and interface rows included.
Vector assemble_residual_raw(const PStructure& ps, const Mesh& mesh, const FeFunction& u,
                             const SourceFn& f, const QuadratureRule& quad);

/// Residual with dirichlet-tagged entries masked to zero.
AssembledResidual assemble_residual(const PStructure& ps, const Mesh& mesh,
                                    const FeFunction& u, const SourceFn& f,
                                    const QuadratureRule& quad);

/// Newton matrix without constraints: (k,l) entry is
/// int_Omega Dalpha(grad u) grad phi_l . grad phi_k + g'(u) phi_l phi_k dx
/// with the eps_reg-regularized derivatives.
SparseMatrix assemble_jacobian_raw(const PStructure& ps, const Mesh& mesh,
                                   const FeFunction& u, const QuadratureRule& quad,
                                   double eps_reg);

/// Jacobian with dirichlet rows/columns eliminated (identity diagonal).
SparseMatrix assemble_jacobian(const PStructure& ps, const Mesh& mesh, const FeFunction& u,
                               const QuadratureRule& quad, double eps_reg);

/// Row/column elimination with unit diagonal for an arbitrary dof set.
SparseMatrix constrain_matrix(const SparseMatrix& a, const std::vector<int>& dofs);
void mask_entries(Vector& v, const std::vector<int>& dofs);

InterfaceMass interface_mass(const Decomposition& dec, const QuadratureRule& quad);

/// ||grad u||_{L^p}; exact for P1 (elementwise constant gradients).
double seminorm_grad_lp(const Mesh& mesh, const FeFunction& u, const PStructure& ps);
/// ||u||_{L^r} by quadrature.
double norm_lr(const Mesh& mesh, const FeFunction& u, const PStructure& ps,
               const QuadratureRule& quad);
/// ||grad u||_{L^p} + ||u||_{L^r}.
double norm_w1p(const Mesh& mesh, const FeFunction& u, const PStructure& ps,
                const QuadratureRule& quad);

/// Nodal interpolant of a scalar field.
FeFunction interpolate(const Mesh& mesh, const SourceFn& field);

} // namespace rrdd
