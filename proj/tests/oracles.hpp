#pragma once

// Independent reference implementations used by the test suites. Everything
// here is assembled from explicit formulas and dense linear algebra so the
// main quadrature/assembly path is never exercised by an oracle.

#include "rrdd/mesh.hpp"
#include "rrdd/types.hpp"

#include <functional>
#include <vector>

namespace oracle {

/// Dense P1 stiffness and mass matrices from the classical element formulas
/// (tridiagonal h-formulas in 1D, edge-vector formulas on triangles).
struct LinearOperators {
    rrdd::Matrix stiffness;
    rrdd::Matrix mass;
};
LinearOperators build_linear_operators(const rrdd::Mesh& mesh);

/// Nodal values of a field.
rrdd::Vector nodal_values(const rrdd::Mesh& mesh,
                          const std::function<double(const rrdd::Vec2&)>& field);

/// Dense solve of A u = rhs with pinned dofs holding pinned_values.
rrdd::Vector dense_constrained_solve(const rrdd::Matrix& a, const rrdd::Vector& rhs,
                                     const std::vector<int>& pinned,
                                     const rrdd::Vector& pinned_values);

/// Linear subdomain system A = K + lambda M, b = M f_nodal, with the vertex
/// index sets needed for Schur complements. Source f must be affine for the
/// load formula to be exact.
struct LinearSubdomain {
    rrdd::Matrix a;
    rrdd::Vector b;
    std::vector<int> dirichlet;
    std::vector<int> iface;    ///< subdomain vertex ids in canonical order
    std::vector<int> interior; ///< everything else
};
LinearSubdomain build_linear_subdomain(const rrdd::Decomposition& dec, int side,
                                       double lambda,
                                       const std::function<double(const rrdd::Vec2&)>& f);

/// Dense Steklov-Poincare data: dual action = schur * eta + load.
struct SchurOracle {
    rrdd::Matrix schur;
    rrdd::Vector load;

    rrdd::Vector apply(const rrdd::Vector& eta) const { return schur * eta + load; }
};
SchurOracle build_schur(const LinearSubdomain& sub);

/// Interface mass from the exact segment formulas; [[1]] in 1D.
rrdd::Matrix interface_mass_oracle(const rrdd::Decomposition& dec);

/// Dense linear Robin-Robin iteration mirroring the alternating subdomain
/// sweeps; returns the interface traces of the first `steps` iterations.
struct LinearRobinIterate {
    rrdd::Vector eta1;
    rrdd::Vector eta2;
    rrdd::Vector u1; ///< full subdomain coefficient vectors
    rrdd::Vector u2;
};
std::vector<LinearRobinIterate> dense_robin_robin(const rrdd::Decomposition& dec,
                                                  double lambda, double s,
                                                  const std::function<double(const rrdd::Vec2&)>& f,
                                                  const rrdd::Vector& eta20, int steps);

/// Dense Peaceman-Rachford iteration on interface data only.
std::vector<LinearRobinIterate> dense_peaceman_rachford(
    const rrdd::Decomposition& dec, double lambda, double s,
    const std::function<double(const rrdd::Vec2&)>& f, const rrdd::Vector& eta20,
    int steps);

/// Central-difference Jacobian of a vector map.
rrdd::Matrix central_jacobian(const std::function<rrdd::Vector(const rrdd::Vector&)>& fn,
                              const rrdd::Vector& at, double h);

/// Exact monomial integral over the unit triangle: x^a y^b -> a! b! / (a+b+2)!.
double triangle_monomial_integral(int a, int b);

} // namespace oracle
