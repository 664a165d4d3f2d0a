#pragma once

#include "rrdd/types.hpp"

#include <vector>

namespace rrdd {

/// Quadrature rule on the reference element: the unit segment [0,1]
/// (measure 1) or the unit triangle {x,y >= 0, x+y <= 1} (measure 1/2).
/// Weights are positive and sum to the reference measure.
struct QuadratureRule {
    int dim = 1;
    int order = 0; ///< polynomial degree integrated exactly
    std::vector<Vec2> points;
    std::vector<double> weights;

    int n_points() const { return static_cast<int>(points.size()); }
};

/// Rule exact for polynomials of degree >= order. 1D rules are Gauss-Legendre
/// (any order); 2D rules are symmetric positive triangle rules up to order 6
/// (higher requests clamp to 6).
QuadratureRule make_quadrature(int dim, int order);

} // namespace rrdd
