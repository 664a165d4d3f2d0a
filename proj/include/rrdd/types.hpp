#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>

namespace rrdd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Gradients and coordinates are carried as 2-vectors in both 1D and 2D;
// 1D stores the value in component 0 and keeps component 1 at zero.
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Scalar source term f evaluated at a physical point.
using SourceFn = std::function<double(const Vec2&)>;

inline SourceFn zero_source()
{
    return [](const Vec2&) { return 0.0; };
}

} // namespace rrdd
