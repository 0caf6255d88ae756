// Basic scalar/vector aliases shared across the library.

#ifndef SHELLVI_CORE_HPP
#define SHELLVI_CORE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace shellvi {

using Real = double;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<Real>;
using Triplet = Eigen::Triplet<Real>;

// Gradient of a 3-component field with respect to the two surface
// coordinates: row alpha holds the partial derivative of all components.
using Grad23 = Eigen::Matrix<Real, 2, 3>;

inline Real sq(Real x) { return x * x; }

// double-dot product of two 2x2 tensors
inline Real ddot(const Mat2& s, const Mat2& t) { return (s.array() * t.array()).sum(); }

} // namespace shellvi

#endif
