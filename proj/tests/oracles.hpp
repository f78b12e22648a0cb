#pragma once

// Reference computations written directly against Eigen, without the
// library's charts, for cross-checking.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Orthonormal basis of the orthogonal complement of the column space of a.
inline Matrix complement_of(const Matrix& a, int n, double tol = 1e-10) {
  if (a.cols() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > tol * std::max(1.0, s(0));
  return svd.matrixU().rightCols(n - rank);
}

// Effect of an isotropic arrow (g, x) of the linear action g . x = g x: the
// induced map of g on R^n / span{A_i x}, in the returned complement basis.
struct LinearEffect {
  Matrix complement;
  Matrix effect;
};

inline LinearEffect linear_effect(const std::vector<Matrix>& algebra, const Matrix& g, const Vector& x) {
  const int n = static_cast<int>(x.size());
  Matrix gens(n, static_cast<Eigen::Index>(algebra.size()));
  for (std::size_t i = 0; i < algebra.size(); ++i) gens.col(static_cast<Eigen::Index>(i)) = algebra[i] * x;
  const Matrix c = complement_of(gens, n);
  return {c, c.transpose() * g * c};
}

// Distance between two representations of the same quotient map in
// different orthonormal complement bases of the same subspace.
inline double basis_free_distance(const Matrix& m1, const Matrix& c1, const Matrix& m2, const Matrix& c2) {
  if (c1.cols() != c2.cols()) return INFINITY;
  const Matrix p = c1.transpose() * c2;
  return (m1 - p * m2 * p.transpose()).norm();
}

inline Matrix rot_z(double a) {
  Matrix r = Matrix::Identity(3, 3);
  r(0, 0) = std::cos(a);
  r(0, 1) = -std::sin(a);
  r(1, 0) = std::sin(a);
  r(1, 1) = std::cos(a);
  return r;
}

inline std::vector<Matrix> so3_basis() {
  std::vector<Matrix> b(3, Matrix::Zero(3, 3));
  b[0](2, 1) = 1; b[0](1, 2) = -1;
  b[1](0, 2) = 1; b[1](2, 0) = -1;
  b[2](1, 0) = 1; b[2](0, 1) = -1;
  return b;
}

inline std::vector<Matrix> so2_basis() {
  Matrix j = Matrix::Zero(2, 2);
  j(1, 0) = 1;
  j(0, 1) = -1;
  return {j};
}

}  // namespace oracle
