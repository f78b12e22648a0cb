#pragma once

// Tolerance-aware dense linear algebra: numerical rank, orthonormal spans,
// quotient spaces realized as orthogonal complements, and the linear maps
// induced on such quotients.

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace ge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct ToleranceProfile {
  double rank_rel_tol = 1e-10;  // relative to sigma_max and max dimension
  double map_abs_tol = 1e-8;    // analytic comparisons
  double fd_abs_tol = 1e-5;     // finite-difference cross-checks
  double fd_step = 1e-6;        // step in base coordinates

  // Throws InputError unless every field is positive and fd_abs_tol >= map_abs_tol.
  void validate() const;

  // Applies "key=value,key=value" overrides (keys are the field names).
  static ToleranceProfile with_overrides(ToleranceProfile base, const std::string& spec);
};

// Column-orthonormal basis of a subspace of R^n. Zero-dimensional subspaces
// carry an n x 0 basis.
class Subspace {
 public:
  Subspace() = default;
  // Basis must already be column-orthonormal (checked to map_abs_tol).
  Subspace(Matrix orthonormal_basis, const ToleranceProfile& tol = {});

  static Subspace zero(int ambient_dim);
  static Subspace full(int ambient_dim);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Matrix& basis() const { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }
  // Norm of the component of v orthogonal to this subspace.
  double residual(const Vector& v) const;

 private:
  Matrix basis_ = Matrix::Zero(0, 0);
};

// The same subspace as the given orthonormal columns, re-based on the
// projections of the standard basis vectors (largest residual first, lowest
// index on ties). Makes complement bases independent of SVD rotations.
Matrix canonical_basis(const Matrix& orthonormal);

// The quotient tangent/longitudinal, represented by an orthonormal basis of
// the orthogonal complement of the longitudinal subspace inside the tangent
// subspace. For open subsets of coordinate space the tangent is all of R^n.
class QuotientSpace {
 public:
  QuotientSpace() = default;
  QuotientSpace(Subspace tangent, Subspace longitudinal, const ToleranceProfile& tol = {});

  int ambient_dim() const { return tangent_.ambient_dim(); }
  int dim() const { return static_cast<int>(complement_.cols()); }
  const Subspace& tangent() const { return tangent_; }
  const Subspace& longitudinal() const { return longitudinal_; }
  const Matrix& complement() const { return complement_; }

 private:
  Subspace tangent_;
  Subspace longitudinal_;
  Matrix complement_ = Matrix::Zero(0, 0);
};

struct QuotientLinearMap {
  QuotientSpace source;
  QuotientSpace target;
  Matrix matrix;  // target.dim() x source.dim(), in the complement bases
};

Vector singular_values(const Matrix& a);

// Number of singular values above rank_rel_tol * max(rows, cols) * sigma_max.
int numeric_rank(const Matrix& a, const ToleranceProfile& tol = {});

// Orthonormal basis of the numerical column space of the given vectors.
Subspace orthonormalize(std::span<const Vector> vectors, int ambient_dim,
                        const ToleranceProfile& tol = {});
// Singular values at or below absolute_floor also count as zero.
Subspace column_space(const Matrix& columns, const ToleranceProfile& tol = {},
                      double absolute_floor = 0.0);

// Orthonormal basis (cols x k) of the numerical kernel of a.
Matrix null_space(const Matrix& a, const ToleranceProfile& tol = {});

// Moore-Penrose pseudo-inverse with the relative rank threshold.
Matrix pseudo_inverse(const Matrix& a, const ToleranceProfile& tol = {});

// Principal angles (ascending) between two subspaces of the same ambient.
Vector principal_angles(const Subspace& a, const Subspace& b);
// Largest principal angle; pi/2 when the dimensions differ.
double subspace_distance(const Subspace& a, const Subspace& b);

// Largest residual of a * (src longitudinal) against the dst longitudinal.
double longitudinal_residual(const Matrix& a, const QuotientSpace& src, const QuotientSpace& dst);

// C_dst^T * a * C_src after checking that a carries the source longitudinal
// into the target longitudinal. The residual is compared against
// map_abs_tol * max(1, |a|_2). Throws NotWellDefinedError otherwise.
QuotientLinearMap induced_quotient_map(const Matrix& a, const QuotientSpace& src,
                                       const QuotientSpace& dst,
                                       const ToleranceProfile& tol = {});

// sigma_max / sigma_min; infinity for rank-deficient, 1 for empty.
double condition_number(const Matrix& a);
double min_singular_value(const Matrix& a);
double spectral_norm(const Matrix& a);

}  // namespace ge
