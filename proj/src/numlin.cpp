#include "groupoid_effect/numlin.hpp"

#include "groupoid_effect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ge {

void ToleranceProfile::validate() const {
  if (!(rank_rel_tol > 0 && map_abs_tol > 0 && fd_abs_tol > 0 && fd_step > 0)) {
    throw InputError("tolerances must be strictly positive");
  }
  if (fd_abs_tol < map_abs_tol) {
    throw InputError("fd_abs_tol must not be smaller than map_abs_tol");
  }
}

ToleranceProfile ToleranceProfile::with_overrides(ToleranceProfile base, const std::string& spec) {
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("tolerance override without '=': " + item);
    const std::string key = item.substr(0, eq);
    double value = 0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("tolerance override is not a number: " + item);
    }
    if (key == "rank_rel_tol") base.rank_rel_tol = value;
    else if (key == "map_abs_tol") base.map_abs_tol = value;
    else if (key == "fd_abs_tol") base.fd_abs_tol = value;
    else if (key == "fd_step") base.fd_step = value;
    else throw InputError("unknown tolerance key: " + key);
  }
  base.validate();
  return base;
}

Subspace::Subspace(Matrix orthonormal_basis, const ToleranceProfile& tol)
    : basis_(std::move(orthonormal_basis)) {
  if (basis_.cols() > basis_.rows()) throw InputError("subspace basis has more columns than rows");
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.transpose() * basis_;
    const double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).norm();
    if (err > tol.map_abs_tol) throw InputError("subspace basis is not column-orthonormal");
  }
}

Subspace Subspace::zero(int ambient_dim) {
  Subspace s;
  s.basis_ = Matrix::Zero(ambient_dim, 0);
  return s;
}

Subspace Subspace::full(int ambient_dim) {
  Subspace s;
  s.basis_ = Matrix::Identity(ambient_dim, ambient_dim);
  return s;
}

double Subspace::residual(const Vector& v) const {
  if (dim() == 0) return v.norm();
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

QuotientSpace::QuotientSpace(Subspace tangent, Subspace longitudinal, const ToleranceProfile& tol)
    : tangent_(std::move(tangent)), longitudinal_(std::move(longitudinal)) {
  if (tangent_.ambient_dim() != longitudinal_.ambient_dim()) {
    throw InputError("tangent and longitudinal subspaces live in different ambients");
  }
  const Matrix& t = tangent_.basis();
  if (longitudinal_.dim() == 0) {
    complement_ = canonical_basis(t);
    return;
  }
  // Directions of the tangent orthogonal to the longitudinal.
  const Matrix k = null_space(longitudinal_.basis().transpose() * t, tol);
  complement_ = canonical_basis(column_space(t * k, tol).basis());
}

Matrix canonical_basis(const Matrix& orthonormal) {
  const Eigen::Index n = orthonormal.rows(), r = orthonormal.cols();
  const Matrix p = orthonormal * orthonormal.transpose();
  Matrix out(n, r);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index step = 0; step < r; ++step) {
    Matrix residual = p;
    if (step > 0) residual -= out.leftCols(step) * (out.leftCols(step).transpose() * p);
    const Vector norms = residual.colwise().norm();
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)]) best = std::max(best, norms(i));
    }
    // Lowest index among the (numerically) largest residuals.
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n && pick < 0; ++i) {
      if (!used[static_cast<std::size_t>(i)] && norms(i) >= best * (1.0 - 1e-12)) pick = i;
    }
    used[static_cast<std::size_t>(pick)] = true;
    out.col(step) = residual.col(pick) / norms(pick);
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Vector::Zero(0);
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

namespace {

double rank_threshold(const Matrix& a, const Vector& sv, const ToleranceProfile& tol) {
  if (sv.size() == 0) return 0.0;
  const double smax = sv(0);
  const double dim = static_cast<double>(std::max(a.rows(), a.cols()));
  return tol.rank_rel_tol * dim * smax;
}

}  // namespace

int numeric_rank(const Matrix& a, const ToleranceProfile& tol) {
  const Vector sv = singular_values(a);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double thr = rank_threshold(a, sv, tol);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thr) ++r;
  }
  return r;
}

Subspace column_space(const Matrix& columns, const ToleranceProfile& tol, double absolute_floor) {
  const int n = static_cast<int>(columns.rows());
  if (columns.cols() == 0 || n == 0) return Subspace::zero(n);
  Eigen::JacobiSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const Vector sv = svd.singularValues();
  if (sv(0) == 0.0) return Subspace::zero(n);
  const double thr = std::max(rank_threshold(columns, sv, tol), absolute_floor);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thr) ++r;
  }
  Matrix basis = svd.matrixU().leftCols(r);
  return Subspace(std::move(basis), tol);
}

Subspace orthonormalize(std::span<const Vector> vectors, int ambient_dim, const ToleranceProfile& tol) {
  if (ambient_dim < 1) throw InputError("ambient dimension must be positive");
  Matrix m(ambient_dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != ambient_dim) {
      throw InputError("orthonormalize: vector " + std::to_string(j) + " has dimension " +
                       std::to_string(vectors[j].size()) + ", expected " +
                       std::to_string(ambient_dim));
    }
    m.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return column_space(m, tol);
}

Matrix null_space(const Matrix& a, const ToleranceProfile& tol) {
  const Eigen::Index n = a.cols();
  if (n == 0) return Matrix::Zero(0, 0);
  if (a.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  int r = 0;
  if (sv(0) > 0.0) {
    const double thr = rank_threshold(a, sv, tol);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > thr) ++r;
    }
  }
  return svd.matrixV().rightCols(n - r);
}

Matrix pseudo_inverse(const Matrix& a, const ToleranceProfile& tol) {
  if (a.rows() == 0 || a.cols() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector sv = svd.singularValues();
  Vector inv = Vector::Zero(sv.size());
  if (sv(0) > 0.0) {
    const double thr = rank_threshold(a, sv, tol);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > thr) inv(i) = 1.0 / sv(i);
    }
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector principal_angles(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw InputError("principal angles across ambients");
  if (a.dim() == 0 || b.dim() == 0) return Vector::Zero(0);
  Vector cosines = singular_values(a.basis().transpose() * b.basis());
  Vector angles(cosines.size());
  for (Eigen::Index i = 0; i < cosines.size(); ++i) {
    angles(i) = std::acos(std::clamp(cosines(i), -1.0, 1.0));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  if (a.dim() != b.dim()) return std::acos(0.0);
  if (a.dim() == 0) return 0.0;
  // The sine of the largest angle is the projector gap; asin of it is more
  // accurate than acos near zero.
  const Matrix gap = a.projector() - b.projector();
  return std::asin(std::clamp(spectral_norm(gap), 0.0, 1.0));
}

double longitudinal_residual(const Matrix& a, const QuotientSpace& src, const QuotientSpace& dst) {
  if (src.longitudinal().dim() == 0) return 0.0;
  const Matrix image = a * src.longitudinal().basis();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < image.cols(); ++j) {
    worst = std::max(worst, dst.longitudinal().residual(image.col(j)));
  }
  return worst;
}

QuotientLinearMap induced_quotient_map(const Matrix& a, const QuotientSpace& src,
                                       const QuotientSpace& dst, const ToleranceProfile& tol) {
  if (a.cols() != src.ambient_dim() || a.rows() != dst.ambient_dim()) {
    throw InputError("induced_quotient_map: matrix is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " but quotients live in R^" +
                     std::to_string(src.ambient_dim()) + " -> R^" +
                     std::to_string(dst.ambient_dim()));
  }
  const double residual = longitudinal_residual(a, src, dst);
  const double scale = std::max(1.0, spectral_norm(a));
  if (residual > tol.map_abs_tol * scale) {
    throw NotWellDefinedError("linear map does not preserve the longitudinal subspace", residual);
  }
  return QuotientLinearMap{src, dst, dst.complement().transpose() * a * src.complement()};
}

double spectral_norm(const Matrix& a) {
  const Vector sv = singular_values(a);
  return sv.size() == 0 ? 0.0 : sv(0);
}

double min_singular_value(const Matrix& a) {
  const Vector sv = singular_values(a);
  return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
}

double condition_number(const Matrix& a) {
  if (a.rows() == 0 && a.cols() == 0) return 1.0;
  const Vector sv = singular_values(a);
  if (sv.size() == 0) return 1.0;
  const double smin = sv(sv.size() - 1);
  if (a.rows() != a.cols() || smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace ge
