#pragma once

// Matrix Lie groups with an algebra basis, and their smooth actions on open
// subsets of coordinate space with analytic Jacobians.

#include "groupoid_effect/numlin.hpp"
#include "groupoid_effect/rng.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ge {

class LieGroupModel {
 public:
  using Sampler = std::function<Matrix(Rng&)>;

  LieGroupModel(std::string name, int matrix_size, std::vector<Matrix> algebra_basis,
                Sampler sampler);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  int matrix_size() const { return n_; }
  const std::vector<Matrix>& algebra_basis() const { return basis_; }

  Matrix identity() const { return Matrix::Identity(n_, n_); }
  Matrix multiply(const Matrix& a, const Matrix& b) const { return a * b; }
  Matrix invert(const Matrix& g) const { return g.inverse(); }

  // sum_i coords(i) * basis[i]
  Matrix algebra_element(const Vector& coords) const;
  // Least-squares coordinates of an algebra element in the basis.
  Vector algebra_coordinates(const Matrix& element) const;
  Matrix exp(const Vector& coords) const;
  // Matrix of X -> g X g^{-1} in basis coordinates (dim x dim).
  Matrix adjoint(const Matrix& g) const;

  Matrix sample(Rng& rng) const { return sampler_(rng); }

 private:
  std::string name_;
  int n_;
  std::vector<Matrix> basis_;
  Matrix vec_basis_;  // n^2 x dim, basis matrices flattened column-major
  Matrix vec_pinv_;
  Sampler sampler_;
};

// Rotation frequency omega(t) for the circle actions on C x R. Two documented
// families: polynomial sum_i c_i t^i, and a * t * exp(b t).
class FrequencyProfile {
 public:
  enum class Family { Polynomial, TExp };

  static FrequencyProfile polynomial(std::vector<double> coefficients);
  static FrequencyProfile t_exp(double a, double b);
  // "poly:c0,c1,..." | "texp:a,b" | a bare "t" (the identity profile).
  static FrequencyProfile parse(const std::string& spec);

  double value(double t) const;
  double derivative(double t) const;
  Family family() const { return family_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  std::string describe() const;
  // Same family and coefficients.
  bool operator==(const FrequencyProfile& other) const = default;

  FrequencyProfile scaled(double factor) const;

 private:
  Family family_ = Family::Polynomial;
  std::vector<double> coeffs_;
};

class SmoothActionModel {
 public:
  using ActFn = std::function<Vector(const Matrix&, const Vector&)>;
  using JacobianFn = std::function<Matrix(const Matrix&, const Vector&)>;
  using GeneratorFn = std::function<Vector(const Matrix&, const Vector&)>;

  SmoothActionModel(std::string name, int base_dim, ActFn act, JacobianFn jacobian,
                    GeneratorFn generator, std::optional<FrequencyProfile> frequency = {});

  const std::string& name() const { return name_; }
  int base_dim() const { return base_dim_; }
  Vector act(const Matrix& g, const Vector& x) const { return act_(g, x); }
  // D_x act(g, .)
  Matrix base_jacobian(const Matrix& g, const Vector& x) const { return jac_(g, x); }
  // d/ds|_0 act(exp(s A), x) for an algebra element A.
  Vector generator(const Matrix& algebra_element, const Vector& x) const { return gen_(algebra_element, x); }
  // Present for circle actions of frequency omega on C x R.
  const std::optional<FrequencyProfile>& frequency() const { return frequency_; }

  // n x d matrix whose columns are the generators of the algebra basis at x.
  Matrix generator_matrix(const LieGroupModel& group, const Vector& x) const;

 private:
  std::string name_;
  int base_dim_;
  ActFn act_;
  JacobianFn jac_;
  GeneratorFn gen_;
  std::optional<FrequencyProfile> frequency_;
};

// Elementary rotations.
Matrix rot2(double angle);
Matrix rot_x(double angle);
Matrix rot_z(double angle);
// Rotation about a unit axis (Rodrigues).
Matrix rot_axis(const Vector& axis, double angle);
// A rotation of R^3 taking unit vector a to unit vector b.
Matrix rotation_between(const Vector& a, const Vector& b);
Matrix random_rotation3(Rng& rng);

// Standard groups.
LieGroupModel so2();
LieGroupModel o2();
LieGroupModel so3();
// {P in SO(3) : P e3 = +-e3}, the rotations about z and their composites
// with diag(1,-1,-1).
LieGroupModel so3_axis_preserving();
// (R, +) realized as unipotent matrices [[1, s], [0, 1]].
LieGroupModel additive_reals();
double additive_value(const Matrix& g);
Matrix additive_element(double s);

// g . x = g x
SmoothActionModel linear_action(int n);
// s . (z, t) = (e^{i omega(t) s} z, t) on C x R = R^3, for the additive group.
SmoothActionModel rotation_action(const FrequencyProfile& omega);

// Stabilizer samplers for the linear actions above. They return an element g
// with g x = x.
Matrix stabilizer_so3(Rng& rng, const Vector& x, double tol);
Matrix stabilizer_so2(Rng& rng, const Vector& x, double tol);
Matrix stabilizer_o2(Rng& rng, const Vector& x, double tol);
Matrix stabilizer_so3_axis_preserving(Rng& rng, const Vector& x, double tol);

}  // namespace ge
