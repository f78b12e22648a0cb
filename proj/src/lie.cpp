#include "groupoid_effect/lie.hpp"

#include "groupoid_effect/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <sstream>

namespace ge {

namespace {

constexpr double kPi = std::numbers::pi;

Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix planar_generator() {
  Matrix j(2, 2);
  j << 0, -1, 1, 0;
  return j;
}

Matrix so3_basis(int i) {
  Matrix e = Matrix::Zero(3, 3);
  switch (i) {
    case 0: e(1, 2) = -1; e(2, 1) = 1; break;
    case 1: e(0, 2) = 1; e(2, 0) = -1; break;
    default: e(0, 1) = -1; e(1, 0) = 1; break;
  }
  return e;
}

Matrix flip_yz() {
  return Vector::Map(std::vector<double>{1.0, -1.0, -1.0}.data(), 3).asDiagonal();
}

}  // namespace

LieGroupModel::LieGroupModel(std::string name, int matrix_size, std::vector<Matrix> algebra_basis,
                             Sampler sampler)
    : name_(std::move(name)), n_(matrix_size), basis_(std::move(algebra_basis)),
      sampler_(std::move(sampler)) {
  if (n_ < 1) throw InputError("group matrix size must be positive");
  vec_basis_ = Matrix(n_ * n_, static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i].rows() != n_ || basis_[i].cols() != n_) {
      throw InputError("algebra basis element has the wrong shape for group " + name_);
    }
    vec_basis_.col(static_cast<Eigen::Index>(i)) = flatten(basis_[i]);
  }
  vec_pinv_ = pseudo_inverse(vec_basis_);
}

Matrix LieGroupModel::algebra_element(const Vector& coords) const {
  if (coords.size() != dim()) throw InputError("algebra coordinates have the wrong length");
  Matrix x = Matrix::Zero(n_, n_);
  for (int i = 0; i < dim(); ++i) x += coords(i) * basis_[static_cast<std::size_t>(i)];
  return x;
}

Vector LieGroupModel::algebra_coordinates(const Matrix& element) const {
  return vec_pinv_ * flatten(element);
}

Matrix LieGroupModel::exp(const Vector& coords) const {
  const Matrix x = algebra_element(coords);
  return x.exp();
}

Matrix LieGroupModel::adjoint(const Matrix& g) const {
  const Matrix ginv = invert(g);
  Matrix ad(dim(), dim());
  for (int j = 0; j < dim(); ++j) {
    ad.col(j) = algebra_coordinates(g * basis_[static_cast<std::size_t>(j)] * ginv);
  }
  return ad;
}

FrequencyProfile FrequencyProfile::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw InputError("polynomial frequency needs coefficients");
  FrequencyProfile p;
  p.family_ = Family::Polynomial;
  p.coeffs_ = std::move(coefficients);
  return p;
}

FrequencyProfile FrequencyProfile::t_exp(double a, double b) {
  FrequencyProfile p;
  p.family_ = Family::TExp;
  p.coeffs_ = {a, b};
  return p;
}

FrequencyProfile FrequencyProfile::parse(const std::string& spec) {
  if (spec == "t") return polynomial({0.0, 1.0});
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("frequency spec needs a family prefix: " + spec);
  const std::string family = spec.substr(0, colon);
  std::vector<double> values;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("frequency coefficient is not a number: " + item);
    }
  }
  if (family == "poly") return polynomial(std::move(values));
  if (family == "texp") {
    if (values.size() != 2) throw InputError("texp frequency takes exactly two numbers a,b");
    return t_exp(values[0], values[1]);
  }
  throw InputError("unknown frequency family: " + family);
}

double FrequencyProfile::value(double t) const {
  if (family_ == Family::TExp) return coeffs_[0] * t * std::exp(coeffs_[1] * t);
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double FrequencyProfile::derivative(double t) const {
  if (family_ == Family::TExp) {
    return coeffs_[0] * std::exp(coeffs_[1] * t) * (1.0 + coeffs_[1] * t);
  }
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 1;) acc = acc * t + static_cast<double>(i) * coeffs_[i];
  return acc;
}

std::string FrequencyProfile::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << (family_ == Family::TExp ? "texp:" : "poly:");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
  return os.str();
}

FrequencyProfile FrequencyProfile::scaled(double factor) const {
  FrequencyProfile p = *this;
  if (family_ == Family::TExp) {
    p.coeffs_[0] *= factor;
  } else {
    for (double& c : p.coeffs_) c *= factor;
  }
  return p;
}

SmoothActionModel::SmoothActionModel(std::string name, int base_dim, ActFn act, JacobianFn jacobian,
                                     GeneratorFn generator, std::optional<FrequencyProfile> frequency)
    : name_(std::move(name)), base_dim_(base_dim), act_(std::move(act)), jac_(std::move(jacobian)),
      gen_(std::move(generator)), frequency_(std::move(frequency)) {
  if (base_dim_ < 1) throw InputError("action base dimension must be positive");
}

Matrix SmoothActionModel::generator_matrix(const LieGroupModel& group, const Vector& x) const {
  Matrix m(base_dim_, group.dim());
  for (int i = 0; i < group.dim(); ++i) {
    m.col(i) = generator(group.algebra_basis()[static_cast<std::size_t>(i)], x);
  }
  return m;
}

Matrix rot2(double angle) {
  Matrix r(2, 2);
  const double c = std::cos(angle), s = std::sin(angle);
  r << c, -s, s, c;
  return r;
}

Matrix rot_z(double angle) {
  Matrix r = Matrix::Identity(3, 3);
  r.topLeftCorner(2, 2) = rot2(angle);
  return r;
}

Matrix rot_x(double angle) {
  Matrix r = Matrix::Identity(3, 3);
  r.bottomRightCorner(2, 2) = rot2(angle);
  return r;
}

Matrix rot_axis(const Vector& axis, double angle) {
  const Vector u = axis.normalized();
  Matrix k(3, 3);
  k << 0, -u(2), u(1), u(2), 0, -u(0), -u(1), u(0), 0;
  return Matrix::Identity(3, 3) + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

Matrix rotation_between(const Vector& a, const Vector& b) {
  const Eigen::Vector3d ua = a.normalized(), ub = b.normalized();
  const Eigen::Vector3d axis = ua.cross(ub);
  const double s = axis.norm(), c = ua.dot(ub);
  if (s < 1e-14) {
    if (c > 0) return Matrix::Identity(3, 3);
    // Antiparallel: half turn about any axis orthogonal to a.
    Eigen::Vector3d ortho = ua.cross(Eigen::Vector3d::UnitX());
    if (ortho.norm() < 1e-6) ortho = ua.cross(Eigen::Vector3d::UnitY());
    return rot_axis(Vector(ortho), kPi);
  }
  return rot_axis(Vector(axis), std::atan2(s, c));
}

Matrix random_rotation3(Rng& rng) {
  Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  const Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
  return quat.toRotationMatrix();
}

LieGroupModel so2() {
  return LieGroupModel("SO(2)", 2, {planar_generator()},
                       [](Rng& rng) { return rot2(rng.uniform(-kPi, kPi)); });
}

LieGroupModel o2() {
  return LieGroupModel("O(2)", 2, {planar_generator()}, [](Rng& rng) {
    Matrix r = rot2(rng.uniform(-kPi, kPi));
    if (rng.coin()) r.col(1) *= -1.0;
    return r;
  });
}

LieGroupModel so3() {
  return LieGroupModel("SO(3)", 3, {so3_basis(0), so3_basis(1), so3_basis(2)}, random_rotation3);
}

LieGroupModel so3_axis_preserving() {
  return LieGroupModel("SO(3)_e3", 3, {so3_basis(2)}, [](Rng& rng) {
    Matrix r = rot_z(rng.uniform(-kPi, kPi));
    if (rng.coin()) r = r * flip_yz();
    return r;
  });
}

LieGroupModel additive_reals() {
  Matrix e = Matrix::Zero(2, 2);
  e(0, 1) = 1.0;
  return LieGroupModel("R", 2, {e}, [](Rng& rng) { return additive_element(rng.uniform(-4.0, 4.0)); });
}

double additive_value(const Matrix& g) { return g(0, 1); }

Matrix additive_element(double s) {
  Matrix g = Matrix::Identity(2, 2);
  g(0, 1) = s;
  return g;
}

SmoothActionModel linear_action(int n) {
  return SmoothActionModel(
      "linear(R^" + std::to_string(n) + ")", n,
      [](const Matrix& g, const Vector& x) -> Vector { return g * x; },
      [](const Matrix& g, const Vector&) -> Matrix { return g; },
      [](const Matrix& a, const Vector& x) -> Vector { return a * x; });
}

SmoothActionModel rotation_action(const FrequencyProfile& omega) {
  const Matrix j = planar_generator();
  auto act = [omega](const Matrix& g, const Vector& x) -> Vector {
    const double angle = omega.value(x(2)) * additive_value(g);
    Vector y = x;
    y.head(2) = rot2(angle) * x.head(2);
    return y;
  };
  auto jac = [omega, j](const Matrix& g, const Vector& x) -> Matrix {
    const double s = additive_value(g);
    const Matrix r = rot2(omega.value(x(2)) * s);
    Matrix m = Matrix::Identity(3, 3);
    m.topLeftCorner(2, 2) = r;
    m.block(0, 2, 2, 1) = s * omega.derivative(x(2)) * j * r * x.head(2);
    return m;
  };
  auto gen = [omega, j](const Matrix& a, const Vector& x) -> Vector {
    Vector v = Vector::Zero(3);
    v.head(2) = a(0, 1) * omega.value(x(2)) * j * x.head(2);
    return v;
  };
  return SmoothActionModel("rotation(C x R, " + omega.describe() + ")", 3, act, jac, gen, omega);
}

Matrix stabilizer_so3(Rng& rng, const Vector& x, double tol) {
  if (x.norm() < tol) return random_rotation3(rng);
  return rot_axis(x, rng.uniform(-kPi, kPi));
}

Matrix stabilizer_so2(Rng& rng, const Vector& x, double tol) {
  if (x.norm() < tol) return rot2(rng.uniform(-kPi, kPi));
  return Matrix::Identity(2, 2);
}

Matrix stabilizer_o2(Rng& rng, const Vector& x, double tol) {
  if (x.norm() < tol) return o2().sample(rng);
  if (!rng.coin()) return Matrix::Identity(2, 2);
  const double a = std::atan2(x(1), x(0));
  Matrix r(2, 2);
  r << std::cos(2 * a), std::sin(2 * a), std::sin(2 * a), -std::cos(2 * a);
  return r;
}

Matrix stabilizer_so3_axis_preserving(Rng& rng, const Vector& x, double tol) {
  const double planar = x.head(2).norm();
  if (x.norm() < tol) return so3_axis_preserving().sample(rng);
  if (planar < tol) return rot_z(rng.uniform(-kPi, kPi));
  if (std::abs(x(2)) < tol && rng.coin()) {
    return rot_z(2.0 * std::atan2(x(1), x(0))) * flip_yz();
  }
  return Matrix::Identity(3, 3);
}

}  // namespace ge
