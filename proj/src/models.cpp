#include "groupoid_effect/models.hpp"

#include "groupoid_effect/errors.hpp"

#include <cmath>
#include <numbers>

namespace ge::models {

std::function<Vector(Rng&)> box_sampler(int dim, double half_width, double min_norm) {
  return [=](Rng& rng) {
    for (;;) {
      Vector x(dim);
      for (int i = 0; i < dim; ++i) x(i) = rng.uniform(-half_width, half_width);
      if (x.norm() >= min_norm) return x;
    }
  };
}

std::function<bool(const Vector&, const Vector&)> orbit_by(std::function<Vector(const Vector&)> invariant,
                                                           double tol) {
  return [=](const Vector& x, const Vector& y) {
    const Vector a = invariant(x), b = invariant(y);
    return (a - b).norm() <= tol * std::max(1.0, a.norm());
  };
}

namespace {

Matrix embed_planar(const Matrix& a) {
  Matrix m = Matrix::Identity(3, 3);
  m.topLeftCorner(2, 2) = a;
  m(2, 2) = a.determinant() < 0 ? -1.0 : 1.0;
  return m;
}

Vector planar_to_space(const Vector& x) {
  Vector y = Vector::Zero(3);
  y.head(2) = x;
  return y;
}

Matrix planar_to_space_jacobian(const Vector&) {
  Matrix j = Matrix::Zero(3, 2);
  j(0, 0) = j(1, 1) = 1.0;
  return j;
}

Vector radius(const Vector& x) { return Vector::Constant(1, x.norm()); }

Matrix matrix_power(const Matrix& a, int k) {
  Matrix r = Matrix::Identity(a.rows(), a.cols());
  const Matrix base = k < 0 ? Matrix(a.inverse()) : a;
  for (int i = 0; i < std::abs(k); ++i) r = r * base;
  return r;
}

Vector so3_axis(double z) {
  Vector d = Vector::Zero(3);
  d(2) = z;
  return d;
}

}  // namespace

Reflections reflections() {
  GroupoidHooks plane_hooks;
  plane_hooks.sample_point = box_sampler(2, 2.0);
  plane_hooks.sample_isotropy = stabilizer_isotropy(stabilizer_o2);
  plane_hooks.same_orbit = orbit_by(radius);
  auto plane = build_translation(o2(), linear_action(2), plane_hooks);

  GroupoidHooks space_hooks;
  space_hooks.sample_point = box_sampler(3, 2.0);
  space_hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so3_axis_preserving);
  space_hooks.same_orbit = orbit_by([](const Vector& y) {
    Vector v(2);
    v << y.head(2).norm(), std::abs(y(2));
    return v;
  });
  auto space = build_translation(so3_axis_preserving(), linear_action(3), space_hooks);

  GroupMap theta{embed_planar, Matrix::Identity(1, 1)};
  HomPtr hom = translation_hom(plane, space, theta, BaseMap{planar_to_space, planar_to_space_jacobian}, {},
                               "O(2) x R2 -> G x R3");
  return {plane, space, hom};
}

PoleCollapse pole_collapse(int power) {
  GroupoidHooks plane_hooks;
  plane_hooks.sample_point = box_sampler(2, 2.0);
  plane_hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so2);
  plane_hooks.same_orbit = orbit_by(radius);
  auto plane = build_translation(so2(), linear_action(2), plane_hooks);

  GroupoidHooks space_hooks;
  space_hooks.sample_point = box_sampler(3, 2.0);
  space_hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so3);
  space_hooks.same_orbit = orbit_by(radius);
  auto space = build_translation(so3(), linear_action(3), space_hooks);

  const BaseMap pole{[](const Vector&) { return so3_axis(1.0); },
                     [](const Vector&) { return Matrix(Matrix::Zero(3, 2)); }};
  Matrix d = Matrix::Zero(3, 1);
  d(2, 0) = 1.0;
  HomPtr direct = translation_hom(plane, space, GroupMap{embed_planar, d}, pole, {}, "theta x pole");
  d(2, 0) = power;
  HomPtr twisted = translation_hom(
      plane, space, GroupMap{[power](const Matrix& a) { return embed_planar(matrix_power(a, power)); }, d}, pole,
      {}, "theta^" + std::to_string(power) + " x pole");
  return {plane, space, direct, twisted, power};
}

namespace {

HomPtr circle_hom(const std::shared_ptr<const QuotientGroupoid>& q, const TranslationPtr& space,
                  const FrequencyProfile& omega, int sign, const std::string& name) {
  CustomHomSpec spec;
  spec.name = name;
  spec.apply = [omega, sign](const Arrow& a) {
    const auto& rep = a.as<QuotientArrow>().representative;
    const double t = rep.source(2);
    return make_action_arrow(rot_z(sign * omega.value(t) * additive_value(rep.group)), so3_axis(t));
  };
  spec.base = BaseMap{[](const Vector& x) { return so3_axis(x(2)); },
                      [](const Vector&) {
                        Matrix j = Matrix::Zero(3, 3);
                        j(2, 2) = 1.0;
                        return j;
                      }};
  // Chart (d theta, du) -> (xi, dy): only xi_z and dy_3 move.
  spec.arrow_jacobian = [omega, sign](const Arrow& a) {
    const auto& rep = a.as<QuotientArrow>().representative;
    const double t = rep.source(2), theta = additive_value(rep.group);
    Matrix j = Matrix::Zero(6, 4);
    j(2, 0) = sign * omega.value(t);
    j(2, 3) = sign * omega.derivative(t) * theta;
    j(5, 3) = 1.0;
    return j;
  };
  return custom_hom(q, space, std::move(spec));
}

}  // namespace

CircleQuotient circle_quotient(const FrequencyProfile& omega, int first_sign, int second_sign) {
  if (std::abs(first_sign) != 1 || std::abs(second_sign) != 1) throw InputError("signs must be +1 or -1");
  GroupoidHooks base_hooks;
  base_hooks.sample_point = box_sampler(3, 2.0);
  // Whole turns off the axis; anything on it.
  base_hooks.sample_isotropy = [omega](Rng& rng, const Vector& x) {
    const double w = omega.value(x(2));
    if (w == 0.0 || x.head(2).norm() <= 1e-12) return make_action_arrow(additive_element(rng.uniform(-4.0, 4.0)), x);
    const double turns = static_cast<double>(static_cast<int>(rng.index(7)) - 3);
    return make_action_arrow(additive_element(turns * 2.0 * std::numbers::pi / std::abs(w)), x);
  };
  auto base = build_translation(additive_reals(), rotation_action(omega), base_hooks);

  GroupoidHooks q_hooks;
  q_hooks.same_orbit = [omega](const Vector& x, const Vector& y) {
    if (std::abs(x(2) - y(2)) > 1e-9) return false;
    if (omega.value(x(2)) == 0.0) return (x - y).norm() <= 1e-9;
    return std::abs(x.head(2).norm() - y.head(2).norm()) <= 1e-9;
  };
  auto quotient = quotient_by_kernel(base, RotationKernel(omega), q_hooks);

  GroupoidHooks space_hooks;
  space_hooks.sample_point = box_sampler(3, 2.0);
  space_hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so3);
  space_hooks.same_orbit = orbit_by(radius);
  auto space = build_translation(so3(), linear_action(3), space_hooks);

  auto label = [](int s) { return std::string(s > 0 ? "+" : "-") + "omega"; };
  return {base,
          quotient,
          quotient_projection(quotient),
          space,
          circle_hom(quotient, space, omega, first_sign, "circle hom " + label(first_sign)),
          circle_hom(quotient, space, omega, second_sign, "circle hom " + label(second_sign))};
}

std::shared_ptr<const GroupBundle> circle_bundle() {
  GroupoidHooks hooks;
  hooks.sample_point = box_sampler(1, 3.0);
  hooks.same_orbit = [](const Vector& x, const Vector& y) { return (x - y).norm() <= 1e-12; };
  return build_group_bundle(so2(), 1, hooks);
}

HomPtr power_endomorphism(const std::shared_ptr<const GroupBundle>& bundle, int k) {
  GroupMap theta{[k](const Matrix& a) { return matrix_power(a, k); }, Matrix::Constant(1, 1, k)};
  BaseMap id{[](const Vector& x) { return x; }, [](const Vector& x) { return Matrix(Matrix::Identity(x.size(), x.size())); }};
  return translation_hom(bundle, bundle, theta, id, {}, "g -> g^" + std::to_string(k));
}

RadialPullback radial_pullback() {
  RadialPullback r;

  GroupoidHooks punctured_hooks;
  punctured_hooks.sample_point = box_sampler(3, 2.0, 0.1);
  punctured_hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so3);
  punctured_hooks.same_orbit = orbit_by(radius);
  r.punctured = build_translation(so3(), linear_action(3), punctured_hooks);

  GroupoidHooks space_hooks = punctured_hooks;
  space_hooks.sample_point = box_sampler(3, 2.0);
  r.space = build_translation(so3(), linear_action(3), space_hooks);

  const BaseMap axis{[](const Vector& t) { return so3_axis(t(0)); },
                     [](const Vector&) {
                       Matrix j = Matrix::Zero(3, 1);
                       j(2, 0) = 1.0;
                       return j;
                     }};
  GroupoidHooks pull_hooks;
  pull_hooks.sample_point = [](Rng& rng) { return Vector::Constant(1, rng.uniform(0.1, 3.0)); };
  pull_hooks.same_orbit = [](const Vector& x, const Vector& y) { return std::abs(x(0) - y(0)) <= 1e-9; };
  auto built = build_pullback(axis, 1, r.punctured, pull_hooks);
  r.pullback = built.groupoid;

  HomWitnesses w;
  w.surjectivity = [](const Vector& y) {
    const double n = y.norm();
    if (n == 0.0) throw PreconditionError("the origin is not in the punctured space");
    return SurjectivityWitness{Vector::Constant(1, n), make_action_arrow(rotation_between(y / n, so3_axis(1.0)), y)};
  };
  r.projection = built.projection->with_witnesses(w);

  const BaseMap id3{[](const Vector& x) { return x; }, [](const Vector&) { return Matrix(Matrix::Identity(3, 3)); }};
  HomWitnesses inc;
  inc.lift = [](const Vector&, const Vector&, const Arrow& h) { return h; };
  r.inclusion = translation_hom(r.punctured, r.space, GroupMap{[](const Matrix& a) { return a; }, Matrix::Identity(3, 3)},
                                id3, inc, "inclusion");

  GroupoidHooks plane_hooks;
  plane_hooks.sample_point = box_sampler(2, 2.0, 0.1);
  plane_hooks.sample_isotropy = stabilizer_isotropy(stabilizer_o2);
  plane_hooks.same_orbit = orbit_by(radius);
  r.plane = build_translation(o2(), linear_action(2), plane_hooks);
  Matrix d = Matrix::Zero(3, 1);
  d(2, 0) = 1.0;
  r.planar = translation_hom(r.plane, r.punctured, GroupMap{embed_planar, d},
                             BaseMap{planar_to_space, planar_to_space_jacobian}, {}, "O(2) x R2* -> SO(3) x R3*");

  r.rotation = [](const Vector& t) { return make_action_arrow(rot_x(t(0)), so3_axis(t(0))); };
  CustomHomSpec spec;
  spec.name = "rotated projection";
  spec.apply = [](const Arrow& a) {
    const auto& p = a.as<PullbackArrow>();
    const auto& h = p.middle->as<ActionArrow>();
    const Matrix g = rot_x(p.target_point(0)) * h.group * rot_x(p.source_point(0)).transpose();
    return make_action_arrow(g, rot_x(p.source_point(0)) * so3_axis(p.source_point(0)));
  };
  spec.base = BaseMap{[](const Vector& t) { return Vector(rot_x(t(0)) * so3_axis(t(0))); },
                      [](const Vector& t) {
                        const double s = t(0);
                        Matrix j(3, 1);
                        j << 0.0, -std::sin(s) - s * std::cos(s), std::cos(s) - s * std::sin(s);
                        return j;
                      }};
  r.rotated = custom_hom(r.pullback, r.punctured, std::move(spec));
  return r;
}

}  // namespace ge::models
