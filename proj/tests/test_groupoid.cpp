#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/models.hpp"
#include "groupoid_effect/pullback.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace ge;

namespace {

constexpr double kPi = std::numbers::pi;

Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST(LieGroups, ExpOfAlgebraStaysInGroup) {
  Rng rng(5);
  for (const LieGroupModel& g : {so2(), o2(), so3(), so3_axis_preserving()}) {
    for (int i = 0; i < 20; ++i) {
      Vector c(g.dim());
      for (int j = 0; j < g.dim(); ++j) c(j) = rng.normal();
      const Matrix m = g.exp(c);
      EXPECT_LT((m.transpose() * m - g.identity()).norm(), 1e-10) << g.name();
      EXPECT_LT((g.algebra_coordinates(g.algebra_element(c)) - c).norm(), 1e-12);
    }
  }
  EXPECT_NEAR(additive_value(additive_element(2.5)), 2.5, 1e-15);
}

TEST(LieGroups, AdjointMatchesConjugation) {
  Rng rng(8);
  const LieGroupModel g = so3();
  for (int i = 0; i < 20; ++i) {
    const Matrix h = g.sample(rng);
    Vector c(3);
    c << rng.normal(), rng.normal(), rng.normal();
    const Matrix conj = h * g.algebra_element(c) * h.transpose();
    EXPECT_LT((g.algebra_element(g.adjoint(h) * c) - conj).norm(), 1e-12);
  }
}

TEST(Rotations, BetweenAndAxis) {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    Vector a = v3(rng.normal(), rng.normal(), rng.normal()).normalized();
    Vector b = v3(rng.normal(), rng.normal(), rng.normal()).normalized();
    EXPECT_LT((rotation_between(a, b) * a - b).norm(), 1e-12);
    EXPECT_LT((rot_axis(a, 0.4) * a - a).norm(), 1e-12);
  }
  EXPECT_LT((rot_axis(v3(0, 0, 1), 0.3) - rot_z(0.3)).norm(), 1e-14);
}

TEST(Translation, StructureMaps) {
  const auto g = build_translation(so3(), linear_action(3));
  const Arrow a = make_action_arrow(rot_z(kPi / 2), v3(1, 0, 0));
  EXPECT_LT((g->target(a) - v3(0, 1, 0)).norm(), 1e-14);
  const Arrow b = make_action_arrow(rot_z(kPi / 2), v3(0, 1, 0));
  const Arrow ba = g->compose(b, a);
  EXPECT_LT((g->target(ba) - v3(-1, 0, 0)).norm(), 1e-14);
  EXPECT_THROW(g->compose(a, a), CompositionError);
  EXPECT_LT(g->arrow_distance(g->compose(g->inverse(a), a), g->unit(v3(1, 0, 0))), 1e-14);
}

TEST(Translation, AxiomsOnAllKinds) {
  const auto ex1 = models::reflections();
  const auto pole = models::pole_collapse(3);
  const auto circ = models::circle_quotient(FrequencyProfile::parse("t"), 1, -1);
  const auto radial = models::radial_pullback();
  const std::vector<GroupoidPtr> all = {ex1.plane, ex1.space,    pole.plane,        circ.base,
                                        circ.quotient, radial.pullback, models::circle_bundle()};
  for (const auto& g : all) {
    const AxiomReport r = check_groupoid_axioms(*g, 300, 17);
    EXPECT_LT(r.worst(), 1e-8) << g->name();
    EXPECT_EQ(r.samples, 300u);
  }
}

TEST(RotationKernel, PeriodAndNormalization) {
  const RotationKernel k(FrequencyProfile::parse("t"));
  const ToleranceProfile tol;
  ASSERT_TRUE(k.period(2.0));
  EXPECT_NEAR(*k.period(2.0), kPi, 1e-15);
  EXPECT_FALSE(k.period(0.0));
  EXPECT_TRUE(k.contains(3 * kPi, 2.0, tol));
  EXPECT_FALSE(k.contains(1.0, 2.0, tol));
  EXPECT_TRUE(k.contains(0.0, 0.0, tol));
  EXPECT_FALSE(k.contains(1.0, 0.0, tol));
  EXPECT_NEAR(k.normalize(kPi + 0.25, 2.0, tol), 0.25, 1e-12);
  EXPECT_NEAR(k.normalize(-0.25, 2.0, tol), kPi - 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(k.normalize(1.5, 0.0, tol), 1.5);
  const RotationKernel half(FrequencyProfile::parse("t"), 0.5);
  EXPECT_NEAR(*half.period(3.0), kPi / 3, 1e-15);
}

TEST(RotationKernel, NormalizationIsIdempotent) {
  Rng rng(4);
  const RotationKernel k(FrequencyProfile::parse("poly:0.5,1,0.2"));
  const ToleranceProfile tol;
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(-2, 2);
    const double th = rng.uniform(-20, 20);
    const double a = k.normalize(th, t, tol);
    EXPECT_NEAR(k.normalize(a, t, tol), a, 1e-12);
  }
}

TEST(Quotient, ClassesKeepRepresentativeAndCompareNormalized) {
  const auto m = models::circle_quotient(FrequencyProfile::parse("t"), 1, 1);
  const Vector x = v3(1, 0, 2);
  const Arrow a = m.quotient->make_class(0.3, x);
  const Arrow b = m.quotient->make_class(0.3 + kPi, x);
  EXPECT_LT(m.quotient->arrow_distance(a, b), 1e-12);
  EXPECT_NEAR(additive_value(b.as<QuotientArrow>().representative.group), 0.3 + kPi, 1e-15);
  EXPECT_LT(m.quotient->arrow_distance(m.quotient->make_class(kPi, x), m.quotient->unit(x)), 1e-12);
}

TEST(Quotient, RejectsMismatchedFrequency) {
  const auto base = build_translation(additive_reals(), rotation_action(FrequencyProfile::parse("t")));
  EXPECT_THROW(quotient_by_kernel(base, RotationKernel(FrequencyProfile::parse("poly:1"))), ConfigurationError);
}

TEST(Pullback, ArrowValidation) {
  const auto m = models::radial_pullback();
  const Vector t = Vector::Constant(1, 2.0);
  const Arrow h = make_action_arrow(rot_z(0.4), v3(0, 0, 2));
  EXPECT_NO_THROW(m.pullback->make_arrow(t, h, t));
  EXPECT_THROW(m.pullback->make_arrow(Vector::Constant(1, 1.0), h, t), MalformedArrowError);
}

TEST(WeakPullback, PointAndArrowValidation) {
  const auto m = models::radial_pullback();
  const auto wp = build_weak_pullback(m.planar, m.projection);
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const Vector z = wp.groupoid->sample_point(rng);
    const auto parts = wp.groupoid->split(z);
    EXPECT_LT((wp.groupoid->make_point(parts.left, parts.bridge, parts.right) - z).norm(), 1e-14);
    EXPECT_LT((wp.groupoid->source(wp.groupoid->unit(z)) - z).norm(), 1e-14);
  }
  EXPECT_THROW(build_weak_pullback(m.planar, models::pole_collapse(2).direct), CompositionError);
}

TEST(ArrowTangent, DimensionsAndSourceRank) {
  const auto g = build_translation(so3(), linear_action(3));
  const ArrowTangent t = g->arrow_tangent(make_action_arrow(rot_z(0.2), v3(1, 2, 3)));
  EXPECT_EQ(t.basis.cols(), 6);
  EXPECT_EQ(numeric_rank(t.ds), 3);
  EXPECT_EQ(numeric_rank(t.dt), 3);
}

TEST(Hooks, MissingSamplerIsAPreconditionError) {
  const auto g = build_translation(so3(), linear_action(3));
  Rng rng(1);
  EXPECT_THROW(g->sample_point(rng), PreconditionError);
  EXPECT_FALSE(g->same_orbit(v3(1, 0, 0), v3(0, 1, 0)).has_value());
  GroupoidHooks h;
  h.same_orbit = [](const Vector& a, const Vector& b) { return std::abs(a.norm() - b.norm()) < 1e-9; };
  EXPECT_EQ(g->with_hooks(h)->same_orbit(v3(1, 0, 0), v3(0, 1, 0)), std::optional<bool>(true));
}
