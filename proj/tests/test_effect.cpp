#include "groupoid_effect/effect.hpp"
#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/homs.hpp"
#include "groupoid_effect/models.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace ge;

namespace {

constexpr double kPi = std::numbers::pi;

Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

std::shared_ptr<const TranslationGroupoid> so3_space() {
  GroupoidHooks h;
  h.sample_point = models::box_sampler(3, 2.0);
  h.sample_isotropy = stabilizer_isotropy(stabilizer_so3);
  return build_translation(so3(), linear_action(3), h);
}

}  // namespace

TEST(Longitudinal, OrbitDimensionsOfRotations) {
  const auto g = so3_space();
  EXPECT_EQ(longitudinal_space(*g, Vector::Zero(3)).dim(), 0);
  EXPECT_EQ(longitudinal_space(*g, v3(0, 0, 1)).dim(), 2);
  EXPECT_EQ(longitudinal_space(*g, v3(0.3, -1, 2)).dim(), 2);
  const auto plane = build_translation(so2(), linear_action(2));
  EXPECT_EQ(longitudinal_space(*plane, Vector::Zero(2)).dim(), 0);
  EXPECT_EQ(longitudinal_space(*plane, Vector::Ones(2)).dim(), 1);
  EXPECT_EQ(transversal_space(*plane, Vector::Ones(2)).quotient.dim(), 1);
}

TEST(Effect, ReflectionExample) {
  const auto m = models::reflections();
  Matrix flip = Matrix::Identity(2, 2);
  flip(1, 1) = -1;
  const Vector p = Vector::Unit(2, 0);
  const Arrow a = make_action_arrow(flip, p);
  const Effect up = effect(*m.plane, a);
  ASSERT_EQ(up.map.matrix.rows(), 1);
  EXPECT_NEAR(up.map.matrix(0, 0), 1.0, 1e-12);
  EXPECT_TRUE(is_ineffective(*m.plane, a).ineffective);

  const Arrow image = m.hom->apply(a);
  const Effect down = effect(*m.space, image);
  // The axis-preserving group is one-dimensional: rotations about z.
  Matrix jz = Matrix::Zero(3, 3);
  jz(1, 0) = 1;
  jz(0, 1) = -1;
  const auto expected = oracle::linear_effect({jz}, image.as<ActionArrow>().group, v3(1, 0, 0));
  EXPECT_LT(oracle::basis_free_distance(down.map.matrix, down.map.source.complement(), expected.effect,
                                        expected.complement),
            1e-12);
  const auto res = is_ineffective(*m.space, image);
  EXPECT_FALSE(res.ineffective);
  EXPECT_NEAR(res.deviation, 2.0, 1e-12);
}

TEST(Effect, MatchesLinearOracleOnRandomStabilizers) {
  const auto g = so3_space();
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const Vector x = i % 5 == 0 ? Vector(Vector::Zero(3)) : g->sample_point(rng);
    const Arrow a = *g->sample_isotropy(rng, x);
    const Effect e = effect(*g, a);
    const auto ref = oracle::linear_effect(oracle::so3_basis(), a.as<ActionArrow>().group, x);
    EXPECT_LT(oracle::basis_free_distance(e.map.matrix, e.map.source.complement(), ref.effect, ref.complement), 1e-10);
  }
}

TEST(Effect, RequiresIsotropicArrow) {
  const auto g = so3_space();
  EXPECT_THROW(effect(*g, make_action_arrow(rot_z(0.5), v3(1, 0, 0))), PreconditionError);
  EXPECT_NO_THROW(arrow_quotient_map(*g, make_action_arrow(rot_z(0.5), v3(1, 0, 0))));
}

TEST(Effect, QuotientOnTheAxisRotatesThePlane) {
  const auto m = models::circle_quotient(FrequencyProfile::parse("poly:0.5,1"), 1, 1);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.uniform(-2, 2), theta = rng.uniform(-4, 4);
    const Vector x = v3(0, 0, t);
    const Effect e = effect(*m.quotient, m.quotient->make_class(theta, x));
    const Matrix rep = e.map.source.complement() * e.map.matrix * e.map.source.complement().transpose();
    Matrix expected = oracle::rot_z((0.5 + t) * theta);
    EXPECT_LT((rep - expected).norm(), 1e-9);
  }
}

TEST(Effect, WholeTurnsOffTheAxisAreIneffective) {
  const auto m = models::circle_quotient(FrequencyProfile::parse("t"), 1, 1);
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(0.2, 2) * (rng.coin() ? 1 : -1);
    const Vector x = v3(rng.uniform(0.2, 2), rng.uniform(-2, 2), t);
    const double turn = 2 * kPi / std::abs(t);
    EXPECT_LT(is_ineffective(*m.quotient, m.quotient->make_class((1 + rng.index(3)) * turn, x)).deviation, 1e-9);
    // Odd half turns move points off the axis.
    EXPECT_FALSE(m.base->is_isotropic(make_action_arrow(additive_element((0.5 + rng.index(3)) * turn), x)));
  }
}

TEST(Effect, FunctorialOnRandomPairs) {
  const auto g = so3_space();
  Rng rng(30);
  std::vector<std::pair<Arrow, Arrow>> pairs;
  for (int i = 0; i < 300; ++i) {
    const Vector x = i % 3 == 0 ? Vector(Vector::Zero(3)) : g->sample_point(rng);
    pairs.emplace_back(*g->sample_isotropy(rng, x), *g->sample_isotropy(rng, x));
  }
  EXPECT_LT(effect_functoriality_check(*g, pairs), 1e-10);
}

TEST(Effect, PullbackEffectsAgreeWithTransport) {
  const auto m = models::radial_pullback();
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vector t = m.pullback->sample_point(rng);
    const Arrow a = *m.pullback->sample_isotropy(rng, t);
    EXPECT_LT((effect(*m.pullback, a).map.matrix - transported_effect(*m.projection, a)).norm(), 1e-10);
  }
}

TEST(IsotropyModels, OriginOfThePlane) {
  const auto m = models::reflections();
  Rng rng(8);
  std::vector<Arrow> s;
  Matrix flip = Matrix::Identity(2, 2);
  flip(1, 1) = -1;
  s.push_back(make_action_arrow(flip, Vector::Zero(2)));
  s.push_back(make_action_arrow(flip, Vector::Zero(2)));
  s.push_back(make_action_arrow(rot2(kPi / 2), Vector::Zero(2)));
  const EffectiveIsotropyModel model = effective_infinitesimal_model(*m.plane, Vector::Zero(2), s);
  EXPECT_EQ(model.effects.size(), 3u);  // identity, flip, quarter turn
  EXPECT_EQ(model.find(Matrix::Identity(2, 2), 1e-9), 0);
  const IsotropyPartition part = ineffective_subgroup_sample(*m.plane, Vector::Zero(2), s);
  EXPECT_TRUE(part.ineffective.empty());
  EXPECT_EQ(part.effective.size(), 3u);
}

TEST(IsotropyModels, IneffectiveSubgroupAtThePole) {
  const auto g = so3_space();
  Rng rng(10);
  std::vector<Arrow> s;
  for (int i = 0; i < 10; ++i) s.push_back(*g->sample_isotropy(rng, v3(0, 0, 2)));
  const IsotropyPartition part = ineffective_subgroup_sample(*g, v3(0, 0, 2), s);
  EXPECT_EQ(part.ineffective.size(), 10u);
  EXPECT_TRUE(part.closed);
  EXPECT_LT(part.closure_deviation, 1e-10);
}
