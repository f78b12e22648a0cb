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

}  // namespace

TEST(Tri, Combination) {
  EXPECT_EQ(tri_and({Tri::True, Tri::True}), Tri::True);
  EXPECT_EQ(tri_and({Tri::True, Tri::Undetermined}), Tri::Undetermined);
  EXPECT_EQ(tri_and({Tri::Undetermined, Tri::False}), Tri::False);
  EXPECT_EQ(tri(true), Tri::True);
}

TEST(TransversalMap, ReflectionHomAtTheFixedPoint) {
  const auto m = models::reflections();
  const QuotientLinearMap t = transversal_map(*m.hom, Vector::Unit(2, 0));
  ASSERT_EQ(t.matrix.rows(), 2);
  ASSERT_EQ(t.matrix.cols(), 1);
  const Vector image = t.target.complement() * t.matrix * t.source.complement().transpose() * Vector::Unit(2, 0);
  EXPECT_LT((image - v3(1, 0, 0)).norm(), 1e-12);
}

TEST(TransversalMap, PoleCollapseVanishes) {
  const auto m = models::pole_collapse(3);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) EXPECT_LT(transversal_map(*m.direct, m.plane->sample_point(rng)).matrix.norm(), 1e-14);
}

TEST(Intertwining, HoldsForEveryModelHom) {
  Rng rng(2);
  const auto ex1 = models::reflections();
  const auto pole = models::pole_collapse(-2);
  const auto circ = models::circle_quotient(FrequencyProfile::parse("texp:1,0.3"), 1, -1);
  const std::vector<HomPtr> homs = {ex1.hom, pole.direct, pole.twisted, circ.first, circ.second, circ.projection};
  for (const auto& h : homs) {
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
      const Vector x = i % 4 == 0 ? Vector(Vector::Zero(h->domain()->point_dim())) : h->domain()->sample_point(rng);
      std::vector<Arrow> iso;
      for (int k = 0; k < 3; ++k) iso.push_back(*h->domain()->sample_isotropy(rng, x));
      worst = std::max(worst, intertwining_check(*h, x, iso));
    }
    EXPECT_LT(worst, 1e-8) << h->name();
  }
}

TEST(Classify, ProjectionIsAWeakEquivalence) {
  const auto m = models::radial_pullback();
  Rng rng(4);
  std::vector<Vector> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(m.pullback->sample_point(rng));
  const HomClassification c = classify(*m.projection, pts, rng);
  EXPECT_EQ(c.transversal, Tri::True);
  EXPECT_EQ(c.completely_transversal, Tri::True);
  EXPECT_EQ(c.cinfty_full, Tri::True);
  EXPECT_EQ(c.faithfully_transversal, Tri::True);
  EXPECT_EQ(c.weak_equivalence, Tri::True);
  EXPECT_EQ(c.in_E, Tri::True);
  ASSERT_TRUE(c.min_singular_value);
  EXPECT_GT(*c.min_singular_value, 0.5);
}

TEST(Classify, MissingWitnessesAreUndetermined) {
  const auto m = models::pole_collapse(3);
  Rng rng(4);
  std::vector<Vector> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(m.plane->sample_point(rng));
  const HomClassification c = classify(*m.direct, pts, rng);
  EXPECT_EQ(c.transversal, Tri::False);
  EXPECT_EQ(c.faithfully_transversal, Tri::False);
  EXPECT_EQ(c.cinfty_full, Tri::Undetermined);
  EXPECT_NE(c.in_E, Tri::True);
}

TEST(Classify, TransversalImpliesFullRowRank) {
  Rng rng(5);
  const auto m = models::radial_pullback();
  const HomPtr id = identity_hom(m.punctured);
  for (int i = 0; i < 10; ++i) {
    const Vector x = m.punctured->sample_point(rng);
    const HomClassification c = classify(*id, {x}, rng);
    ASSERT_EQ(c.transversal, Tri::True);
    const Matrix t = transversal_map(*id, x).matrix;
    EXPECT_EQ(numeric_rank(t), t.rows());
  }
}

TEST(FiberedRank, IdentityIsSubmersive) {
  const auto m = models::radial_pullback();
  const HomPtr id = identity_hom(m.punctured);
  const RankWitness w = fibered_source_rank(*id, v3(0, 1, 1), m.punctured->unit(v3(0, 1, 1)));
  EXPECT_EQ(w.rank, w.required);
  EXPECT_EQ(w.required, 3);
}

TEST(Congruence, UnitsBetweenEqualHomsAreExact) {
  const auto m = models::pole_collapse(2);
  Rng rng(6);
  std::vector<Arrow> arrows;
  for (int i = 0; i < 50; ++i) arrows.push_back(m.plane->sample_arrow(rng, m.plane->sample_point(rng)));
  const auto cod = m.space;
  const auto phi = m.direct;
  NaturalTransformationWitness tau{[cod, phi](const Vector& x) { return cod->unit(phi->base_map(x)); },
                                   CongruenceMode::Exact};
  const CongruenceResult r = natural_congruence_check(tau, *m.direct, *m.direct, arrows);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_deviation, 1e-14);
  EXPECT_EQ(r.samples, 50u);
}

TEST(Congruence, MistypedTransformationIsRejected) {
  const auto m = models::pole_collapse(2);
  Rng rng(6);
  std::vector<Arrow> arrows{m.plane->sample_arrow(rng, m.plane->sample_point(rng))};
  const auto cod = m.space;
  NaturalTransformationWitness tau{[cod](const Vector&) { return cod->unit(v3(1, 0, 0)); }, CongruenceMode::Exact};
  const CongruenceResult r = natural_congruence_check(tau, *m.direct, *m.twisted, arrows);
  EXPECT_TRUE(r.rejected);
  EXPECT_FALSE(r.passed);
}

TEST(Obstruction, ClosedFormForAbelianStabilizers) {
  Rng rng(7);
  for (int k : {-2, 0, 2, 3, 5}) {
    const auto m = models::pole_collapse(k);
    std::vector<Arrow> cands;
    for (int j = 0; j < 36; ++j) cands.push_back(make_action_arrow(rot_z(2 * kPi * j / 36), v3(0, 0, 1)));
    for (int i = 0; i < 10; ++i) {
      const double beta = rng.uniform(-kPi, kPi);
      const ObstructionResult r = congruence_obstruction(*m.direct, *m.twisted, Vector::Zero(2),
                                                         make_action_arrow(rot2(beta), Vector::Zero(2)), cands,
                                                         CongruenceMode::Exact);
      const double closed = 2 * std::sqrt(2.0) * std::abs(std::sin((k - 1) * beta / 2));
      EXPECT_NEAR(r.best_deviation, closed, 1e-10);
      EXPECT_EQ(r.witness_found, tri(closed <= 1e-8));
      EXPECT_EQ(r.candidates, 36u);
    }
  }
}

TEST(Obstruction, EmptyCandidateSetIsUndetermined) {
  const auto m = models::pole_collapse(3);
  const ObstructionResult r = congruence_obstruction(*m.direct, *m.twisted, Vector::Zero(2),
                                                     make_action_arrow(rot2(0.3), Vector::Zero(2)), {},
                                                     CongruenceMode::Exact);
  EXPECT_EQ(r.witness_found, Tri::Undetermined);
}

TEST(NaturalEffect, RotatedProjection) {
  const auto m = models::radial_pullback();
  Rng rng(8);
  std::vector<Vector> pts;
  for (int i = 0; i < 30; ++i) pts.push_back(m.pullback->sample_point(rng));
  const NaturalTransformationWitness tau{m.rotation, CongruenceMode::Exact};
  EXPECT_LT(natural_transformation_effect_check(tau, *m.projection, *m.rotated, pts), 1e-8);
  const NaturalTransformationWitness units{[&](const Vector& t) { return m.punctured->unit(m.projection->base_map(t)); },
                                           CongruenceMode::Exact};
  EXPECT_EQ(natural_transformation_effect_check(units, *m.projection, *m.projection, pts), 0.0);
}

TEST(OrbitMap, IdentityIsBijective) {
  const auto m = models::radial_pullback();
  Rng rng(9);
  std::vector<std::pair<Vector, Vector>> pairs;
  std::vector<Vector> cod;
  for (int i = 0; i < 20; ++i) {
    const Vector x = m.punctured->sample_point(rng);
    pairs.emplace_back(x, rng.coin() ? Vector(rot_z(1.0) * x) : m.punctured->sample_point(rng));
    cod.push_back(m.punctured->sample_point(rng));
  }
  const OrbitMapReport r = orbit_map_check(*identity_hom(m.punctured), pairs, cod);
  EXPECT_EQ(r.injective, Tri::True);
  EXPECT_EQ(r.surjective, Tri::True);
}

TEST(OrbitMap, MissingOracleIsUndetermined) {
  const auto g = build_translation(so3(), linear_action(3));
  const OrbitMapReport r = orbit_map_check(*identity_hom(g), {{v3(1, 0, 0), v3(0, 1, 0)}}, {});
  EXPECT_EQ(r.injective, Tri::Undetermined);
}

TEST(FiniteDifferences, AgreeWithAnalyticAndCatchErrors) {
  Rng rng(10);
  const auto g = build_translation(so3(), linear_action(3));
  const auto rot = rotation_action(FrequencyProfile::parse("texp:2,-0.4"));
  for (int i = 0; i < 30; ++i) {
    const Vector x = v3(rng.normal(), rng.normal(), rng.normal());
    EXPECT_LT(action_jacobian_fd_residual(g->action(), g->group().sample(rng), x), 1e-6);
    EXPECT_LT(action_generator_fd_residual(g->group(), g->action(), x), 1e-6);
    EXPECT_LT(action_jacobian_fd_residual(rot, additive_element(rng.uniform(-3, 3)), x), 1e-6);
    EXPECT_LT(action_generator_fd_residual(additive_reals(), rot, x), 1e-6);
  }
  // A hom whose declared Jacobian is off by a factor.
  const BaseMap wrong{[](const Vector& x) { return Vector(2 * x); },
                      [](const Vector&) { return Matrix(Matrix::Identity(3, 3)); }};
  const HomPtr bad = translation_hom(g, g, GroupMap{[](const Matrix& a) { return a; }, Matrix::Identity(3, 3)}, wrong);
  const auto res = base_jacobian_fd_residual(*bad, v3(1, 2, 3));
  ASSERT_TRUE(res);
  EXPECT_NEAR(*res, 1.0, 1e-6);
}

TEST(FiniteDifferences, WeakPullbackBaseIsNotFlat) {
  const auto m = models::radial_pullback();
  const auto wp = build_weak_pullback(m.planar, m.projection);
  Rng rng(2);
  EXPECT_FALSE(base_jacobian_fd_residual(*wp.left_projection, wp.groupoid->sample_point(rng)).has_value());
}

TEST(Preservation, ReflectionHomLeavesTheDottedCategory) {
  const auto m = models::reflections();
  Matrix flip = Matrix::Identity(2, 2);
  flip(1, 1) = -1;
  const PreservationReport r =
      ineffective_preservation_check(*m.hom, {{Vector::Unit(2, 0), {make_action_arrow(flip, Vector::Unit(2, 0))}}});
  EXPECT_EQ(r.in_dotted_category, Tri::False);
  EXPECT_EQ(r.dotted_violations, 1u);
  ASSERT_EQ(r.membership.size(), 1u);
  EXPECT_FALSE(r.membership[0].second);
}
