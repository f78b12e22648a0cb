#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/fractions.hpp"
#include "groupoid_effect/models.hpp"

#include <gtest/gtest.h>

using namespace ge;

namespace {

NaturalTransformationWitness units_of(const HomPtr& h, CongruenceMode mode) {
  const GroupoidPtr cod = h->codomain();
  return {[h, cod](const Vector& x) { return cod->unit(h->base_map(x)); }, mode};
}

}  // namespace

TEST(Spans, RightLegMustBeInClassE) {
  const auto m = models::pole_collapse(3);
  Rng rng(1);
  EXPECT_THROW(make_span(identity_hom(m.plane), m.direct, rng), CompositionError);
}

TEST(Spans, IdentitySpansAreEquivalentToThemselves) {
  const auto m = models::radial_pullback();
  Rng rng(2);
  const HomPtr id = identity_hom(m.punctured);
  const Span s = make_span(id, id, rng);
  EXPECT_EQ(s.right_class.in_E, Tri::True);
  std::vector<Arrow> arrows;
  for (int i = 0; i < 20; ++i) arrows.push_back(m.punctured->sample_arrow(rng, m.punctured->sample_point(rng)));
  const SpanBridge bridge{id, id, units_of(id, CongruenceMode::Exact), units_of(id, CongruenceMode::Exact)};
  const SpanEquivalenceReport r = span_equivalence_check(s, s, bridge, arrows, rng);
  EXPECT_EQ(r.equivalent, Tri::True);
  EXPECT_EQ(r.through_in_E, Tri::True);
}

TEST(Spans, MissingTransformationIsUndetermined) {
  const auto m = models::radial_pullback();
  Rng rng(2);
  const HomPtr id = identity_hom(m.punctured);
  const Span s = make_span(id, id, rng);
  const SpanBridge bridge{id, id, std::nullopt, units_of(id, CongruenceMode::Exact)};
  EXPECT_EQ(span_equivalence_check(s, s, bridge, {}, rng).equivalent, Tri::Undetermined);
}

TEST(Spans, CompositionThroughTheWeakPullback) {
  const auto m = models::radial_pullback();
  Rng rng(3);
  const Span outer = make_span(m.planar, identity_hom(m.plane), rng);
  const Span inner = make_span(identity_hom(m.pullback), m.projection, rng);
  const SpanComposition c = compose_spans(outer, inner, rng);
  EXPECT_EQ(c.span.right_class.in_E, Tri::True);
  EXPECT_EQ(c.span.apex(), c.apex.groupoid);
  EXPECT_LT(check_groupoid_axioms(*c.apex.groupoid, 200, 5).worst(), 1e-8);
}

TEST(AxiomII, TrivialInstance) {
  const auto m = models::radial_pullback();
  Rng rng(4);
  const HomPtr id = identity_hom(m.punctured);
  AxiomIIOptions opts;
  opts.fuzz_samples = 100;
  opts.preservation_points = 5;
  const AxiomIIReport r = axiom_II_instance(id, id, rng, {}, opts);
  EXPECT_EQ(r.verified, Tri::True);
  EXPECT_LT(r.structure.worst(), 1e-8);
}

TEST(AxiomIII, EqualHomsWithUnits) {
  const auto m = models::circle_quotient(FrequencyProfile::parse("t"), 1, 1);
  Rng rng(5);
  AxiomIIIInput in;
  in.first = m.first;
  in.second = m.first;
  in.phi = identity_hom(m.space);
  in.tau_prime = units_of(m.first, CongruenceMode::Congruence);
  in.cover = BaseMap{[](const Vector& x) { return x; }, [](const Vector&) { return Matrix(Matrix::Identity(3, 3)); }};
  in.cover_dim = 3;
  const auto q = m.quotient;
  in.cover_hooks.sample_point = [q](Rng& r) { return q->sample_point(r); };
  in.cover_hooks.sample_arrow = [q](Rng& r, const Vector& u) {
    const Arrow h = q->sample_arrow(r, u);
    return Arrow{PullbackArrow{q->target(h), share(h), u}};
  };
  in.tau = units_of(m.first, CongruenceMode::Congruence);
  const AxiomIIIReport r = axiom_III_instance(in, rng, 30);
  EXPECT_EQ(r.verified, Tri::True) << r.reason;
  EXPECT_EQ(r.points, 30u);
}

TEST(Skeleton, IdentityHom) {
  const auto m = models::radial_pullback();
  Rng rng(6);
  const Vector x = m.punctured->sample_point(rng);
  std::vector<Arrow> iso;
  for (int i = 0; i < 4; ++i) iso.push_back(*m.punctured->sample_isotropy(rng, x));
  const SkeletonPoint p = skeleton_point(*identity_hom(m.punctured), x, iso);
  EXPECT_LT((p.lambda - Matrix::Identity(1, 1)).norm(), 1e-12);
  for (const auto& row : p.theta) EXPECT_LT((row.source_effect - row.target_effect).norm(), 1e-12);
  EXPECT_TRUE(p.theta_well_defined);
  const SkeletonEquivalenceReport same =
      skeleton_equivalence_check(p, p, *m.punctured, *m.punctured, m.punctured->unit(x), m.punctured->unit(x));
  EXPECT_EQ(same.equivalent, Tri::True);
  SkeletonPoint doubled = p;
  doubled.lambda *= 2;
  const SkeletonEquivalenceReport off =
      skeleton_equivalence_check(p, doubled, *m.punctured, *m.punctured, m.punctured->unit(x), m.punctured->unit(x));
  EXPECT_EQ(off.equivalent, Tri::False);
  EXPECT_NEAR(off.lambda_deviation, p.lambda.norm(), 1e-12);
}

TEST(Skeleton, CompositionIsFunctorialAndTyped) {
  const auto m = models::radial_pullback();
  Rng rng(7);
  const Vector t = m.pullback->sample_point(rng);
  std::vector<Arrow> iso, images;
  for (int i = 0; i < 4; ++i) {
    iso.push_back(*m.pullback->sample_isotropy(rng, t));
    images.push_back(m.projection->apply(iso.back()));
  }
  const SkeletonPoint p = skeleton_point(*m.projection, t, iso);
  const SkeletonPoint q = skeleton_point(*m.inclusion, p.y, images);
  const SkeletonPoint pq = skeleton_point(*composite({m.projection, m.inclusion}), t, iso);
  EXPECT_LT(skeleton_distance(skeleton_compose(p, q), pq), 1e-10);
  EXPECT_THROW(skeleton_compose(q, p), CompositionError);
  const SkeletonPoint id = skeleton_point(*identity_hom(m.inclusion->codomain()), q.y, {});
  const SkeletonPoint left = skeleton_compose(skeleton_compose(p, q), id);
  const SkeletonPoint right = skeleton_compose(p, skeleton_compose(q, id));
  EXPECT_LT((left.lambda - right.lambda).norm(), 1e-14);
}

TEST(Skeleton, NonEquivariantDataIsRejected) {
  // Not an equivariant lambda: the reflection hom at the origin is fine, but
  // an arrow sampled with the wrong base point is not isotropic.
  const auto m = models::reflections();
  EXPECT_THROW(skeleton_point(*m.hom, Vector::Zero(2), {make_action_arrow(rot2(0.3), Vector::Unit(2, 0))}),
               PreconditionError);
}

TEST(ModelIsomorphism, IdentityAndPoleCollapse) {
  const auto m = models::radial_pullback();
  Rng rng(8);
  std::vector<IsotropySample> dom;
  std::vector<std::vector<Arrow>> cod;
  for (int i = 0; i < 5; ++i) {
    const Vector x = m.punctured->sample_point(rng);
    dom.push_back({x, {*m.punctured->sample_isotropy(rng, x)}});
    cod.push_back({*m.punctured->sample_isotropy(rng, x)});
  }
  EXPECT_EQ(model_isomorphism_check(*identity_hom(m.punctured), dom, cod).isomorphic, Tri::True);

  const auto pole = models::pole_collapse(3);
  const ModelIsomorphismReport r = model_isomorphism_check(
      *pole.direct, {{Vector::Unit(2, 0), {pole.plane->unit(Vector::Unit(2, 0))}}}, {{}});
  EXPECT_EQ(r.isomorphic, Tri::False);
  EXPECT_EQ(r.singular_lambdas, 1u);
}
