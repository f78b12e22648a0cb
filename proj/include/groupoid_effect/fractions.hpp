#pragma once

// Right fractions (spans), their composition through weak pullbacks, sampled
// instances of the fraction axioms, and pointwise transversal-skeleton data.

#include "groupoid_effect/homs.hpp"
#include "groupoid_effect/pullback.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ge {

// apex --left--> target groupoid, apex --right--> source groupoid, with the
// right leg classified into E.
struct Span {
  HomPtr left;
  HomPtr right;
  HomClassification right_class;

  const GroupoidPtr& apex() const { return left->domain(); }
};

struct SampleBudget {
  std::size_t points = 8;
  ClassifyOptions classify;
};

// Classifies `right` on points sampled from the apex; throws CompositionError
// naming the failing flag unless in_E is true.
Span make_span(HomPtr left, HomPtr right, Rng& rng, const ToleranceProfile& tol = {},
               const SampleBudget& budget = {});

struct SpanComposition {
  Span span;
  WeakPullbackConstruction apex;
};

// outer = (Delta <- G' -> G), inner = (S <- D' -> Delta). The apex is the weak
// pullback of outer.left along inner.right.
SpanComposition compose_spans(const Span& outer, const Span& inner, Rng& rng, const ToleranceProfile& tol = {},
                              const SampleBudget& budget = {});

struct SpanBridge {
  HomPtr to_first;   // bridge apex -> first span's apex
  HomPtr to_second;  // bridge apex -> second span's apex
  std::optional<NaturalTransformationWitness> left_tau;   // first.left o to_first => second.left o to_second
  std::optional<NaturalTransformationWitness> right_tau;  // same for the right legs
};

struct SpanEquivalenceReport {
  Tri equivalent = Tri::Undetermined;
  Tri through_in_E = Tri::Undetermined;
  std::optional<CongruenceResult> left;
  std::optional<CongruenceResult> right;
};

SpanEquivalenceReport span_equivalence_check(const Span& first, const Span& second, const SpanBridge& bridge,
                                             const std::vector<Arrow>& arrows, Rng& rng,
                                             const ToleranceProfile& tol = {}, const SampleBudget& budget = {});

struct AxiomIIReport {
  WeakPullbackConstruction pullback;
  Tri phi_transversal = Tri::Undetermined;
  AxiomReport structure;
  HomClassification left_projection;  // must land in E
  PreservationReport right_preservation;
  Tri verified = Tri::Undetermined;
};

struct AxiomIIOptions {
  std::size_t fuzz_samples = 1000;
  std::size_t preservation_points = 10;
  std::size_t isotropy_per_point = 5;
  std::uint64_t seed = 0;
  SampleBudget budget;
};

// Completes psi: D -> S and phi: G -> S (phi in E) to a commutative square
// through the weak pullback.
AxiomIIReport axiom_II_instance(HomPtr psi, HomPtr phi, Rng& rng, const ToleranceProfile& tol = {},
                                const AxiomIIOptions& options = {});

struct AxiomIIIInput {
  HomPtr first;   // G -> D
  HomPtr second;  // G -> D
  HomPtr phi;     // D -> S, in E
  NaturalTransformationWitness tau_prime;  // phi o first => phi o second
  BaseMap cover;                           // U -> base of G
  int cover_dim = 0;
  GroupoidHooks cover_hooks;               // samplers for the pullback over the cover
  NaturalTransformationWitness tau;        // on cover points: first(c u) -> second(c u)
};

struct AxiomIIIReport {
  CongruenceResult lifted;        // tau as a congruence first o pi => second o pi
  double lift_consistency = 0;    // worst ineffectivity defect of tau'(c u)^-1 phi(tau(u))
  std::size_t points = 0;
  std::size_t faithful_samples = 0;
  std::size_t faithful_violations = 0;  // phi(h1) = phi(h2) mod ineffective but h1, h2 are not
  Tri verified = Tri::Undetermined;
  std::string reason;
};

AxiomIIIReport axiom_III_instance(const AxiomIIIInput& input, Rng& rng, std::size_t samples,
                                  const ToleranceProfile& tol = {});

// Pointwise skeleton data (x, y; theta, lambda) of a hom.
struct SkeletonPoint {
  struct Row {
    Matrix source_effect;
    Matrix target_effect;
  };
  Vector x;
  Vector y;
  QuotientSpace source;
  QuotientSpace target;
  std::vector<Row> theta;  // deduplicated by source effect; starts with the identity
  Matrix lambda;
  double equivariance_residual = 0;
  // False if two samples with the same source effect have different images.
  bool theta_well_defined = true;
};

// Throws InternalConsistencyError if lambda is not theta-equivariant.
SkeletonPoint skeleton_point(const GroupoidHom& phi, const Vector& x, const std::vector<Arrow>& isotropy,
                             const ToleranceProfile& tol = {});

struct SkeletonEquivalenceReport {
  Tri equivalent = Tri::Undetermined;
  double lambda_deviation = 0;
  double theta_deviation = 0;
  std::size_t matched = 0;
  std::size_t unmatched = 0;
};

// g: p.x -> q.x in `source`, h: p.y -> q.y in `target`.
SkeletonEquivalenceReport skeleton_equivalence_check(const SkeletonPoint& p, const SkeletonPoint& q,
                                                     const Groupoid& source, const Groupoid& target,
                                                     const Arrow& g, const Arrow& h,
                                                     const ToleranceProfile& tol = {});

// Throws CompositionError unless q.x = p.y. Rows of p whose image has no
// match in q are dropped.
SkeletonPoint skeleton_compose(const SkeletonPoint& p, const SkeletonPoint& q, const ToleranceProfile& tol = {});

// Max distance between the lambdas and between matched theta rows.
double skeleton_distance(const SkeletonPoint& p, const SkeletonPoint& q, const ToleranceProfile& tol = {});

struct ModelIsomorphismReport {
  Tri isomorphic = Tri::Undetermined;
  std::size_t points = 0;
  double max_condition_number = 1.0;
  std::size_t singular_lambdas = 0;
  std::size_t non_injective = 0;
  std::size_t non_surjective = 0;
};

// At each point: lambda invertible, and the sampled theta a bijection onto the
// codomain's sampled effective model.
ModelIsomorphismReport model_isomorphism_check(const GroupoidHom& phi, const std::vector<IsotropySample>& domain,
                                               const std::vector<std::vector<Arrow>>& codomain,
                                               const ToleranceProfile& tol = {});

}  // namespace ge
