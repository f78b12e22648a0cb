#pragma once

// Homomorphism analysis: transversal maps, witnessed classification, natural
// congruences, orbit maps, and finite-difference checks of the analytic data.

#include "groupoid_effect/effect.hpp"
#include "groupoid_effect/hom.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ge {

// Three-valued flag: missing evidence is Undetermined, never False.
enum class Tri { False, True, Undetermined };

std::string to_string(Tri t);
Tri tri(bool b);
// False if any is False, else Undetermined if any is, else True.
Tri tri_and(std::initializer_list<Tri> flags);

// T_x phi: T_x / L_x -> T_f(x) / L_f(x). Throws NotWellDefinedError when the
// Jacobian does not carry longitudinals into longitudinals.
QuotientLinearMap transversal_map(const GroupoidHom& phi, const Vector& x, const ToleranceProfile& tol = {});
QuotientLinearMap transversal_map(const GroupoidHom& phi, const Vector& x, const QuotientSpace& src,
                                  const QuotientSpace& dst, const ToleranceProfile& tol = {});

// max |T phi eps(g) - eps(phi g) T phi| over isotropic arrows at x.
double intertwining_check(const GroupoidHom& phi, const Vector& x, const std::vector<Arrow>& isotropy,
                          const ToleranceProfile& tol = {});

struct RankWitness {
  int rank = 0;
  int required = 0;  // dimension of the codomain base tangent at s(h)
};

// Rank of (x, h) -> s(h) on X x_{f,t} D1 at (x, h), for t(h) = f(x).
RankWitness fibered_source_rank(const GroupoidHom& phi, const Vector& x, const Arrow& h,
                                const ToleranceProfile& tol = {});

struct ClassifyOptions {
  std::size_t codomain_points = 10;     // points tested against the surjectivity witness
  std::size_t arrows_per_point = 2;     // lift / rank samples per domain point
  std::size_t isotropy_per_point = 3;   // samples for the ineffective-preservation flag
};

struct HomClassification {
  Tri in_dotted_category = Tri::Undetermined;
  Tri transversal = Tri::Undetermined;
  Tri completely_transversal = Tri::Undetermined;
  Tri cinfty_full = Tri::Undetermined;
  Tri faithful_at_samples = Tri::Undetermined;
  Tri faithfully_transversal = Tri::Undetermined;
  Tri weak_equivalence = Tri::Undetermined;
  Tri in_E = Tri::Undetermined;

  std::size_t points = 0;
  int worst_rank_deficit = 0;
  // Smallest singular value of T phi over points with a nonzero source
  // quotient; empty if there were none.
  std::optional<double> min_singular_value;
  double max_condition_number = 1.0;
  std::size_t surjectivity_points = 0;
  double surjectivity_residual = 0;
  std::size_t lift_samples = 0;
  double lift_residual = 0;
  double faithful_residual = 0;
  std::size_t not_well_defined = 0;  // points where T phi failed to descend
  std::vector<std::string> notes;
};

HomClassification classify(const GroupoidHom& phi, const std::vector<Vector>& sample_points, Rng& rng,
                           const ToleranceProfile& tol = {}, const ClassifyOptions& options = {});

struct IsotropySample {
  Vector point;
  std::vector<Arrow> arrows;
};

struct PreservationReport {
  Tri in_dotted_category = Tri::Undetermined;  // ineffective maps to ineffective at every sample
  std::size_t arrows = 0;
  std::size_t dotted_violations = 0;
  // Counterexamples to the implications that hold in theory:
  std::size_t surjective_violations = 0;  // T phi onto, yet an ineffective maps to an effective
  std::size_t injective_violations = 0;   // T phi injective, yet an effective maps to an ineffective
  std::size_t equivalence_checked = 0;    // arrows at points with bijective T phi
  double worst_image_deviation = 0;       // over ineffective domain arrows
  // Per point: whether every sampled ineffective stayed ineffective.
  std::vector<std::pair<Vector, bool>> membership;
};

PreservationReport ineffective_preservation_check(const GroupoidHom& phi,
                                                  const std::vector<IsotropySample>& samples,
                                                  const ToleranceProfile& tol = {});

enum class CongruenceMode { Exact, Congruence };

std::string to_string(CongruenceMode m);

struct NaturalTransformationWitness {
  std::function<Arrow(const Vector&)> tau;  // tau(x): phi(x) -> psi(x)
  CongruenceMode mode = CongruenceMode::Congruence;
};

struct CongruenceResult {
  bool passed = false;
  bool rejected = false;  // tau mistyped, or a defect arrow was not isotropic
  std::string reason;
  double max_deviation = 0;
  std::size_t samples = 0;
};

// For each g: d = [psi(g) tau(sg)]^-1 [tau(tg) phi(g)] must be a unit (exact)
// or ineffective (congruence).
CongruenceResult natural_congruence_check(const NaturalTransformationWitness& tau, const GroupoidHom& phi,
                                          const GroupoidHom& psi, const std::vector<Arrow>& arrows,
                                          const ToleranceProfile& tol = {});

struct ObstructionResult {
  Tri witness_found = Tri::Undetermined;  // Undetermined for an empty candidate set
  double best_deviation = 0;
  std::size_t candidates = 0;
};

// Searches candidates h: phi(x) -> psi(x) for h phi(g) = psi(g) h (exactly
// or modulo ineffective arrows), g isotropic at x.
ObstructionResult congruence_obstruction(const GroupoidHom& phi, const GroupoidHom& psi, const Vector& x,
                                         const Arrow& g, const std::vector<Arrow>& candidates,
                                         CongruenceMode mode, const ToleranceProfile& tol = {});

// max |eps(tau(x)) T phi - T psi| over points, with eps(tau(x)) the quotient
// map of the arrow tau(x).
double natural_transformation_effect_check(const NaturalTransformationWitness& tau, const GroupoidHom& phi,
                                           const GroupoidHom& psi, const std::vector<Vector>& points,
                                           const ToleranceProfile& tol = {});

struct OrbitMapReport {
  Tri injective = Tri::Undetermined;
  Tri surjective = Tri::Undetermined;
  std::size_t pairs = 0;
  std::size_t injectivity_failures = 0;
  std::size_t codomain_points = 0;
  std::size_t surjectivity_failures = 0;
};

OrbitMapReport orbit_map_check(const GroupoidHom& phi, const std::vector<std::pair<Vector, Vector>>& pairs,
                               const std::vector<Vector>& codomain_points, const ToleranceProfile& tol = {});

// Central-difference cross-checks (max absolute entry error).
double action_jacobian_fd_residual(const SmoothActionModel& action, const Matrix& g, const Vector& x,
                                   const ToleranceProfile& tol = {});
double action_generator_fd_residual(const LieGroupModel& group, const SmoothActionModel& action,
                                    const Vector& x, const ToleranceProfile& tol = {});
// Empty unless both base charts are flat.
std::optional<double> base_jacobian_fd_residual(const GroupoidHom& phi, const Vector& x,
                                                const ToleranceProfile& tol = {});
// Empty unless both groupoids have flat arrow charts and phi has an
// arrow-level differential.
std::optional<double> arrow_jacobian_fd_residual(const GroupoidHom& phi, const Arrow& a,
                                                 const ToleranceProfile& tol = {});

}  // namespace ge
