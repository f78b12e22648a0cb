#pragma once

// Longitudinal and transversal tangent spaces, infinitesimal effects of
// arrows, and sampled effective isotropy models.

#include "groupoid_effect/groupoid.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ge {

class GroupoidHom;

// Tangent directions along the orbit through x: the target differential on
// the source fiber of the unit arrow.
Subspace longitudinal_space(const Groupoid& g, const Vector& x, const ToleranceProfile& tol = {});

struct TransversalData {
  Vector point;
  Subspace longitudinal;
  QuotientSpace quotient;
};

TransversalData transversal_space(const Groupoid& g, const Vector& x, const ToleranceProfile& tol = {});

// Quotient map T_s(a) / L -> T_t(a) / L induced by any arrow, through a local
// section of the source map: dt o (ds)^+ on the arrow tangent. Throws
// InternalConsistencyError if the longitudinal is not preserved.
QuotientLinearMap arrow_quotient_map(const Groupoid& g, const Arrow& a, const ToleranceProfile& tol = {});
// Same, between caller-supplied quotients (for comparisons that must share
// complement bases with other maps).
QuotientLinearMap arrow_quotient_map(const Groupoid& g, const Arrow& a, const QuotientSpace& src,
                                     const QuotientSpace& dst, const ToleranceProfile& tol = {});

struct Effect {
  Arrow arrow;
  QuotientLinearMap map;
};

// Effect of an isotropic arrow on the transversal space at its base point.
// Throws PreconditionError for non-isotropic arrows.
Effect effect(const Groupoid& g, const Arrow& a, const ToleranceProfile& tol = {});
Effect effect(const Groupoid& g, const Arrow& a, const QuotientSpace& quotient,
              const ToleranceProfile& tol = {});

struct IneffectivityResult {
  bool ineffective = false;
  double deviation = 0;  // |effect - identity| in Frobenius norm
};

IneffectivityResult is_ineffective(const Groupoid& g, const Arrow& a, const ToleranceProfile& tol = {});

struct IsotropyPartition {
  std::vector<std::size_t> ineffective;  // indices into the samples
  std::vector<std::size_t> effective;
  std::vector<double> deviations;
  // Largest deviation among products of two sampled ineffectives.
  double closure_deviation = 0;
  bool closed = true;
};

IsotropyPartition ineffective_subgroup_sample(const Groupoid& g, const Vector& x,
                                              const std::vector<Arrow>& samples,
                                              const ToleranceProfile& tol = {});

struct EffectiveIsotropyModel {
  struct Entry {
    std::optional<std::size_t> sample_index;  // first sample with this effect; empty for the unit
    Matrix effect;
  };
  Vector point;
  QuotientSpace quotient;
  std::vector<Entry> effects;  // deduplicated; always starts with the identity
  // Largest distance from a product of two model effects to the model.
  double closure_deviation = 0;

  // Index of the entry within tol of m, or -1.
  int find(const Matrix& m, double tol) const;
};

EffectiveIsotropyModel effective_infinitesimal_model(const Groupoid& g, const Vector& x,
                                                     const std::vector<Arrow>& samples,
                                                     const ToleranceProfile& tol = {});

// max |eps(a' a) - eps(a') eps(a)| over pairs (a', a) isotropic at a common point.
double effect_functoriality_check(const Groupoid& g, const std::vector<std::pair<Arrow, Arrow>>& pairs,
                                  const ToleranceProfile& tol = {});

// The effect of a carried over through a hom p with bijective transversal
// map: (Tp)^-1 eps(p a) Tp. Cross-check for pullback and weak-pullback arrows.
Matrix transported_effect(const GroupoidHom& p, const Arrow& a, const ToleranceProfile& tol = {});

}  // namespace ge
