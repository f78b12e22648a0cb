#pragma once

// Concretely presented Lie groupoids over open subsets of coordinate space
// (or, for weak pullbacks, over embedded submanifolds of a chart).
//
// Tangent data are expressed in charts. Each groupoid fixes
//   - a base chart of dimension chart_dim() in which base tangent vectors live,
//   - an arrow chart of dimension arrow_chart_dim() around every arrow.
// For translation groupoids the arrow chart at (g, x) is (xi, u) ->
// (g exp(xi), x + u).

#include "groupoid_effect/arrow.hpp"
#include "groupoid_effect/lie.hpp"
#include "groupoid_effect/numlin.hpp"
#include "groupoid_effect/rng.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace ge {

enum class GroupoidKind { Translation, GroupBundle, Quotient, Pullback, WeakPullback };

std::string to_string(GroupoidKind kind);

// Tangent space of the arrow manifold at one arrow.
struct ArrowTangent {
  Matrix basis;  // arrow_chart_dim x m, orthonormal columns
  Matrix ds;     // chart_dim x m: differential of the source map on the basis
  Matrix dt;     // chart_dim x m: differential of the target map on the basis
};

// Per-scenario sampling and orbit data. Empty members fall back to the
// groupoid's own defaults (which may not exist).
struct GroupoidHooks {
  std::function<Vector(Rng&)> sample_point;
  std::function<Arrow(Rng&, const Vector&)> sample_arrow;     // arrow with the given source
  std::function<Arrow(Rng&, const Vector&)> sample_isotropy;  // arrow from x to x
  std::function<bool(const Vector&, const Vector&)> same_orbit;
};

class Groupoid;
using GroupoidPtr = std::shared_ptr<const Groupoid>;

class Groupoid {
 public:
  virtual ~Groupoid() = default;

  GroupoidKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const ToleranceProfile& tolerance() const { return tol_; }

  virtual int point_dim() const = 0;
  virtual int chart_dim() const { return point_dim(); }
  virtual int arrow_chart_dim() const = 0;

  virtual Vector source(const Arrow& a) const = 0;
  virtual Vector target(const Arrow& a) const = 0;
  // later o earlier; throws CompositionError unless s(later) = t(earlier).
  virtual Arrow compose(const Arrow& later, const Arrow& earlier) const = 0;
  virtual Arrow inverse(const Arrow& a) const = 0;
  virtual Arrow unit(const Vector& x) const = 0;

  virtual double arrow_distance(const Arrow& a, const Arrow& b) const = 0;
  virtual double point_distance(const Vector& x, const Vector& y) const { return (x - y).norm(); }
  // Points equal within map_abs_tol, relative to their size.
  bool same_point(const Vector& x, const Vector& y) const;
  bool is_isotropic(const Arrow& a) const { return same_point(source(a), target(a)); }

  // Orthonormal basis of the base tangent space in chart coordinates.
  virtual Subspace base_tangent(const Vector&) const { return Subspace::full(chart_dim()); }
  virtual ArrowTangent arrow_tangent(const Arrow& a) const = 0;

  // Moves inside a flat arrow chart; empty for kinds without one.
  virtual std::optional<Arrow> arrow_chart_step(const Arrow&, const Vector&) const { return std::nullopt; }
  // Chart coordinates of b in the chart centred at a; empty without a flat chart.
  virtual std::optional<Vector> arrow_chart_coordinates(const Arrow&, const Arrow&) const {
    return std::nullopt;
  }
  // Base points are stored in chart coordinates (true except for weak pullbacks).
  virtual bool flat_base() const { return true; }

  Vector sample_point(Rng& rng) const;
  Arrow sample_arrow(Rng& rng, const Vector& source) const;
  std::optional<Arrow> sample_isotropy(Rng& rng, const Vector& x) const;
  std::optional<bool> same_orbit(const Vector& x, const Vector& y) const;
  bool has_isotropy_sampler() const;

  const GroupoidHooks& hooks() const { return hooks_; }
  // Copy of this groupoid with the non-empty members of `overrides` replacing
  // the current hooks.
  GroupoidPtr with_hooks(const GroupoidHooks& overrides) const;

 protected:
  Groupoid(GroupoidKind kind, std::string name, ToleranceProfile tol, GroupoidHooks hooks);
  Groupoid(const Groupoid&) = default;

  virtual std::shared_ptr<Groupoid> clone() const = 0;
  virtual std::optional<Vector> default_sample_point(Rng&) const { return std::nullopt; }
  virtual std::optional<Arrow> default_sample_arrow(Rng&, const Vector&) const { return std::nullopt; }
  virtual std::optional<Arrow> default_sample_isotropy(Rng&, const Vector&) const {
    return std::nullopt;
  }
  void require_composable(const Vector& source_of_later, const Vector& target_of_earlier) const;

 private:
  GroupoidKind kind_;
  std::string name_;
  ToleranceProfile tol_;
  GroupoidHooks hooks_;
};

// G x X with (g', g x)(g, x) = (g' g, x).
class TranslationGroupoid : public Groupoid {
 public:
  TranslationGroupoid(LieGroupModel group, SmoothActionModel action, ToleranceProfile tol,
                      GroupoidHooks hooks);

  const LieGroupModel& group() const { return group_; }
  const SmoothActionModel& action() const { return action_; }

  int point_dim() const override { return action_.base_dim(); }
  int arrow_chart_dim() const override { return group_.dim() + action_.base_dim(); }
  Vector source(const Arrow& a) const override;
  Vector target(const Arrow& a) const override;
  Arrow compose(const Arrow& later, const Arrow& earlier) const override;
  Arrow inverse(const Arrow& a) const override;
  Arrow unit(const Vector& x) const override;
  double arrow_distance(const Arrow& a, const Arrow& b) const override;
  ArrowTangent arrow_tangent(const Arrow& a) const override;
  std::optional<Arrow> arrow_chart_step(const Arrow& a, const Vector& w) const override;
  std::optional<Vector> arrow_chart_coordinates(const Arrow& a, const Arrow& b) const override;

 protected:
  std::shared_ptr<Groupoid> clone() const override;
  std::optional<Arrow> default_sample_arrow(Rng& rng, const Vector& x) const override;

 private:
  LieGroupModel group_;
  SmoothActionModel action_;
};

// X x G with source = target = x and fiberwise multiplication.
class GroupBundle : public Groupoid {
 public:
  GroupBundle(LieGroupModel group, int base_dim, ToleranceProfile tol, GroupoidHooks hooks);

  const LieGroupModel& group() const { return group_; }

  int point_dim() const override { return base_dim_; }
  int arrow_chart_dim() const override { return group_.dim() + base_dim_; }
  Vector source(const Arrow& a) const override;
  Vector target(const Arrow& a) const override;
  Arrow compose(const Arrow& later, const Arrow& earlier) const override;
  Arrow inverse(const Arrow& a) const override;
  Arrow unit(const Vector& x) const override;
  double arrow_distance(const Arrow& a, const Arrow& b) const override;
  ArrowTangent arrow_tangent(const Arrow& a) const override;
  std::optional<Arrow> arrow_chart_step(const Arrow& a, const Vector& w) const override;
  std::optional<Vector> arrow_chart_coordinates(const Arrow& a, const Arrow& b) const override;

 protected:
  std::shared_ptr<Groupoid> clone() const override;
  std::optional<Arrow> default_sample_arrow(Rng& rng, const Vector& x) const override;
  std::optional<Arrow> default_sample_isotropy(Rng& rng, const Vector& x) const override;

 private:
  LieGroupModel group_;
  int base_dim_;
};

// K = {(theta; z, t) : omega(t) != 0 and omega(t) theta in (scale * 2 pi) Z} u {theta = 0}
// inside the rotation-action groupoid R x (C x R).
class RotationKernel {
 public:
  explicit RotationKernel(FrequencyProfile omega, double scale = 1.0);

  const FrequencyProfile& omega() const { return omega_; }
  double scale() const { return scale_; }

  // scale * 2 pi / |omega(t)|; empty where omega(t) = 0.
  std::optional<double> period(double t) const;
  // Representative of theta in [0, period), snapped to 0 within tolerance of
  // a multiple of the period; theta itself where omega(t) = 0.
  double normalize(double theta, double t, const ToleranceProfile& tol) const;
  bool contains(double theta, double t, const ToleranceProfile& tol) const;

 private:
  FrequencyProfile omega_;
  double scale_;
};

class QuotientGroupoid : public Groupoid {
 public:
  QuotientGroupoid(std::shared_ptr<const TranslationGroupoid> base, RotationKernel kernel,
                   GroupoidHooks hooks);

  const TranslationGroupoid& base() const { return *base_; }
  std::shared_ptr<const TranslationGroupoid> base_ptr() const { return base_; }
  const RotationKernel& kernel() const { return kernel_; }

  // The class of a base arrow.
  Arrow make_class(const Arrow& base_arrow) const;
  // The class of (theta; z, t).
  Arrow make_class(double theta, const Vector& point) const;
  double normalized_parameter(const Arrow& a) const;

  int point_dim() const override { return base_->point_dim(); }
  int arrow_chart_dim() const override { return base_->arrow_chart_dim(); }
  Vector source(const Arrow& a) const override;
  Vector target(const Arrow& a) const override;
  Arrow compose(const Arrow& later, const Arrow& earlier) const override;
  Arrow inverse(const Arrow& a) const override;
  Arrow unit(const Vector& x) const override;
  double arrow_distance(const Arrow& a, const Arrow& b) const override;
  // Chart of the stored representative.
  ArrowTangent arrow_tangent(const Arrow& a) const override;
  std::optional<Arrow> arrow_chart_step(const Arrow& a, const Vector& w) const override;
  std::optional<Vector> arrow_chart_coordinates(const Arrow& a, const Arrow& b) const override;

 protected:
  std::shared_ptr<Groupoid> clone() const override;
  std::optional<Vector> default_sample_point(Rng& rng) const override;
  std::optional<Arrow> default_sample_arrow(Rng& rng, const Vector& x) const override;
  std::optional<Arrow> default_sample_isotropy(Rng& rng, const Vector& x) const override;

 private:
  std::shared_ptr<const TranslationGroupoid> base_;
  RotationKernel kernel_;
};

std::shared_ptr<const TranslationGroupoid> build_translation(LieGroupModel group,
                                                             SmoothActionModel action,
                                                             GroupoidHooks hooks = {},
                                                             ToleranceProfile tol = {});
std::shared_ptr<const GroupBundle> build_group_bundle(LieGroupModel group, int base_dim,
                                                      GroupoidHooks hooks = {},
                                                      ToleranceProfile tol = {});
// Throws ConfigurationError unless the base is a rotation-action groupoid
// with the kernel's frequency.
std::shared_ptr<const QuotientGroupoid> quotient_by_kernel(
    std::shared_ptr<const TranslationGroupoid> base, RotationKernel kernel,
    GroupoidHooks hooks = {});

// Isotropy sampler for a translation groupoid from a stabilizer sampler.
std::function<Arrow(Rng&, const Vector&)> stabilizer_isotropy(
    std::function<Matrix(Rng&, const Vector&, double)> stabilizer, double tol = 1e-9);

// Maximum residuals of the structure laws over sampled composable triples.
struct AxiomReport {
  std::size_t samples = 0;
  double unit_source_target = 0;   // s(1x) = x = t(1x)
  double composition_ends = 0;     // s(a'a) = s(a), t(a'a) = t(a')
  double associativity = 0;
  double unit_laws = 0;            // 1 a = a = a 1
  double inverse_laws = 0;         // a a^-1 = 1, a^-1 a = 1, (a'a)^-1 = a^-1 a'^-1
  double target_of_inverse = 0;    // t(a^-1) = s(a)

  double worst() const;
};

AxiomReport check_groupoid_axioms(const Groupoid& g, std::size_t samples, std::uint64_t seed);

}  // namespace ge
