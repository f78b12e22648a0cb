#pragma once

// Pullback groupoids f*D and weak pullbacks D x_S G, with their projections.

#include "groupoid_effect/hom.hpp"

namespace ge {

// Arrows (x', h, x) with h: f(x) -> f(x') in the pulled-back groupoid.
class PullbackGroupoid : public Groupoid {
 public:
  PullbackGroupoid(BaseMap f, int domain_dim, GroupoidPtr pulled_back, GroupoidHooks hooks);

  const GroupoidPtr& pulled_back() const { return delta_; }
  const BaseMap& base_map() const { return f_; }

  // Validates f(x') = t(h), f(x) = s(h); throws MalformedArrowError.
  Arrow make_arrow(const Vector& target_point, const Arrow& middle, const Vector& source_point) const;

  int point_dim() const override { return n_; }
  int arrow_chart_dim() const override { return 2 * n_ + delta_->arrow_chart_dim(); }
  Vector source(const Arrow& a) const override;
  Vector target(const Arrow& a) const override;
  Arrow compose(const Arrow& later, const Arrow& earlier) const override;
  Arrow inverse(const Arrow& a) const override;
  Arrow unit(const Vector& x) const override;
  double arrow_distance(const Arrow& a, const Arrow& b) const override;
  ArrowTangent arrow_tangent(const Arrow& a) const override;

 protected:
  std::shared_ptr<Groupoid> clone() const override;
  std::optional<Arrow> default_sample_arrow(Rng& rng, const Vector& x) const override;
  std::optional<Arrow> default_sample_isotropy(Rng& rng, const Vector& x) const override;

 private:
  BaseMap f_;
  int n_;
  GroupoidPtr delta_;
};

struct PullbackConstruction {
  std::shared_ptr<const PullbackGroupoid> groupoid;
  HomPtr projection;  // (x', h, x) -> h, with the canonical lift witness
};

// `hooks` should at least provide a point sampler for the domain of f.
PullbackConstruction build_pullback(BaseMap f, int domain_dim, GroupoidPtr delta,
                                    GroupoidHooks hooks = {});

// Z = Y x_{psi, t} S x_{s, phi} X for psi: D -> S and phi: G -> S, where S
// must be a translation groupoid. Base points (y, k, x) are stored flattened
// as [y, vec(group of k), s(k), x]; base tangents use the chart
// (dy, xi_k, u_k, dx) and are cut out by the fibered-product constraints.
class WeakPullbackGroupoid : public Groupoid {
 public:
  WeakPullbackGroupoid(HomPtr psi, HomPtr phi, GroupoidHooks hooks);

  const HomPtr& left_map() const { return psi_; }
  const HomPtr& right_map() const { return phi_; }
  const Groupoid& left() const { return *psi_->domain(); }
  const Groupoid& right() const { return *phi_->domain(); }
  const TranslationGroupoid& middle() const { return *sigma_; }

  struct PointParts {
    Vector left;
    Arrow bridge;
    Vector right;
  };
  // Validates t(k) = psi(y), s(k) = phi(x).
  Vector make_point(const Vector& y, const Arrow& k, const Vector& x) const;
  PointParts split(const Vector& z) const;
  // Validates the fibered-product conditions; throws MalformedArrowError.
  Arrow make_arrow(const Arrow& h, const Arrow& k, const Arrow& g) const;

  int point_dim() const override;
  int chart_dim() const override;
  int arrow_chart_dim() const override;
  bool flat_base() const override { return false; }
  Vector source(const Arrow& a) const override;
  Vector target(const Arrow& a) const override;
  Arrow compose(const Arrow& later, const Arrow& earlier) const override;
  Arrow inverse(const Arrow& a) const override;
  Arrow unit(const Vector& z) const override;
  double arrow_distance(const Arrow& a, const Arrow& b) const override;
  Subspace base_tangent(const Vector& z) const override;
  ArrowTangent arrow_tangent(const Arrow& a) const override;

 protected:
  std::shared_ptr<Groupoid> clone() const override;
  std::optional<Vector> default_sample_point(Rng& rng) const override;
  std::optional<Arrow> default_sample_arrow(Rng& rng, const Vector& z) const override;
  std::optional<Arrow> default_sample_isotropy(Rng& rng, const Vector& z) const override;

 private:
  HomPtr psi_;
  HomPtr phi_;
  std::shared_ptr<const TranslationGroupoid> sigma_;
};

struct WeakPullbackConstruction {
  std::shared_ptr<const WeakPullbackGroupoid> groupoid;
  HomPtr left_projection;   // (h, k, g) -> h
  HomPtr right_projection;  // (h, k, g) -> g
};

// Throws CompositionError unless psi and phi share a translation codomain.
WeakPullbackConstruction build_weak_pullback(HomPtr psi, HomPtr phi, GroupoidHooks hooks = {});

// a -> (u(a), 1, v(a)) into a weak pullback, for u, v with psi u = phi v.
HomPtr pairing_hom(std::shared_ptr<const WeakPullbackGroupoid> z, HomPtr u, HomPtr v,
                   std::string name = "");

}  // namespace ge
