#include "groupoid_effect/pullback.hpp"

#include "groupoid_effect/errors.hpp"

#include <algorithm>

namespace ge {

PullbackGroupoid::PullbackGroupoid(BaseMap f, int domain_dim, GroupoidPtr pulled_back, GroupoidHooks hooks)
    : Groupoid(GroupoidKind::Pullback, "f*(" + pulled_back->name() + ")", pulled_back->tolerance(),
               std::move(hooks)),
      f_(std::move(f)), n_(domain_dim), delta_(std::move(pulled_back)) {
  if (n_ < 1) throw InputError("pullback domain dimension must be positive");
  if (!f_.map || !f_.jacobian) throw InputError("pullback needs f and its Jacobian");
}

std::shared_ptr<Groupoid> PullbackGroupoid::clone() const {
  return std::make_shared<PullbackGroupoid>(*this);
}

Arrow PullbackGroupoid::make_arrow(const Vector& target_point, const Arrow& middle,
                                   const Vector& source_point) const {
  if (target_point.size() != n_ || source_point.size() != n_) {
    throw InputError(name() + ": base point has the wrong dimension");
  }
  const Vector ft = f_.map(target_point), fs = f_.map(source_point);
  const Vector th = delta_->target(middle), sh = delta_->source(middle);
  if (!delta_->same_point(ft, th) || !delta_->same_point(fs, sh)) {
    throw MalformedArrowError(name() + ": f(x') != t(h) or f(x) != s(h) (residual " +
                              std::to_string(std::max(delta_->point_distance(ft, th),
                                                      delta_->point_distance(fs, sh))) + ")");
  }
  return Arrow{PullbackArrow{target_point, share(middle), source_point}};
}

Vector PullbackGroupoid::source(const Arrow& a) const { return a.as<PullbackArrow>().source_point; }
Vector PullbackGroupoid::target(const Arrow& a) const { return a.as<PullbackArrow>().target_point; }

Arrow PullbackGroupoid::compose(const Arrow& later, const Arrow& earlier) const {
  const auto& l = later.as<PullbackArrow>();
  const auto& e = earlier.as<PullbackArrow>();
  require_composable(l.source_point, e.target_point);
  return Arrow{PullbackArrow{l.target_point, share(delta_->compose(*l.middle, *e.middle)), e.source_point}};
}

Arrow PullbackGroupoid::inverse(const Arrow& a) const {
  const auto& p = a.as<PullbackArrow>();
  return Arrow{PullbackArrow{p.source_point, share(delta_->inverse(*p.middle)), p.target_point}};
}

Arrow PullbackGroupoid::unit(const Vector& x) const {
  if (x.size() != n_) throw InputError(name() + ": base point has the wrong dimension");
  return Arrow{PullbackArrow{x, share(delta_->unit(f_.map(x))), x}};
}

double PullbackGroupoid::arrow_distance(const Arrow& a, const Arrow& b) const {
  const auto& p = a.as<PullbackArrow>();
  const auto& q = b.as<PullbackArrow>();
  return (p.target_point - q.target_point).norm() + delta_->arrow_distance(*p.middle, *q.middle) +
         (p.source_point - q.source_point).norm();
}

ArrowTangent PullbackGroupoid::arrow_tangent(const Arrow& a) const {
  const auto& p = a.as<PullbackArrow>();
  const ArrowTangent th = delta_->arrow_tangent(*p.middle);
  const Matrix df_t = f_.jacobian(p.target_point);
  const Matrix df_s = f_.jacobian(p.source_point);
  const int m = static_cast<int>(th.basis.cols());
  const int r = static_cast<int>(df_t.rows());
  // Unknowns (u', v, u): Df(x') u' = dt_h v and Df(x) u = ds_h v.
  Matrix c = Matrix::Zero(2 * r, 2 * n_ + m);
  c.block(0, 0, r, n_) = df_t;
  c.block(0, n_, r, m) = -th.dt;
  c.block(r, n_, r, m) = -th.ds;
  c.block(r, n_ + m, r, n_) = df_s;
  const Matrix null = null_space(c, tolerance());

  const int ac = delta_->arrow_chart_dim();
  Matrix embed = Matrix::Zero(2 * n_ + ac, 2 * n_ + m);
  embed.topLeftCorner(n_, n_) = Matrix::Identity(n_, n_);
  embed.block(n_, n_, ac, m) = th.basis;
  embed.bottomRightCorner(n_, n_) = Matrix::Identity(n_, n_);

  ArrowTangent t;
  t.basis = embed * null;
  t.dt = null.topRows(n_);
  t.ds = null.bottomRows(n_);
  return t;
}

std::optional<Arrow> PullbackGroupoid::default_sample_arrow(Rng& rng, const Vector& x) const {
  return default_sample_isotropy(rng, x);
}

std::optional<Arrow> PullbackGroupoid::default_sample_isotropy(Rng& rng, const Vector& x) const {
  const auto h = delta_->sample_isotropy(rng, f_.map(x));
  if (!h) return std::nullopt;
  return Arrow{PullbackArrow{x, share(*h), x}};
}

namespace {

class PullbackProjection final : public GroupoidHom {
 public:
  explicit PullbackProjection(std::shared_ptr<const PullbackGroupoid> p)
      : GroupoidHom(HomKind::PullbackProjection, "pullback projection", p, p->pulled_back(), {}),
        p_(std::move(p)) {
    HomWitnesses w;
    auto pull = p_;
    w.lift = [pull](const Vector& x, const Vector& x2, const Arrow& h) { return pull->make_arrow(x2, h, x); };
    set_witnesses(std::move(w));
  }

  Arrow apply(const Arrow& a) const override { return *a.as<PullbackArrow>().middle; }
  Vector base_map(const Vector& x) const override { return p_->base_map().map(x); }
  Matrix base_jacobian(const Vector& x) const override { return p_->base_map().jacobian(x); }
  Matrix arrow_jacobian(const Arrow&) const override {
    const int n = p_->point_dim(), ac = p_->pulled_back()->arrow_chart_dim();
    Matrix j = Matrix::Zero(ac, 2 * n + ac);
    j.block(0, n, ac, ac) = Matrix::Identity(ac, ac);
    return j;
  }

 protected:
  std::shared_ptr<GroupoidHom> clone() const override { return std::make_shared<PullbackProjection>(*this); }

 private:
  std::shared_ptr<const PullbackGroupoid> p_;
};

}  // namespace

PullbackConstruction build_pullback(BaseMap f, int domain_dim, GroupoidPtr delta, GroupoidHooks hooks) {
  auto g = std::make_shared<const PullbackGroupoid>(std::move(f), domain_dim, std::move(delta),
                                                    std::move(hooks));
  return {g, std::make_shared<const PullbackProjection>(g)};
}

}  // namespace ge
