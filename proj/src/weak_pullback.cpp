#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/pullback.hpp"

#include <algorithm>

namespace ge {

namespace {

std::shared_ptr<const TranslationGroupoid> common_codomain(const HomPtr& psi, const HomPtr& phi) {
  if (!psi || !phi) throw InputError("weak pullback needs two homomorphisms");
  auto sigma = std::dynamic_pointer_cast<const TranslationGroupoid>(psi->codomain());
  if (!sigma) throw CompositionError("weak pullbacks are built over translation groupoids only");
  if (phi->codomain().get() != sigma.get()) {
    throw CompositionError(psi->name() + " and " + phi->name() + " have different codomains");
  }
  return sigma;
}

Matrix block_diagonal(std::initializer_list<Matrix> blocks) {
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Matrix m = Matrix::Zero(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    m.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return m;
}

}  // namespace

WeakPullbackGroupoid::WeakPullbackGroupoid(HomPtr psi, HomPtr phi, GroupoidHooks hooks)
    : Groupoid(GroupoidKind::WeakPullback,
               "(" + psi->domain()->name() + ") x_S (" + phi->domain()->name() + ")",
               psi->codomain()->tolerance(), std::move(hooks)),
      psi_(std::move(psi)), phi_(std::move(phi)), sigma_(common_codomain(psi_, phi_)) {}

std::shared_ptr<Groupoid> WeakPullbackGroupoid::clone() const {
  return std::make_shared<WeakPullbackGroupoid>(*this);
}

int WeakPullbackGroupoid::point_dim() const {
  const int n = sigma_->group().matrix_size();
  return left().point_dim() + n * n + sigma_->point_dim() + right().point_dim();
}

int WeakPullbackGroupoid::chart_dim() const {
  return left().chart_dim() + sigma_->group().dim() + sigma_->point_dim() + right().chart_dim();
}

int WeakPullbackGroupoid::arrow_chart_dim() const {
  return left().arrow_chart_dim() + sigma_->arrow_chart_dim() + right().arrow_chart_dim();
}

Vector WeakPullbackGroupoid::make_point(const Vector& y, const Arrow& k, const Vector& x) const {
  const Vector tk = sigma_->target(k), sk = sigma_->source(k);
  const Vector py = psi_->base_map(y), px = phi_->base_map(x);
  if (!sigma_->same_point(tk, py) || !sigma_->same_point(sk, px)) {
    throw MalformedArrowError(name() + ": bridge does not run from phi(x) to psi(y) (residual " +
                              std::to_string(std::max((tk - py).norm(), (sk - px).norm())) + ")");
  }
  const auto& kk = k.as<ActionArrow>();
  const int n = sigma_->group().matrix_size();
  Vector z(point_dim());
  z << y, Eigen::Map<const Vector>(kk.group.data(), n * n), kk.source, x;
  return z;
}

WeakPullbackGroupoid::PointParts WeakPullbackGroupoid::split(const Vector& z) const {
  if (z.size() != point_dim()) throw InputError(name() + ": base point has the wrong dimension");
  const int py = left().point_dim(), n = sigma_->group().matrix_size(), nb = sigma_->point_dim();
  Matrix g = Eigen::Map<const Matrix>(z.data() + py, n, n);
  Vector b = z.segment(py + n * n, nb);
  return {z.head(py), make_action_arrow(std::move(g), std::move(b)), z.tail(right().point_dim())};
}

Arrow WeakPullbackGroupoid::make_arrow(const Arrow& h, const Arrow& k, const Arrow& g) const {
  // Validates through make_point at the source.
  make_point(left().source(h), k, right().source(g));
  return Arrow{WeakPullbackArrow{share(h), share(k), share(g)}};
}

Vector WeakPullbackGroupoid::source(const Arrow& a) const {
  const auto& w = a.as<WeakPullbackArrow>();
  return make_point(left().source(*w.left), *w.bridge, right().source(*w.right));
}

Vector WeakPullbackGroupoid::target(const Arrow& a) const {
  const auto& w = a.as<WeakPullbackArrow>();
  const Arrow moved = sigma_->compose(psi_->apply(*w.left),
                                      sigma_->compose(*w.bridge, sigma_->inverse(phi_->apply(*w.right))));
  return make_point(left().target(*w.left), moved, right().target(*w.right));
}

Arrow WeakPullbackGroupoid::compose(const Arrow& later, const Arrow& earlier) const {
  const auto& l = later.as<WeakPullbackArrow>();
  const auto& e = earlier.as<WeakPullbackArrow>();
  require_composable(source(later), target(earlier));
  return Arrow{WeakPullbackArrow{share(left().compose(*l.left, *e.left)), e.bridge,
                                 share(right().compose(*l.right, *e.right))}};
}

Arrow WeakPullbackGroupoid::inverse(const Arrow& a) const {
  const auto& w = a.as<WeakPullbackArrow>();
  const PointParts t = split(target(a));
  return Arrow{WeakPullbackArrow{share(left().inverse(*w.left)), share(t.bridge),
                                 share(right().inverse(*w.right))}};
}

Arrow WeakPullbackGroupoid::unit(const Vector& z) const {
  const PointParts p = split(z);
  return Arrow{WeakPullbackArrow{share(left().unit(p.left)), share(p.bridge), share(right().unit(p.right))}};
}

double WeakPullbackGroupoid::arrow_distance(const Arrow& a, const Arrow& b) const {
  const auto& p = a.as<WeakPullbackArrow>();
  const auto& q = b.as<WeakPullbackArrow>();
  return left().arrow_distance(*p.left, *q.left) + sigma_->arrow_distance(*p.bridge, *q.bridge) +
         right().arrow_distance(*p.right, *q.right);
}

Subspace WeakPullbackGroupoid::base_tangent(const Vector& z) const {
  const PointParts p = split(z);
  const Matrix by = left().base_tangent(p.left).basis();
  const Matrix bx = right().base_tangent(p.right).basis();
  const Matrix dpsi = psi_->base_jacobian(p.left) * by;
  const Matrix dphi = phi_->base_jacobian(p.right) * bx;
  const Matrix dtk = sigma_->arrow_tangent(p.bridge).dt;
  const int d = sigma_->group().dim(), nb = sigma_->point_dim();
  const int ty = static_cast<int>(by.cols()), tx = static_cast<int>(bx.cols());

  // Unknowns (c_y, xi, u, c_x): u = Dphi dx and dt_S(k) (xi, u) = Dpsi dy.
  Matrix c = Matrix::Zero(2 * nb, ty + d + nb + tx);
  c.block(0, ty + d, nb, nb) = Matrix::Identity(nb, nb);
  c.block(0, ty + d + nb, nb, tx) = -dphi;
  c.block(nb, 0, nb, ty) = -dpsi;
  c.block(nb, ty, nb, d + nb) = dtk;
  const Matrix null = null_space(c, tolerance());
  const Matrix embed = block_diagonal({by, Matrix::Identity(d + nb, d + nb), bx});
  return Subspace(embed * null, tolerance());
}

ArrowTangent WeakPullbackGroupoid::arrow_tangent(const Arrow& a) const {
  const auto& w = a.as<WeakPullbackArrow>();
  const ArrowTangent th = left().arrow_tangent(*w.left);
  const ArrowTangent tg = right().arrow_tangent(*w.right);
  const Matrix dtk = sigma_->arrow_tangent(*w.bridge).dt;
  const Vector sh = left().source(*w.left), sg = right().source(*w.right);
  const Vector tgt = right().target(*w.right);
  const LieGroupModel& group = sigma_->group();
  const int d = group.dim(), nb = sigma_->point_dim();
  const int mh = static_cast<int>(th.basis.cols()), mg = static_cast<int>(tg.basis.cols());
  const int cy = left().chart_dim(), cx = right().chart_dim();

  // Unknowns (v_h, w_k, v_g): s(k) = phi(s g) and t(k) = psi(s h) to first order.
  Matrix c = Matrix::Zero(2 * nb, mh + d + nb + mg);
  c.block(0, mh + d, nb, nb) = Matrix::Identity(nb, nb);
  c.block(0, mh + d + nb, nb, mg) = -phi_->base_jacobian(sg) * tg.ds;
  c.block(nb, 0, nb, mh) = -psi_->base_jacobian(sh) * th.ds;
  c.block(nb, mh, nb, d + nb) = dtk;
  const Matrix null = null_space(c, tolerance());
  const Eigen::Index m = null.cols();
  const Matrix nh = null.topRows(mh);
  const Matrix nk = null.middleRows(mh, d + nb);
  const Matrix ng = null.bottomRows(mg);

  ArrowTangent t;
  t.basis = block_diagonal({th.basis, Matrix::Identity(d + nb, d + nb), tg.basis}) * null;
  t.ds = Matrix(cy + d + nb + cx, m);
  t.ds << th.ds * nh, nk, tg.ds * ng;

  // Target bridge k' = psi(h) k phi(g)^-1; with P = psi(h), Q = phi(g) and the
  // right-trivialized variations alpha, xi, beta of P, k, Q:
  //   xi' = Ad(Q k^-1) alpha + Ad(Q) xi - Ad(Q) beta.
  const Matrix q = phi_->apply(*w.right).as<ActionArrow>().group;
  const Matrix gk = w.bridge->as<ActionArrow>().group;
  const Matrix alpha = (psi_->arrow_jacobian(*w.left) * th.basis * nh).topRows(d);
  const Matrix beta = (phi_->arrow_jacobian(*w.right) * tg.basis * ng).topRows(d);
  const Matrix ad_q = group.adjoint(q);
  const Matrix xi_t = group.adjoint(q * group.invert(gk)) * alpha + ad_q * nk.topRows(d) - ad_q * beta;

  t.dt = Matrix(cy + d + nb + cx, m);
  t.dt << th.dt * nh, xi_t, phi_->base_jacobian(tgt) * tg.dt * ng, tg.dt * ng;
  return t;
}

std::optional<Vector> WeakPullbackGroupoid::default_sample_point(Rng& rng) const {
  const auto& surj = phi_->witnesses().surjectivity;
  if (!surj) return std::nullopt;
  const Vector y = left().sample_point(rng);
  const SurjectivityWitness w = surj(psi_->base_map(y));
  return make_point(y, sigma_->inverse(w.connector), w.point);
}

std::optional<Arrow> WeakPullbackGroupoid::default_sample_arrow(Rng& rng, const Vector& z) const {
  const PointParts p = split(z);
  const Arrow h = left().sample_arrow(rng, p.left);
  const Arrow g = right().sample_arrow(rng, p.right);
  return make_arrow(h, p.bridge, g);
}

std::optional<Arrow> WeakPullbackGroupoid::default_sample_isotropy(Rng& rng, const Vector& z) const {
  const auto& lift = phi_->witnesses().lift;
  if (!lift) return std::nullopt;
  const PointParts p = split(z);
  const auto h = left().sample_isotropy(rng, p.left);
  if (!h) return std::nullopt;
  // phi(g) must equal k^-1 psi(h) k.
  const Arrow conj = sigma_->compose(sigma_->inverse(p.bridge), sigma_->compose(psi_->apply(*h), p.bridge));
  const Arrow g = lift(p.right, p.right, conj);
  return make_arrow(*h, p.bridge, g);
}

namespace {

class WeakPullbackProjection final : public GroupoidHom {
 public:
  WeakPullbackProjection(std::shared_ptr<const WeakPullbackGroupoid> z, bool left_side)
      : GroupoidHom(HomKind::WeakPullbackProjection, left_side ? "pr_left" : "pr_right", z,
                    left_side ? z->left_map()->domain() : z->right_map()->domain(), {}),
        z_(std::move(z)), left_(left_side) {
    set_witnesses(left_ ? left_witnesses() : right_witnesses());
  }

  Arrow apply(const Arrow& a) const override {
    const auto& w = a.as<WeakPullbackArrow>();
    return left_ ? *w.left : *w.right;
  }
  Vector base_map(const Vector& z) const override {
    const auto p = z_->split(z);
    return left_ ? p.left : p.right;
  }
  Matrix base_jacobian(const Vector&) const override {
    const int cy = z_->left().chart_dim(), cx = z_->right().chart_dim();
    Matrix j = Matrix::Zero(left_ ? cy : cx, z_->chart_dim());
    if (left_) {
      j.leftCols(cy) = Matrix::Identity(cy, cy);
    } else {
      j.rightCols(cx) = Matrix::Identity(cx, cx);
    }
    return j;
  }
  Matrix arrow_jacobian(const Arrow&) const override {
    const int ay = z_->left().arrow_chart_dim(), ax = z_->right().arrow_chart_dim();
    Matrix j = Matrix::Zero(left_ ? ay : ax, z_->arrow_chart_dim());
    if (left_) {
      j.leftCols(ay) = Matrix::Identity(ay, ay);
    } else {
      j.rightCols(ax) = Matrix::Identity(ax, ax);
    }
    return j;
  }

 protected:
  std::shared_ptr<GroupoidHom> clone() const override {
    return std::make_shared<WeakPullbackProjection>(*this);
  }

 private:
  HomWitnesses left_witnesses() const {
    HomWitnesses w;
    const auto z = z_;
    const HomPtr psi = z->left_map(), phi = z->right_map();
    if (phi->witnesses().lift) {
      w.lift = [z, psi, phi](const Vector& a, const Vector& b, const Arrow& h) {
        const auto pa = z->split(a), pb = z->split(b);
        const auto& s = z->middle();
        // phi(g) = k_b^-1 psi(h) k_a
        const Arrow need = s.compose(s.inverse(pb.bridge), s.compose(psi->apply(h), pa.bridge));
        const Arrow g = phi->witnesses().lift(pa.right, pb.right, need);
        return z->make_arrow(h, pa.bridge, g);
      };
    }
    if (phi->witnesses().surjectivity) {
      w.surjectivity = [z, psi, phi](const Vector& y) {
        const SurjectivityWitness m = phi->witnesses().surjectivity(psi->base_map(y));
        const Vector point = z->make_point(y, z->middle().inverse(m.connector), m.point);
        return SurjectivityWitness{point, z->left().unit(y)};
      };
    }
    return w;
  }

  HomWitnesses right_witnesses() const {
    HomWitnesses w;
    const auto z = z_;
    const HomPtr psi = z->left_map(), phi = z->right_map();
    if (psi->witnesses().lift) {
      w.lift = [z, psi, phi](const Vector& a, const Vector& b, const Arrow& g) {
        const auto pa = z->split(a), pb = z->split(b);
        const auto& s = z->middle();
        // psi(h) = k_b phi(g) k_a^-1
        const Arrow need = s.compose(pb.bridge, s.compose(phi->apply(g), s.inverse(pa.bridge)));
        const Arrow h = psi->witnesses().lift(pa.left, pb.left, need);
        return z->make_arrow(h, pa.bridge, g);
      };
    }
    if (psi->witnesses().surjectivity) {
      w.surjectivity = [z, psi, phi](const Vector& x) {
        const SurjectivityWitness m = psi->witnesses().surjectivity(phi->base_map(x));
        const Vector point = z->make_point(m.point, m.connector, x);
        return SurjectivityWitness{point, z->right().unit(x)};
      };
    }
    return w;
  }

  std::shared_ptr<const WeakPullbackGroupoid> z_;
  bool left_;
};

class PairingHom final : public GroupoidHom {
 public:
  PairingHom(std::shared_ptr<const WeakPullbackGroupoid> z, HomPtr u, HomPtr v, std::string name)
      : GroupoidHom(HomKind::Pairing, std::move(name), u->domain(), z, {}), z_(std::move(z)),
        u_(std::move(u)), v_(std::move(v)) {
    set_witnesses(derive());
  }

  Arrow apply(const Arrow& a) const override {
    const Arrow h = u_->apply(a), g = v_->apply(a);
    const Arrow k = z_->middle().unit(z_->right_map()->base_map(z_->right().source(g)));
    return z_->make_arrow(h, k, g);
  }
  Vector base_map(const Vector& x) const override {
    const Vector y = u_->base_map(x), w = v_->base_map(x);
    return z_->make_point(y, z_->middle().unit(z_->right_map()->base_map(w)), w);
  }
  Matrix base_jacobian(const Vector& x) const override {
    const Matrix du = u_->base_jacobian(x), dv = v_->base_jacobian(x);
    const Matrix dphi = z_->right_map()->base_jacobian(v_->base_map(x));
    const int d = z_->middle().group().dim();
    Matrix j(du.rows() + d + dphi.rows() + dv.rows(), du.cols());
    j << du, Matrix::Zero(d, du.cols()), dphi * dv, dv;
    return j;
  }
  Matrix arrow_jacobian(const Arrow& a) const override {
    const Matrix ju = u_->arrow_jacobian(a), jv = v_->arrow_jacobian(a);
    const ArrowTangent ta = domain()->arrow_tangent(a);
    const Vector sa = domain()->source(a);
    const Matrix dbase = z_->right_map()->base_jacobian(v_->base_map(sa)) * v_->base_jacobian(sa) *
                         ta.ds * ta.basis.transpose();
    const int d = z_->middle().group().dim();
    Matrix j(ju.rows() + d + dbase.rows() + jv.rows(), ju.cols());
    j << ju, Matrix::Zero(d, ju.cols()), dbase, jv;
    return j;
  }

 protected:
  std::shared_ptr<GroupoidHom> clone() const override { return std::make_shared<PairingHom>(*this); }

 private:
  HomWitnesses derive() const {
    HomWitnesses w;
    const auto z = z_;
    const HomPtr u = u_, v = v_;
    const HomPtr psi = z->left_map(), phi = z->right_map();
    if (v->witnesses().lift) {
      w.lift = [v](const Vector& a, const Vector& b, const Arrow& h) {
        return v->witnesses().lift(a, b, *h.as<WeakPullbackArrow>().right);
      };
    }
    if (v->witnesses().surjectivity && psi->witnesses().lift) {
      w.surjectivity = [z, u, v, psi, phi](const Vector& point) {
        const auto p = z->split(point);
        const SurjectivityWitness c = v->witnesses().surjectivity(p.right);
        const auto& s = z->middle();
        // psi(h) = phi(c) k^-1 makes the target bridge a unit.
        const Arrow need = s.compose(phi->apply(c.connector), s.inverse(p.bridge));
        const Arrow h = psi->witnesses().lift(p.left, u->base_map(c.point), need);
        return SurjectivityWitness{c.point, z->make_arrow(h, p.bridge, c.connector)};
      };
    }
    return w;
  }

  std::shared_ptr<const WeakPullbackGroupoid> z_;
  HomPtr u_;
  HomPtr v_;
};

}  // namespace

WeakPullbackConstruction build_weak_pullback(HomPtr psi, HomPtr phi, GroupoidHooks hooks) {
  auto z = std::make_shared<const WeakPullbackGroupoid>(std::move(psi), std::move(phi), std::move(hooks));
  return {z, std::make_shared<const WeakPullbackProjection>(z, true),
          std::make_shared<const WeakPullbackProjection>(z, false)};
}

HomPtr pairing_hom(std::shared_ptr<const WeakPullbackGroupoid> z, HomPtr u, HomPtr v, std::string name) {
  if (u->domain()->name() != v->domain()->name()) throw CompositionError("pairing legs have different domains");
  if (u->codomain()->name() != z->left().name() || v->codomain()->name() != z->right().name()) {
    throw CompositionError("pairing legs do not land in the weak pullback factors");
  }
  if (name.empty()) name = "<" + u->name() + ", " + v->name() + ">";
  return std::make_shared<const PairingHom>(std::move(z), std::move(u), std::move(v), std::move(name));
}

}  // namespace ge
