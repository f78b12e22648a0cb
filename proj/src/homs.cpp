#include "groupoid_effect/hom.hpp"

#include "groupoid_effect/errors.hpp"

namespace ge {

std::string to_string(HomKind kind) {
  switch (kind) {
    case HomKind::Translation: return "translation";
    case HomKind::QuotientProjection: return "quotient_projection";
    case HomKind::PullbackProjection: return "pullback_projection";
    case HomKind::WeakPullbackProjection: return "weak_pullback_projection";
    case HomKind::Composite: return "composite";
    case HomKind::Custom: return "custom";
    case HomKind::Pairing: return "pairing";
  }
  return "unknown";
}

GroupoidHom::GroupoidHom(HomKind kind, std::string name, GroupoidPtr domain, GroupoidPtr codomain,
                         HomWitnesses witnesses)
    : kind_(kind), name_(std::move(name)), domain_(std::move(domain)), codomain_(std::move(codomain)),
      witnesses_(std::move(witnesses)) {
  if (!domain_ || !codomain_) throw InputError("homomorphism needs a domain and a codomain");
}

HomPtr GroupoidHom::with_witnesses(const HomWitnesses& overrides) const {
  auto copy = clone();
  if (overrides.lift) copy->witnesses_.lift = overrides.lift;
  if (overrides.surjectivity) copy->witnesses_.surjectivity = overrides.surjectivity;
  return copy;
}

namespace {

bool action_kind(const Groupoid& g) {
  return g.kind() == GroupoidKind::Translation || g.kind() == GroupoidKind::GroupBundle;
}

const LieGroupModel& group_of(const Groupoid& g) {
  if (const auto* t = dynamic_cast<const TranslationGroupoid*>(&g)) return t->group();
  if (const auto* b = dynamic_cast<const GroupBundle*>(&g)) return b->group();
  throw InputError(g.name() + " is not a translation groupoid or group bundle");
}

Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

class TranslationHom final : public GroupoidHom {
 public:
  TranslationHom(GroupoidPtr domain, GroupoidPtr codomain, GroupMap theta, BaseMap f,
                 HomWitnesses w, std::string name)
      : GroupoidHom(HomKind::Translation, std::move(name), std::move(domain), std::move(codomain),
                    std::move(w)),
        theta_(std::move(theta)), f_(std::move(f)) {}

  Arrow apply(const Arrow& a) const override {
    const auto& p = a.as<ActionArrow>();
    return make_action_arrow(theta_.map(p.group), f_.map(p.source));
  }
  Vector base_map(const Vector& x) const override { return f_.map(x); }
  Matrix base_jacobian(const Vector& x) const override { return f_.jacobian(x); }
  Matrix arrow_jacobian(const Arrow& a) const override {
    return block_diagonal(theta_.differential, f_.jacobian(a.as<ActionArrow>().source));
  }

 protected:
  std::shared_ptr<GroupoidHom> clone() const override { return std::make_shared<TranslationHom>(*this); }

 private:
  GroupMap theta_;
  BaseMap f_;
};

class QuotientProjectionHom final : public GroupoidHom {
 public:
  explicit QuotientProjectionHom(std::shared_ptr<const QuotientGroupoid> q)
      : GroupoidHom(HomKind::QuotientProjection, "quotient projection", q->base_ptr(), q, {}),
        q_(std::move(q)) {
    HomWitnesses w;
    auto quotient = q_;
    w.lift = [quotient](const Vector&, const Vector&, const Arrow& h) {
      return Arrow{h.as<QuotientArrow>().normalized};
    };
    w.surjectivity = [quotient](const Vector& y) {
      return SurjectivityWitness{y, quotient->unit(y)};
    };
    set_witnesses(std::move(w));
  }

  Arrow apply(const Arrow& a) const override { return q_->make_class(a); }
  Vector base_map(const Vector& x) const override { return x; }
  Matrix base_jacobian(const Vector& x) const override {
    return Matrix::Identity(x.size(), x.size());
  }
  Matrix arrow_jacobian(const Arrow&) const override {
    const int m = q_->arrow_chart_dim();
    return Matrix::Identity(m, m);
  }

 protected:
  std::shared_ptr<GroupoidHom> clone() const override {
    return std::make_shared<QuotientProjectionHom>(*this);
  }

 private:
  std::shared_ptr<const QuotientGroupoid> q_;
};

class CustomHom final : public GroupoidHom {
 public:
  CustomHom(GroupoidPtr domain, GroupoidPtr codomain, CustomHomSpec spec)
      : GroupoidHom(HomKind::Custom, spec.name, std::move(domain), std::move(codomain), spec.witnesses),
        spec_(std::move(spec)) {}

  Arrow apply(const Arrow& a) const override { return spec_.apply(a); }
  Vector base_map(const Vector& x) const override { return spec_.base.map(x); }
  Matrix base_jacobian(const Vector& x) const override { return spec_.base.jacobian(x); }
  Matrix arrow_jacobian(const Arrow& a) const override {
    if (!spec_.arrow_jacobian) throw PreconditionError(name() + " has no arrow-level differential");
    return spec_.arrow_jacobian(a);
  }

 protected:
  std::shared_ptr<GroupoidHom> clone() const override { return std::make_shared<CustomHom>(*this); }

 private:
  CustomHomSpec spec_;
};

class CompositeHom final : public GroupoidHom {
 public:
  CompositeHom(GroupoidPtr domain, GroupoidPtr codomain, std::vector<HomPtr> chain, std::string name)
      : GroupoidHom(HomKind::Composite, std::move(name), std::move(domain), std::move(codomain), {}),
        chain_(std::move(chain)) {
    set_witnesses(derive());
  }

  Arrow apply(const Arrow& a) const override {
    Arrow cur = a;
    for (const auto& h : chain_) cur = h->apply(cur);
    return cur;
  }
  Vector base_map(const Vector& x) const override {
    Vector cur = x;
    for (const auto& h : chain_) cur = h->base_map(cur);
    return cur;
  }
  Matrix base_jacobian(const Vector& x) const override {
    Matrix j = Matrix::Identity(domain()->chart_dim(), domain()->chart_dim());
    Vector cur = x;
    for (const auto& h : chain_) {
      j = h->base_jacobian(cur) * j;
      cur = h->base_map(cur);
    }
    return j;
  }
  Matrix arrow_jacobian(const Arrow& a) const override {
    Matrix j = Matrix::Identity(domain()->arrow_chart_dim(), domain()->arrow_chart_dim());
    Arrow cur = a;
    for (const auto& h : chain_) {
      j = h->arrow_jacobian(cur) * j;
      cur = h->apply(cur);
    }
    return j;
  }

 protected:
  std::shared_ptr<GroupoidHom> clone() const override { return std::make_shared<CompositeHom>(*this); }

 private:
  HomWitnesses derive() const {
    HomWitnesses w;
    const auto chain = chain_;
    const GroupoidPtr dom = domain();
    const GroupoidPtr cod = codomain();
    if (chain.empty()) {
      w.lift = [](const Vector&, const Vector&, const Arrow& h) { return h; };
      w.surjectivity = [dom](const Vector& y) { return SurjectivityWitness{y, dom->unit(y)}; };
      return w;
    }
    bool lifts = true, surj = true;
    for (const auto& h : chain) {
      lifts = lifts && static_cast<bool>(h->witnesses().lift);
      surj = surj && static_cast<bool>(h->witnesses().surjectivity);
    }
    if (lifts) {
      w.lift = [chain](const Vector& x, const Vector& x2, const Arrow& h) {
        std::vector<Vector> from{x}, to{x2};
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
          from.push_back(chain[i]->base_map(from.back()));
          to.push_back(chain[i]->base_map(to.back()));
        }
        Arrow cur = h;
        for (std::size_t i = chain.size(); i-- > 0;) cur = chain[i]->witnesses().lift(from[i], to[i], cur);
        return cur;
      };
    }
    if (surj) {
      w.surjectivity = [chain, cod](const Vector& y) {
        const std::size_t n = chain.size();
        SurjectivityWitness last = chain[n - 1]->witnesses().surjectivity(y);
        Vector point = last.point;
        Arrow connector = last.connector;
        for (std::size_t i = n - 1; i-- > 0;) {
          SurjectivityWitness step = chain[i]->witnesses().surjectivity(point);
          Arrow pushed = step.connector;
          for (std::size_t j = i + 1; j < n; ++j) pushed = chain[j]->apply(pushed);
          connector = cod->compose(pushed, connector);
          point = step.point;
        }
        return SurjectivityWitness{point, connector};
      };
    }
    return w;
  }

  std::vector<HomPtr> chain_;
};

}  // namespace

HomPtr translation_hom(GroupoidPtr domain, GroupoidPtr codomain, GroupMap theta, BaseMap f,
                       HomWitnesses witnesses, std::string name) {
  if (!action_kind(*domain) || !action_kind(*codomain)) {
    throw InputError("translation homs run between translation groupoids or group bundles");
  }
  const auto& g0 = group_of(*domain);
  const auto& g1 = group_of(*codomain);
  if (theta.differential.rows() != g1.dim() || theta.differential.cols() != g0.dim()) {
    throw InputError("group map differential has the wrong shape");
  }
  if (!theta.map || !f.map || !f.jacobian) throw InputError("translation hom needs theta, f and Df");
  if (name.empty()) name = "theta x f: " + domain->name() + " -> " + codomain->name();
  return std::make_shared<const TranslationHom>(std::move(domain), std::move(codomain), std::move(theta),
                                                std::move(f), std::move(witnesses), std::move(name));
}

HomPtr quotient_projection(std::shared_ptr<const QuotientGroupoid> quotient) {
  return std::make_shared<const QuotientProjectionHom>(std::move(quotient));
}

HomPtr custom_hom(GroupoidPtr domain, GroupoidPtr codomain, CustomHomSpec spec) {
  if (!spec.apply || !spec.base.map || !spec.base.jacobian) {
    throw InputError("custom hom needs apply, base map and base Jacobian");
  }
  if (spec.name.empty()) spec.name = "custom: " + domain->name() + " -> " + codomain->name();
  return std::make_shared<const CustomHom>(std::move(domain), std::move(codomain), std::move(spec));
}

HomPtr composite(std::vector<HomPtr> chain, std::string name) {
  if (chain.empty()) throw InputError("composite of nothing; use identity_hom");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const auto& cod = *chain[i]->codomain();
    const auto& dom = *chain[i + 1]->domain();
    if (cod.name() != dom.name() || cod.point_dim() != dom.point_dim()) {
      throw CompositionError("cannot compose " + chain[i]->name() + " with " + chain[i + 1]->name());
    }
  }
  if (name.empty()) {
    for (std::size_t i = chain.size(); i-- > 0;) name += (name.empty() ? "" : " o ") + chain[i]->name();
  }
  GroupoidPtr dom = chain.front()->domain();
  GroupoidPtr cod = chain.back()->codomain();
  return std::make_shared<const CompositeHom>(std::move(dom), std::move(cod), std::move(chain), std::move(name));
}

HomPtr identity_hom(GroupoidPtr g) {
  GroupoidPtr cod = g;
  return std::make_shared<const CompositeHom>(std::move(g), std::move(cod), std::vector<HomPtr>{},
                                              "identity");
}

}  // namespace ge
