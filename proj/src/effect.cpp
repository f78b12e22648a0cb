#include "groupoid_effect/effect.hpp"

#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/homs.hpp"

#include <algorithm>
#include <limits>

namespace ge {

Subspace longitudinal_space(const Groupoid& g, const Vector& x, const ToleranceProfile& tol) {
  const ArrowTangent t = g.arrow_tangent(g.unit(x));
  const Matrix fiber = null_space(t.ds, tol);
  if (fiber.cols() == 0) return Subspace::zero(g.chart_dim());
  return column_space(t.dt * fiber, tol, tol.map_abs_tol);
}

TransversalData transversal_space(const Groupoid& g, const Vector& x, const ToleranceProfile& tol) {
  Subspace l = longitudinal_space(g, x, tol);
  QuotientSpace q(g.base_tangent(x), l, tol);
  return TransversalData{x, std::move(l), std::move(q)};
}

QuotientLinearMap arrow_quotient_map(const Groupoid& g, const Arrow& a, const QuotientSpace& src,
                                     const QuotientSpace& dst, const ToleranceProfile& tol) {
  const ArrowTangent t = g.arrow_tangent(a);
  const Matrix section = t.dt * pseudo_inverse(t.ds, tol);
  try {
    return induced_quotient_map(section, src, dst, tol);
  } catch (const NotWellDefinedError& e) {
    throw InternalConsistencyError(g.name() + ": arrow does not preserve longitudinals: " + e.what());
  }
}

QuotientLinearMap arrow_quotient_map(const Groupoid& g, const Arrow& a, const ToleranceProfile& tol) {
  const QuotientSpace src = transversal_space(g, g.source(a), tol).quotient;
  const QuotientSpace dst = transversal_space(g, g.target(a), tol).quotient;
  return arrow_quotient_map(g, a, src, dst, tol);
}

Effect effect(const Groupoid& g, const Arrow& a, const QuotientSpace& quotient, const ToleranceProfile& tol) {
  if (!g.is_isotropic(a)) {
    throw PreconditionError(g.name() + ": effect needs an isotropic arrow");
  }
  return Effect{a, arrow_quotient_map(g, a, quotient, quotient, tol)};
}

Effect effect(const Groupoid& g, const Arrow& a, const ToleranceProfile& tol) {
  if (!g.is_isotropic(a)) {
    throw PreconditionError(g.name() + ": effect needs an isotropic arrow");
  }
  return effect(g, a, transversal_space(g, g.source(a), tol).quotient, tol);
}

namespace {

double identity_deviation(const Matrix& m) {
  return (m - Matrix::Identity(m.rows(), m.cols())).norm();
}

}  // namespace

IneffectivityResult is_ineffective(const Groupoid& g, const Arrow& a, const ToleranceProfile& tol) {
  const double dev = identity_deviation(effect(g, a, tol).map.matrix);
  return {dev <= tol.map_abs_tol, dev};
}

IsotropyPartition ineffective_subgroup_sample(const Groupoid& g, const Vector& x,
                                              const std::vector<Arrow>& samples,
                                              const ToleranceProfile& tol) {
  const QuotientSpace q = transversal_space(g, x, tol).quotient;
  IsotropyPartition out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!g.same_point(g.source(samples[i]), x)) {
      throw PreconditionError(g.name() + ": isotropy sample is not based at the given point");
    }
    const double dev = identity_deviation(effect(g, samples[i], q, tol).map.matrix);
    out.deviations.push_back(dev);
    (dev <= tol.map_abs_tol ? out.ineffective : out.effective).push_back(i);
  }
  for (std::size_t i : out.ineffective) {
    for (std::size_t j : out.ineffective) {
      const Arrow prod = g.compose(samples[i], samples[j]);
      out.closure_deviation =
          std::max(out.closure_deviation, identity_deviation(effect(g, prod, q, tol).map.matrix));
      const Arrow inv = g.inverse(samples[i]);
      out.closure_deviation =
          std::max(out.closure_deviation, identity_deviation(effect(g, inv, q, tol).map.matrix));
    }
  }
  out.closed = out.closure_deviation <= tol.map_abs_tol;
  return out;
}

int EffectiveIsotropyModel::find(const Matrix& m, double tol) const {
  for (std::size_t i = 0; i < effects.size(); ++i) {
    const Matrix& e = effects[i].effect;
    if (e.rows() == m.rows() && e.cols() == m.cols() && (e - m).norm() <= tol) return static_cast<int>(i);
  }
  return -1;
}

EffectiveIsotropyModel effective_infinitesimal_model(const Groupoid& g, const Vector& x,
                                                     const std::vector<Arrow>& samples,
                                                     const ToleranceProfile& tol) {
  EffectiveIsotropyModel model;
  model.point = x;
  model.quotient = transversal_space(g, x, tol).quotient;
  const int d = model.quotient.dim();
  model.effects.push_back({std::nullopt, Matrix::Identity(d, d)});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Matrix m = effect(g, samples[i], model.quotient, tol).map.matrix;
    if (model.find(m, tol.map_abs_tol) < 0) model.effects.push_back({i, m});
  }
  for (const auto& a : model.effects) {
    for (const auto& b : model.effects) {
      const Matrix prod = a.effect * b.effect;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : model.effects) best = std::min(best, (prod - c.effect).norm());
      model.closure_deviation = std::max(model.closure_deviation, best);
    }
  }
  return model;
}

double effect_functoriality_check(const Groupoid& g, const std::vector<std::pair<Arrow, Arrow>>& pairs,
                                  const ToleranceProfile& tol) {
  double worst = 0;
  for (const auto& [later, earlier] : pairs) {
    const Vector x = g.source(earlier);
    if (!g.same_point(g.source(later), x)) {
      throw PreconditionError(g.name() + ": functoriality pair is not based at one point");
    }
    const QuotientSpace q = transversal_space(g, x, tol).quotient;
    const Matrix lhs = effect(g, g.compose(later, earlier), q, tol).map.matrix;
    const Matrix rhs = effect(g, later, q, tol).map.matrix * effect(g, earlier, q, tol).map.matrix;
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

Matrix transported_effect(const GroupoidHom& p, const Arrow& a, const ToleranceProfile& tol) {
  const Groupoid& dom = *p.domain();
  if (!dom.is_isotropic(a)) throw PreconditionError(dom.name() + ": effect needs an isotropic arrow");
  const QuotientLinearMap tp = transversal_map(p, dom.source(a), tol);
  if (tp.matrix.rows() != tp.matrix.cols() || numeric_rank(tp.matrix, tol) < tp.matrix.rows()) {
    throw PreconditionError(p.name() + ": transversal map is not bijective");
  }
  const Matrix image = effect(*p.codomain(), p.apply(a), tp.target, tol).map.matrix;
  return tp.matrix.inverse() * image * tp.matrix;
}

}  // namespace ge
