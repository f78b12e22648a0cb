#include "groupoid_effect/homs.hpp"

#include "groupoid_effect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ge {

std::string to_string(Tri t) {
  switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    case Tri::Undetermined: return "undetermined";
  }
  return "undetermined";
}

Tri tri(bool b) { return b ? Tri::True : Tri::False; }

Tri tri_and(std::initializer_list<Tri> flags) {
  bool undetermined = false;
  for (Tri f : flags) {
    if (f == Tri::False) return Tri::False;
    if (f == Tri::Undetermined) undetermined = true;
  }
  return undetermined ? Tri::Undetermined : Tri::True;
}

std::string to_string(CongruenceMode m) {
  return m == CongruenceMode::Exact ? "exact" : "congruence";
}

QuotientLinearMap transversal_map(const GroupoidHom& phi, const Vector& x, const QuotientSpace& src,
                                  const QuotientSpace& dst, const ToleranceProfile& tol) {
  return induced_quotient_map(phi.base_jacobian(x), src, dst, tol);
}

QuotientLinearMap transversal_map(const GroupoidHom& phi, const Vector& x, const ToleranceProfile& tol) {
  const QuotientSpace src = transversal_space(*phi.domain(), x, tol).quotient;
  const QuotientSpace dst = transversal_space(*phi.codomain(), phi.base_map(x), tol).quotient;
  return transversal_map(phi, x, src, dst, tol);
}

double intertwining_check(const GroupoidHom& phi, const Vector& x, const std::vector<Arrow>& isotropy,
                          const ToleranceProfile& tol) {
  const QuotientLinearMap t = transversal_map(phi, x, tol);
  double worst = 0;
  for (const Arrow& g : isotropy) {
    const Matrix up = effect(*phi.domain(), g, t.source, tol).map.matrix;
    const Matrix down = effect(*phi.codomain(), phi.apply(g), t.target, tol).map.matrix;
    worst = std::max(worst, (t.matrix * up - down * t.matrix).norm());
  }
  return worst;
}

RankWitness fibered_source_rank(const GroupoidHom& phi, const Vector& x, const Arrow& h,
                                const ToleranceProfile& tol) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  if (!cod.same_point(cod.target(h), phi.base_map(x))) {
    throw PreconditionError(phi.name() + ": rank witness needs t(h) = f(x)");
  }
  const Matrix bx = dom.base_tangent(x).basis();
  const Matrix df = phi.base_jacobian(x) * bx;
  const ArrowTangent th = cod.arrow_tangent(h);
  const Eigen::Index k = bx.cols(), m = th.basis.cols();
  // Tangent of X x_{f,t} D1 at (x, h): pairs (c, v) with Df B c = dt_h v.
  Matrix c(df.rows(), k + m);
  c << df, -th.dt;
  const Matrix n = null_space(c, tol);
  const Matrix ds = th.ds * n.bottomRows(m);
  RankWitness w;
  w.required = cod.base_tangent(cod.source(h)).dim();
  w.rank = ds.cols() == 0 ? 0 : std::min(numeric_rank(ds, tol), w.required);
  return w;
}

namespace {

double injectivity_margin(const Matrix& m) {
  if (m.cols() == 0) return std::numeric_limits<double>::infinity();
  if (m.rows() < m.cols()) return 0.0;
  return min_singular_value(m);
}

bool is_injective(const Matrix& m, const ToleranceProfile& tol) {
  return injectivity_margin(m) > tol.map_abs_tol;
}

bool is_surjective(const Matrix& m, const ToleranceProfile& tol) {
  if (m.rows() == 0) return true;
  if (m.cols() < m.rows()) return false;
  return min_singular_value(m.transpose()) > tol.map_abs_tol;
}

std::optional<Arrow> try_sample_arrow(const Groupoid& g, Rng& rng, const Vector& x) {
  try {
    return g.sample_arrow(rng, x);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

std::vector<Arrow> isotropy_samples(const Groupoid& g, Rng& rng, const Vector& x, std::size_t count) {
  std::vector<Arrow> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto a = g.sample_isotropy(rng, x);
    if (!a) break;
    out.push_back(std::move(*a));
  }
  return out;
}

}  // namespace

HomClassification classify(const GroupoidHom& phi, const std::vector<Vector>& sample_points, Rng& rng,
                           const ToleranceProfile& tol, const ClassifyOptions& options) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  HomClassification out;
  out.points = sample_points.size();
  if (sample_points.empty()) {
    out.notes.push_back("no sample points");
    return out;
  }

  // Transversality: rank of (x, h) -> s(h) at the unit and at sampled arrows into f(x).
  bool rank_ok = true;
  for (const Vector& x : sample_points) {
    const Vector y = phi.base_map(x);
    std::vector<Arrow> hs{cod.unit(y)};
    for (std::size_t i = 0; i < options.arrows_per_point; ++i) {
      if (auto a = try_sample_arrow(cod, rng, y)) hs.push_back(cod.inverse(*a));
    }
    for (const Arrow& h : hs) {
      const RankWitness w = fibered_source_rank(phi, x, h, tol);
      out.worst_rank_deficit = std::max(out.worst_rank_deficit, w.required - w.rank);
      if (w.rank < w.required) rank_ok = false;
    }
  }
  out.transversal = tri(rank_ok);

  // Transversal maps.
  bool faithful_tangent = true;
  for (const Vector& x : sample_points) {
    try {
      const Matrix t = transversal_map(phi, x, tol).matrix;
      if (t.cols() > 0) {
        const double margin = injectivity_margin(t);
        out.min_singular_value = out.min_singular_value ? std::min(*out.min_singular_value, margin) : margin;
        out.max_condition_number = std::max(out.max_condition_number, condition_number(t));
      }
      if (!is_injective(t, tol)) faithful_tangent = false;
    } catch (const NotWellDefinedError& e) {
      ++out.not_well_defined;
      faithful_tangent = false;
      out.notes.push_back(std::string("transversal map not well defined: ") + e.what());
    }
  }
  out.faithfully_transversal = tri(faithful_tangent);

  // Complete transversality: every sampled codomain point connects into the image.
  const auto& wit = phi.witnesses();
  Tri surjective = Tri::Undetermined;
  if (!wit.surjectivity) {
    out.notes.push_back("no surjectivity witness");
  } else {
    bool ok = true;
    try {
      for (std::size_t i = 0; i < options.codomain_points; ++i) {
        const Vector y = cod.sample_point(rng);
        const SurjectivityWitness s = wit.surjectivity(y);
        const double r = std::max(cod.point_distance(cod.source(s.connector), y),
                                  cod.point_distance(cod.target(s.connector), phi.base_map(s.point)));
        out.surjectivity_residual = std::max(out.surjectivity_residual, r);
        ++out.surjectivity_points;
        if (!cod.same_point(cod.source(s.connector), y) ||
            !cod.same_point(cod.target(s.connector), phi.base_map(s.point))) {
          ok = false;
        }
      }
      surjective = tri(ok);
    } catch (const PreconditionError& e) {
      out.notes.push_back(std::string("surjectivity not sampled: ") + e.what());
    } catch (const std::runtime_error& e) {
      out.notes.push_back(std::string("surjectivity witness failed: ") + e.what());
      surjective = Tri::False;
    }
  }
  out.completely_transversal = tri_and({out.transversal, surjective});

  // Fullness via the lift witness, and faithfulness on arrows between sampled points.
  bool kernel_violation = false;
  bool lift_ok = true, faithful_ok = true;
  for (const Vector& x : sample_points) {
    std::vector<Arrow> gs;
    for (std::size_t i = 0; i < options.arrows_per_point; ++i) {
      if (auto a = try_sample_arrow(dom, rng, x)) gs.push_back(std::move(*a));
    }
    for (Arrow& g : isotropy_samples(dom, rng, x, options.isotropy_per_point)) {
      const Arrow image = phi.apply(g);
      if (cod.arrow_distance(image, cod.unit(cod.source(image))) <= tol.map_abs_tol &&
          dom.arrow_distance(g, dom.unit(x)) > tol.map_abs_tol) {
        kernel_violation = true;
      }
      gs.push_back(std::move(g));
    }
    if (!wit.lift) continue;
    for (const Arrow& g : gs) {
      const Vector x2 = dom.target(g);
      // Codomain arrows f(x) -> f(x2): images, optionally twisted by codomain isotropy.
      std::vector<Arrow> hs{phi.apply(g)};
      if (auto k = cod.sample_isotropy(rng, phi.base_map(x))) hs.push_back(cod.compose(hs.front(), *k));
      for (std::size_t i = 0; i < hs.size(); ++i) {
        try {
          const Arrow l = wit.lift(x, x2, hs[i]);
          const double r = std::max({dom.point_distance(dom.source(l), x), dom.point_distance(dom.target(l), x2),
                                     cod.arrow_distance(phi.apply(l), hs[i])});
          out.lift_residual = std::max(out.lift_residual, r);
          ++out.lift_samples;
          if (r > tol.map_abs_tol * std::max(1.0, x.norm() + x2.norm())) lift_ok = false;
          if (i == 0) {
            const double f = dom.arrow_distance(l, g);
            out.faithful_residual = std::max(out.faithful_residual, f);
            if (f > tol.map_abs_tol * std::max(1.0, x.norm() + x2.norm())) faithful_ok = false;
          }
        } catch (const std::runtime_error& e) {
          lift_ok = false;
          out.notes.push_back(std::string("lift failed: ") + e.what());
        }
      }
    }
  }
  if (!wit.lift) {
    out.notes.push_back("no lift witness");
    out.cinfty_full = Tri::Undetermined;
    out.faithful_at_samples = kernel_violation ? Tri::False : Tri::Undetermined;
  } else {
    out.cinfty_full = out.lift_samples > 0 ? tri(lift_ok) : Tri::Undetermined;
    out.faithful_at_samples = kernel_violation ? Tri::False : (out.lift_samples > 0 ? tri(faithful_ok) : Tri::Undetermined);
  }

  out.in_E = tri_and({out.cinfty_full, out.completely_transversal});
  out.weak_equivalence =
      tri_and({out.completely_transversal, out.cinfty_full, out.faithful_at_samples, out.faithfully_transversal});

  // Ineffective preservation.
  if (dom.has_isotropy_sampler()) {
    std::vector<IsotropySample> samples;
    for (const Vector& x : sample_points) {
      samples.push_back({x, isotropy_samples(dom, rng, x, options.isotropy_per_point)});
    }
    out.in_dotted_category = ineffective_preservation_check(phi, samples, tol).in_dotted_category;
  } else {
    out.notes.push_back("no isotropy sampler on the domain");
  }
  return out;
}

PreservationReport ineffective_preservation_check(const GroupoidHom& phi,
                                                  const std::vector<IsotropySample>& samples,
                                                  const ToleranceProfile& tol) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  PreservationReport out;
  bool undetermined = false;
  for (const IsotropySample& s : samples) {
    QuotientLinearMap t;
    try {
      t = transversal_map(phi, s.point, tol);
    } catch (const NotWellDefinedError&) {
      undetermined = true;
      out.membership.emplace_back(s.point, false);
      continue;
    }
    const bool onto = is_surjective(t.matrix, tol);
    const bool into = is_injective(t.matrix, tol);
    bool point_ok = true;
    for (const Arrow& a : s.arrows) {
      const double up = (effect(dom, a, t.source, tol).map.matrix -
                         Matrix::Identity(t.source.dim(), t.source.dim())).norm();
      const double down = (effect(cod, phi.apply(a), t.target, tol).map.matrix -
                           Matrix::Identity(t.target.dim(), t.target.dim())).norm();
      const bool up_ineffective = up <= tol.map_abs_tol;
      const bool down_ineffective = down <= tol.map_abs_tol;
      ++out.arrows;
      if (up_ineffective) {
        out.worst_image_deviation = std::max(out.worst_image_deviation, down);
        if (!down_ineffective) {
          ++out.dotted_violations;
          point_ok = false;
          if (onto) ++out.surjective_violations;
        }
      } else if (down_ineffective && into) {
        ++out.injective_violations;
      }
      if (onto && into) ++out.equivalence_checked;
    }
    out.membership.emplace_back(s.point, point_ok);
  }
  if (out.dotted_violations > 0) out.in_dotted_category = Tri::False;
  else if (undetermined || out.arrows == 0) out.in_dotted_category = Tri::Undetermined;
  else out.in_dotted_category = Tri::True;
  return out;
}

CongruenceResult natural_congruence_check(const NaturalTransformationWitness& tau, const GroupoidHom& phi,
                                          const GroupoidHom& psi, const std::vector<Arrow>& arrows,
                                          const ToleranceProfile& tol) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  CongruenceResult out;
  if (!tau.tau) {
    out.rejected = true;
    out.reason = "no transformation supplied";
    return out;
  }
  auto typed = [&](const Vector& x) {
    const Arrow a = tau.tau(x);
    if (!cod.same_point(cod.source(a), phi.base_map(x)) || !cod.same_point(cod.target(a), psi.base_map(x))) {
      throw PreconditionError("tau(x) does not run from phi(x) to psi(x)");
    }
    return a;
  };
  try {
    for (const Arrow& g : arrows) {
      const Vector sx = dom.source(g), tx = dom.target(g);
      const Arrow lhs = cod.compose(typed(tx), phi.apply(g));
      const Arrow rhs = cod.compose(psi.apply(g), typed(sx));
      const Arrow d = cod.compose(cod.inverse(rhs), lhs);
      if (!cod.is_isotropic(d)) throw PreconditionError("defect arrow is not isotropic");
      const double dev = tau.mode == CongruenceMode::Exact
                             ? cod.arrow_distance(d, cod.unit(cod.source(d)))
                             : is_ineffective(cod, d, tol).deviation;
      out.max_deviation = std::max(out.max_deviation, dev);
      ++out.samples;
    }
  } catch (const PreconditionError& e) {
    out.rejected = true;
    out.reason = e.what();
    return out;
  } catch (const CompositionError& e) {
    out.rejected = true;
    out.reason = e.what();
    return out;
  }
  out.passed = out.max_deviation <= tol.map_abs_tol;
  if (!out.passed) out.reason = "defect exceeds tolerance";
  return out;
}

ObstructionResult congruence_obstruction(const GroupoidHom& phi, const GroupoidHom& psi, const Vector& x,
                                         const Arrow& g, const std::vector<Arrow>& candidates,
                                         CongruenceMode mode, const ToleranceProfile& tol) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  if (!dom.is_isotropic(g) || !dom.same_point(dom.source(g), x)) {
    throw PreconditionError("obstruction search needs an isotropic arrow at x");
  }
  ObstructionResult out;
  out.candidates = candidates.size();
  if (candidates.empty()) return out;
  const Arrow pg = phi.apply(g), qg = psi.apply(g);
  out.best_deviation = std::numeric_limits<double>::infinity();
  for (const Arrow& h : candidates) {
    if (!cod.same_point(cod.source(h), phi.base_map(x)) || !cod.same_point(cod.target(h), psi.base_map(x))) {
      throw PreconditionError("candidate does not run from phi(x) to psi(x)");
    }
    const Arrow lhs = cod.compose(h, pg);
    const Arrow rhs = cod.compose(qg, h);
    const double dev = mode == CongruenceMode::Exact
                           ? cod.arrow_distance(lhs, rhs)
                           : is_ineffective(cod, cod.compose(cod.inverse(rhs), lhs), tol).deviation;
    out.best_deviation = std::min(out.best_deviation, dev);
  }
  out.witness_found = tri(out.best_deviation <= tol.map_abs_tol);
  return out;
}

double natural_transformation_effect_check(const NaturalTransformationWitness& tau, const GroupoidHom& phi,
                                           const GroupoidHom& psi, const std::vector<Vector>& points,
                                           const ToleranceProfile& tol) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  double worst = 0;
  for (const Vector& x : points) {
    const QuotientSpace qx = transversal_space(dom, x, tol).quotient;
    const QuotientSpace qphi = transversal_space(cod, phi.base_map(x), tol).quotient;
    const QuotientSpace qpsi = transversal_space(cod, psi.base_map(x), tol).quotient;
    const Matrix tphi = transversal_map(phi, x, qx, qphi, tol).matrix;
    const Matrix tpsi = transversal_map(psi, x, qx, qpsi, tol).matrix;
    const Matrix e = arrow_quotient_map(cod, tau.tau(x), qphi, qpsi, tol).matrix;
    worst = std::max(worst, (e * tphi - tpsi).norm());
  }
  return worst;
}

OrbitMapReport orbit_map_check(const GroupoidHom& phi, const std::vector<std::pair<Vector, Vector>>& pairs,
                               const std::vector<Vector>& codomain_points, const ToleranceProfile& tol) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  OrbitMapReport out;
  bool oracle_missing = false;
  for (const auto& [x, x2] : pairs) {
    const auto down = cod.same_orbit(phi.base_map(x), phi.base_map(x2));
    const auto up = dom.same_orbit(x, x2);
    if (!down || !up) {
      oracle_missing = true;
      continue;
    }
    ++out.pairs;
    if (*down && !*up) ++out.injectivity_failures;
  }
  if (out.injectivity_failures > 0) out.injective = Tri::False;
  else if (!oracle_missing && out.pairs > 0) out.injective = Tri::True;

  const auto& surj = phi.witnesses().surjectivity;
  if (surj) {
    bool missing = false;
    for (const Vector& y : codomain_points) {
      ++out.codomain_points;
      bool ok = false;
      try {
        const SurjectivityWitness w = surj(y);
        const Vector fx = phi.base_map(w.point);
        ok = cod.same_point(cod.source(w.connector), y) && cod.same_point(cod.target(w.connector), fx);
        if (ok) {
          const auto orbit = cod.same_orbit(y, fx);
          if (!orbit) missing = true;
          else ok = *orbit;
        }
      } catch (const std::runtime_error&) {
        ok = false;
      }
      if (!ok) ++out.surjectivity_failures;
    }
    if (out.surjectivity_failures > 0) out.surjective = Tri::False;
    else if (!missing && out.codomain_points > 0) out.surjective = Tri::True;
  }
  (void)tol;
  return out;
}

double action_jacobian_fd_residual(const SmoothActionModel& action, const Matrix& g, const Vector& x,
                                   const ToleranceProfile& tol) {
  const Matrix j = action.base_jacobian(g, x);
  const double h = tol.fd_step;
  double worst = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector e = Vector::Zero(x.size());
    e(i) = h;
    const Vector col = (action.act(g, x + e) - action.act(g, x - e)) / (2 * h);
    worst = std::max(worst, (col - j.col(i)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double action_generator_fd_residual(const LieGroupModel& group, const SmoothActionModel& action,
                                    const Vector& x, const ToleranceProfile& tol) {
  const double h = tol.fd_step;
  double worst = 0;
  for (int i = 0; i < group.dim(); ++i) {
    Vector e = Vector::Zero(group.dim());
    e(i) = h;
    const Vector fd = (action.act(group.exp(e), x) - action.act(group.exp(-e), x)) / (2 * h);
    const Vector an = action.generator(group.algebra_basis()[static_cast<std::size_t>(i)], x);
    worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::optional<double> base_jacobian_fd_residual(const GroupoidHom& phi, const Vector& x,
                                                const ToleranceProfile& tol) {
  if (!phi.domain()->flat_base() || !phi.codomain()->flat_base()) return std::nullopt;
  const Matrix j = phi.base_jacobian(x);
  const double h = tol.fd_step;
  double worst = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector e = Vector::Zero(x.size());
    e(i) = h;
    const Vector col = (phi.base_map(x + e) - phi.base_map(x - e)) / (2 * h);
    worst = std::max(worst, (col - j.col(i)).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::optional<double> arrow_jacobian_fd_residual(const GroupoidHom& phi, const Arrow& a,
                                                 const ToleranceProfile& tol) {
  const Groupoid& dom = *phi.domain();
  const Groupoid& cod = *phi.codomain();
  Matrix j;
  try {
    j = phi.arrow_jacobian(a);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
  const Arrow image = phi.apply(a);
  const double h = tol.fd_step;
  double worst = 0;
  for (int i = 0; i < dom.arrow_chart_dim(); ++i) {
    Vector e = Vector::Zero(dom.arrow_chart_dim());
    e(i) = h;
    const auto plus = dom.arrow_chart_step(a, e);
    const auto minus = dom.arrow_chart_step(a, -e);
    if (!plus || !minus) return std::nullopt;
    const auto cp = cod.arrow_chart_coordinates(image, phi.apply(*plus));
    const auto cm = cod.arrow_chart_coordinates(image, phi.apply(*minus));
    if (!cp || !cm) return std::nullopt;
    const Vector col = (*cp - *cm) / (2 * h);
    worst = std::max(worst, (col - j.col(i)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace ge
