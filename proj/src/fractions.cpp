#include "groupoid_effect/fractions.hpp"

#include "groupoid_effect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ge {

namespace {

std::vector<Vector> sample_points(const Groupoid& g, Rng& rng, std::size_t n) {
  std::vector<Vector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(g.sample_point(rng));
  return out;
}

std::string failing_flag(const HomClassification& c) {
  if (c.cinfty_full != Tri::True) return "cinfty_full is " + to_string(c.cinfty_full);
  return "completely_transversal is " + to_string(c.completely_transversal);
}

}  // namespace

Span make_span(HomPtr left, HomPtr right, Rng& rng, const ToleranceProfile& tol, const SampleBudget& budget) {
  if (!left || !right) throw InputError("span needs two legs");
  if (left->domain()->name() != right->domain()->name()) {
    throw CompositionError("span legs " + left->name() + " and " + right->name() + " have different domains");
  }
  const auto points = sample_points(*right->domain(), rng, budget.points);
  HomClassification c = classify(*right, points, rng, tol, budget.classify);
  if (c.in_E != Tri::True) {
    throw CompositionError("right leg " + right->name() + " is not in E: " + failing_flag(c));
  }
  return Span{std::move(left), std::move(right), std::move(c)};
}

SpanComposition compose_spans(const Span& outer, const Span& inner, Rng& rng, const ToleranceProfile& tol,
                              const SampleBudget& budget) {
  WeakPullbackConstruction apex = build_weak_pullback(outer.left, inner.right);
  HomPtr right = composite({apex.left_projection, outer.right});
  HomPtr left = composite({apex.right_projection, inner.left});
  Span span = make_span(std::move(left), std::move(right), rng, tol, budget);
  return SpanComposition{std::move(span), std::move(apex)};
}

SpanEquivalenceReport span_equivalence_check(const Span& first, const Span& second, const SpanBridge& bridge,
                                             const std::vector<Arrow>& arrows, Rng& rng,
                                             const ToleranceProfile& tol, const SampleBudget& budget) {
  if (!bridge.to_first || !bridge.to_second) throw InputError("span bridge needs two homs");
  SpanEquivalenceReport out;
  const HomPtr left1 = composite({bridge.to_first, first.left});
  const HomPtr left2 = composite({bridge.to_second, second.left});
  const HomPtr right1 = composite({bridge.to_first, first.right});
  const HomPtr right2 = composite({bridge.to_second, second.right});

  const auto points = sample_points(*bridge.to_first->domain(), rng, budget.points);
  out.through_in_E = classify(*right1, points, rng, tol, budget.classify).in_E;

  if (bridge.left_tau) out.left = natural_congruence_check(*bridge.left_tau, *left1, *left2, arrows, tol);
  if (bridge.right_tau) out.right = natural_congruence_check(*bridge.right_tau, *right1, *right2, arrows, tol);
  auto flag = [](const std::optional<CongruenceResult>& r) {
    if (!r) return Tri::Undetermined;
    return tri(r->passed && !r->rejected);
  };
  out.equivalent = tri_and({out.through_in_E, flag(out.left), flag(out.right)});
  return out;
}

AxiomIIReport axiom_II_instance(HomPtr psi, HomPtr phi, Rng& rng, const ToleranceProfile& tol,
                                const AxiomIIOptions& options) {
  // The precondition on phi is checked here rather than by the builder.
  const auto phi_points = sample_points(*phi->domain(), rng, options.budget.points);
  const HomClassification phi_class = classify(*phi, phi_points, rng, tol, options.budget.classify);

  AxiomIIReport out{build_weak_pullback(std::move(psi), std::move(phi)), phi_class.transversal, {}, {}, {}, {}};
  const Groupoid& z = *out.pullback.groupoid;
  out.structure = check_groupoid_axioms(z, options.fuzz_samples, options.seed);

  const auto points = sample_points(z, rng, options.budget.points);
  out.left_projection = classify(*out.pullback.left_projection, points, rng, tol, options.budget.classify);

  std::vector<IsotropySample> iso;
  for (const Vector& p : sample_points(z, rng, options.preservation_points)) {
    IsotropySample s{p, {}};
    for (std::size_t i = 0; i < options.isotropy_per_point; ++i) {
      if (auto a = z.sample_isotropy(rng, p)) s.arrows.push_back(std::move(*a));
    }
    iso.push_back(std::move(s));
  }
  out.right_preservation = ineffective_preservation_check(*out.pullback.right_projection, iso, tol);

  const Tri structure_ok = tri(out.structure.worst() <= tol.map_abs_tol);
  out.verified = tri_and({out.phi_transversal, structure_ok, out.left_projection.in_E,
                          out.right_preservation.in_dotted_category});
  return out;
}

AxiomIIIReport axiom_III_instance(const AxiomIIIInput& input, Rng& rng, std::size_t samples,
                                  const ToleranceProfile& tol) {
  if (!input.first || !input.second || !input.phi) throw InputError("axiom III instance needs three homs");
  AxiomIIIReport out;
  const Groupoid& mid = *input.first->codomain();
  const Groupoid& far = *input.phi->codomain();
  const auto pulled = build_pullback(input.cover, input.cover_dim, input.first->domain(), input.cover_hooks);
  const Groupoid& cover = *pulled.groupoid;
  const HomPtr first = composite({pulled.projection, input.first});
  const HomPtr second = composite({pulled.projection, input.second});

  std::vector<Arrow> arrows;
  std::vector<Vector> points;
  try {
    for (std::size_t i = 0; i < samples; ++i) {
      const Vector u = cover.sample_point(rng);
      points.push_back(u);
      arrows.push_back(cover.sample_arrow(rng, u));
    }
  } catch (const PreconditionError& e) {
    out.reason = std::string("cover not sampled: ") + e.what();
    return out;
  }
  out.lifted = natural_congruence_check(input.tau, *first, *second, arrows, tol);
  if (out.lifted.rejected) {
    out.verified = Tri::False;
    out.reason = "lifted transformation rejected: " + out.lifted.reason;
    return out;
  }

  // phi(tau(u)) and tau'(c u) are parallel arrows of the far groupoid.
  for (const Vector& u : points) {
    const Vector x = input.cover.map(u);
    const Arrow pushed = input.phi->apply(input.tau.tau(u));
    const Arrow given = input.tau_prime.tau(x);
    const Arrow d = far.compose(far.inverse(given), pushed);
    if (!far.is_isotropic(d)) {
      out.verified = Tri::False;
      out.reason = "phi(tau) and tau' are not parallel";
      return out;
    }
    out.lift_consistency = std::max(out.lift_consistency, is_ineffective(far, d, tol).deviation);
    ++out.points;

    // Faithful transversality transfer on isotropy at first(x).
    const Vector y = input.first->base_map(x);
    std::vector<Arrow> iso;
    for (int k = 0; k < 3; ++k) {
      if (auto a = mid.sample_isotropy(rng, y)) iso.push_back(std::move(*a));
    }
    for (std::size_t a = 0; a < iso.size(); ++a) {
      for (std::size_t b = 0; b < iso.size(); ++b) {
        const Arrow lower = mid.compose(mid.inverse(iso[b]), iso[a]);
        const Arrow upper = input.phi->apply(lower);
        ++out.faithful_samples;
        if (is_ineffective(far, upper, tol).ineffective && !is_ineffective(mid, lower, tol).ineffective) {
          ++out.faithful_violations;
        }
      }
    }
  }
  const bool ok = out.lifted.passed && out.lift_consistency <= tol.map_abs_tol && out.faithful_violations == 0;
  out.verified = tri(ok);
  if (!ok && out.reason.empty()) {
    out.reason = !out.lifted.passed ? "lifted transformation is not a congruence"
                 : out.faithful_violations > 0 ? "faithful transversality transfer failed"
                                               : "phi(tau) differs from tau' by an effective arrow";
  }
  return out;
}

SkeletonPoint skeleton_point(const GroupoidHom& phi, const Vector& x, const std::vector<Arrow>& isotropy,
                             const ToleranceProfile& tol) {
  SkeletonPoint p;
  p.x = x;
  p.y = phi.base_map(x);
  const QuotientLinearMap t = transversal_map(phi, x, tol);
  p.source = t.source;
  p.target = t.target;
  p.lambda = t.matrix;
  p.theta.push_back({Matrix::Identity(p.source.dim(), p.source.dim()),
                     Matrix::Identity(p.target.dim(), p.target.dim())});
  for (const Arrow& g : isotropy) {
    SkeletonPoint::Row row{effect(*phi.domain(), g, p.source, tol).map.matrix,
                           effect(*phi.codomain(), phi.apply(g), p.target, tol).map.matrix};
    p.equivariance_residual = std::max(
        p.equivariance_residual, (p.lambda * row.source_effect - row.target_effect * p.lambda).norm());
    bool found = false;
    for (const auto& r : p.theta) {
      if ((r.source_effect - row.source_effect).norm() <= tol.map_abs_tol) {
        found = true;
        if ((r.target_effect - row.target_effect).norm() > tol.map_abs_tol) p.theta_well_defined = false;
        break;
      }
    }
    if (!found) p.theta.push_back(std::move(row));
  }
  if (p.equivariance_residual > tol.map_abs_tol * std::max(1.0, spectral_norm(p.lambda))) {
    throw InternalConsistencyError(phi.name() + ": transversal map is not equivariant");
  }
  return p;
}

SkeletonEquivalenceReport skeleton_equivalence_check(const SkeletonPoint& p, const SkeletonPoint& q,
                                                     const Groupoid& source, const Groupoid& target,
                                                     const Arrow& g, const Arrow& h, const ToleranceProfile& tol) {
  if (!source.same_point(source.source(g), p.x) || !source.same_point(source.target(g), q.x) ||
      !target.same_point(target.source(h), p.y) || !target.same_point(target.target(h), q.y)) {
    throw PreconditionError("skeleton witness arrows are not typed p -> q");
  }
  SkeletonEquivalenceReport out;
  const Matrix eg = arrow_quotient_map(source, g, p.source, q.source, tol).matrix;
  const Matrix eh = arrow_quotient_map(target, h, p.target, q.target, tol).matrix;
  out.lambda_deviation = (q.lambda * eg - eh * p.lambda).norm();
  const Matrix eg_inv = eg.inverse(), eh_inv = eh.inverse();
  for (const auto& row : p.theta) {
    const Matrix a = eg * row.source_effect * eg_inv;
    const Matrix b = eh * row.target_effect * eh_inv;
    bool found = false;
    for (const auto& r : q.theta) {
      if ((r.source_effect - a).norm() <= tol.map_abs_tol) {
        out.theta_deviation = std::max(out.theta_deviation, (r.target_effect - b).norm());
        found = true;
        break;
      }
    }
    found ? ++out.matched : ++out.unmatched;
  }
  out.equivalent = tri(out.lambda_deviation <= tol.map_abs_tol && out.theta_deviation <= tol.map_abs_tol);
  return out;
}

SkeletonPoint skeleton_compose(const SkeletonPoint& p, const SkeletonPoint& q, const ToleranceProfile& tol) {
  if (p.y.size() != q.x.size() || (p.y - q.x).norm() > tol.map_abs_tol * std::max(1.0, p.y.norm()) ||
      p.target.dim() != q.source.dim()) {
    throw CompositionError("skeleton points do not compose: base points differ");
  }
  SkeletonPoint r;
  r.x = p.x;
  r.y = q.y;
  r.source = p.source;
  r.target = q.target;
  r.lambda = q.lambda * p.lambda;
  r.theta_well_defined = p.theta_well_defined && q.theta_well_defined;
  r.equivariance_residual = 0;
  for (const auto& row : p.theta) {
    for (const auto& next : q.theta) {
      if ((next.source_effect - row.target_effect).norm() <= tol.map_abs_tol) {
        r.theta.push_back({row.source_effect, next.target_effect});
        r.equivariance_residual = std::max(
            r.equivariance_residual, (r.lambda * row.source_effect - next.target_effect * r.lambda).norm());
        break;
      }
    }
  }
  return r;
}

double skeleton_distance(const SkeletonPoint& p, const SkeletonPoint& q, const ToleranceProfile& tol) {
  if (p.lambda.rows() != q.lambda.rows() || p.lambda.cols() != q.lambda.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = (p.lambda - q.lambda).norm();
  for (const auto& row : p.theta) {
    for (const auto& other : q.theta) {
      if ((other.source_effect - row.source_effect).norm() <= tol.map_abs_tol) {
        worst = std::max(worst, (other.target_effect - row.target_effect).norm());
        break;
      }
    }
  }
  return worst;
}

ModelIsomorphismReport model_isomorphism_check(const GroupoidHom& phi, const std::vector<IsotropySample>& domain,
                                               const std::vector<std::vector<Arrow>>& codomain,
                                               const ToleranceProfile& tol) {
  if (domain.size() != codomain.size()) throw InputError("one codomain isotropy sample per domain point");
  ModelIsomorphismReport out;
  bool undetermined = false;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const IsotropySample& s = domain[i];
    SkeletonPoint p;
    try {
      p = skeleton_point(phi, s.point, s.arrows, tol);
    } catch (const NotWellDefinedError&) {
      undetermined = true;
      continue;
    }
    ++out.points;
    const Matrix& lambda = p.lambda;
    const bool square = lambda.rows() == lambda.cols();
    const double cond = condition_number(lambda);
    if (!square || !(min_singular_value(lambda) > tol.map_abs_tol)) {
      ++out.singular_lambdas;
    } else {
      out.max_condition_number = std::max(out.max_condition_number, cond);
    }
    // Injective: distinct source effects have distinct images.
    bool injective = p.theta_well_defined;
    for (std::size_t a = 0; a < p.theta.size() && injective; ++a) {
      for (std::size_t b = a + 1; b < p.theta.size(); ++b) {
        if ((p.theta[a].target_effect - p.theta[b].target_effect).norm() <= tol.map_abs_tol) {
          injective = false;
          break;
        }
      }
    }
    if (!injective) ++out.non_injective;
    // Surjective onto the sampled codomain model.
    const EffectiveIsotropyModel model =
        effective_infinitesimal_model(*phi.codomain(), p.y, codomain[i], tol);
    bool surjective = true;
    for (const auto& entry : model.effects) {
      const Matrix& m = entry.effect;
      bool hit = false;
      for (const auto& row : p.theta) {
        if (row.target_effect.rows() == m.rows() && (row.target_effect - m).norm() <= tol.map_abs_tol) {
          hit = true;
          break;
        }
      }
      if (!hit) surjective = false;
    }
    if (!surjective) ++out.non_surjective;
  }
  if (out.singular_lambdas + out.non_injective + out.non_surjective > 0) out.isomorphic = Tri::False;
  else if (!undetermined && out.points > 0) out.isomorphic = Tri::True;
  return out;
}

}  // namespace ge
