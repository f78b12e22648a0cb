#include "groupoid_effect/scenarios.hpp"

#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/fractions.hpp"
#include "groupoid_effect/models.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <set>

namespace ge {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Parameter parsing

int parse_int(const std::string& name, const std::string& v) {
  int out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw InputError("parameter " + name + ": not an integer: '" + v + "'");
  return out;
}

double parse_double(const std::string& name, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) {
    throw InputError("parameter " + name + ": not a finite number: '" + v + "'");
  }
  return d;
}

int parse_sign(const std::string& name, const std::string& v) {
  if (v == "+" || v == "+1" || v == "1") return 1;
  if (v == "-" || v == "-1") return -1;
  throw InputError("parameter " + name + ": expected + or -, got '" + v + "'");
}

FrequencyProfile parse_profile(const std::string& name, const std::string& v) {
  try {
    return FrequencyProfile::parse(v);
  } catch (const InputError& e) {
    throw InputError("parameter " + name + ": " + e.what());
  }
}

const std::vector<std::string> kCustomGroups = {"so2", "o2", "so3", "so3_axis", "rotation"};

using Validator = std::function<void(const std::string& name, const std::string& value)>;

struct ParamSpec {
  ParameterInfo info;
  Validator validate;
};

Validator int_in(int lo, int hi) {
  return [lo, hi](const std::string& n, const std::string& v) {
    const int k = parse_int(n, v);
    if (k < lo || k > hi) {
      throw InputError("parameter " + n + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  };
}
Validator positive_real() {
  return [](const std::string& n, const std::string& v) {
    if (parse_double(n, v) <= 0) throw InputError("parameter " + n + " must be positive");
  };
}
Validator any_real() {
  return [](const std::string& n, const std::string& v) { parse_double(n, v); };
}
Validator sign() {
  return [](const std::string& n, const std::string& v) { parse_sign(n, v); };
}
Validator profile() {
  return [](const std::string& n, const std::string& v) { parse_profile(n, v); };
}
Validator group_choice() {
  return [](const std::string& n, const std::string& v) {
    if (std::find(kCustomGroups.begin(), kCustomGroups.end(), v) == kCustomGroups.end()) {
      throw InputError("parameter " + n + ": unknown group '" + v + "' (so2, o2, so3, so3_axis, rotation)");
    }
  };
}

class Runner;
using ScenarioFn = void (*)(Runner&);

struct ScenarioEntry {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  ScenarioFn run;
};

const std::vector<ScenarioEntry>& registry();

const ScenarioEntry& find_entry(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.name == name) return e;
  }
  throw InputError("unknown scenario '" + name + "' (see list-scenarios)");
}

// ---------------------------------------------------------------------------
// Manifest runner

using Body = std::function<void(CheckRecord&, Rng&)>;

class Runner {
 public:
  Runner(const ScenarioConfig& config, std::map<std::string, std::string> params, Report& report)
      : config_(config),
        params_(std::move(params)),
        report_(report),
        root_(config.seed),
        counts_(SampleCounts::from(config.samples)) {}

  const ToleranceProfile& tol() const { return config_.tolerance; }
  const SampleCounts& n() const { return counts_; }
  std::size_t samples() const { return config_.samples; }

  const std::string& text(const std::string& name) const { return params_.at(name); }
  int integer(const std::string& name) const { return parse_int(name, text(name)); }
  double real(const std::string& name) const { return parse_double(name, text(name)); }
  int sign_of(const std::string& name) const { return parse_sign(name, text(name)); }
  FrequencyProfile frequency(const std::string& name) const { return parse_profile(name, text(name)); }

  // Each check draws from its own child stream, so adding or failing one
  // check never shifts the samples of another.
  void check(const std::string& name, const std::string& property, const Body& body) {
    CheckRecord rec;
    rec.name = name;
    rec.property = property;
    Rng rng = root_.fork();
    try {
      body(rec, rng);
    } catch (const std::exception& e) {
      rec.status = CheckStatus::Fail;
      rec.witnesses["error"] = e.what();
    }
    report_.add(std::move(rec));
  }

 private:
  const ScenarioConfig& config_;
  std::map<std::string, std::string> params_;
  Report& report_;
  Rng root_;
  SampleCounts counts_;
};

// ---------------------------------------------------------------------------
// Small helpers

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void verdict(CheckRecord& c, bool ok) { c.status = ok ? CheckStatus::Pass : CheckStatus::Fail; }

// Passes when the flag is determined and equals the expectation.
void expect_tri(CheckRecord& c, Tri observed, Tri expected) {
  if (observed == Tri::Undetermined) {
    c.status = CheckStatus::Undetermined;
  } else {
    verdict(c, observed == expected);
  }
  c.witnesses["expected"] = to_string(expected);
  c.witnesses["observed"] = to_string(observed);
}

Json flags_json(const HomClassification& c) {
  Json j;
  j["in_dotted_category"] = to_string(c.in_dotted_category);
  j["transversal"] = to_string(c.transversal);
  j["completely_transversal"] = to_string(c.completely_transversal);
  j["cinfty_full"] = to_string(c.cinfty_full);
  j["faithful_at_samples"] = to_string(c.faithful_at_samples);
  j["faithfully_transversal"] = to_string(c.faithfully_transversal);
  j["weak_equivalence"] = to_string(c.weak_equivalence);
  j["in_E"] = to_string(c.in_E);
  j["points"] = c.points;
  j["worst_rank_deficit"] = c.worst_rank_deficit;
  if (c.min_singular_value) j["min_singular_value"] = *c.min_singular_value;
  j["max_condition_number"] = std::isfinite(c.max_condition_number) ? Json(c.max_condition_number) : Json("inf");
  j["surjectivity_points"] = c.surjectivity_points;
  j["lift_samples"] = c.lift_samples;
  j["not_well_defined"] = c.not_well_defined;
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

// Implications between the flags that hold by definition; returns the first
// violated one, or an empty string.
std::string classification_inconsistency(const HomClassification& c) {
  auto implies = [](Tri a, Tri b) { return a != Tri::True || b == Tri::True; };
  if (!implies(c.weak_equivalence, c.completely_transversal)) return "weak equivalence without complete transversality";
  if (!implies(c.weak_equivalence, c.cinfty_full)) return "weak equivalence without fullness";
  if (!implies(c.weak_equivalence, c.faithfully_transversal)) return "weak equivalence without faithful transversality";
  if (!implies(c.in_E, c.completely_transversal)) return "class E without complete transversality";
  if (!implies(c.in_E, c.cinfty_full)) return "class E without fullness";
  if (!implies(c.completely_transversal, c.transversal)) return "completely transversal but not transversal";
  return {};
}

std::vector<Vector> sample_points(const Groupoid& g, Rng& rng, std::size_t count) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(g.sample_point(rng));
  return out;
}

Arrow require_isotropy(const Groupoid& g, Rng& rng, const Vector& x) {
  auto a = g.sample_isotropy(rng, x);
  if (!a) throw PreconditionError(g.name() + " has no isotropy sampler");
  return *a;
}

std::vector<Arrow> isotropy_at(const Groupoid& g, Rng& rng, const Vector& x, std::size_t count) {
  std::vector<Arrow> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(require_isotropy(g, rng, x));
  return out;
}

using PointSampler = std::function<Vector(Rng&)>;

PointSampler with_special(const Groupoid& g, std::vector<Vector> special) {
  return [&g, special = std::move(special)](Rng& rng) {
    if (!special.empty() && rng.index(4) == 0) return special[rng.index(special.size())];
    return g.sample_point(rng);
  };
}

std::uint64_t child_seed(Rng& rng) { return rng.index(std::uint64_t{1} << 62); }

// ---------------------------------------------------------------------------
// Generic checks shared by several manifests

void intertwining(Runner& r, const std::string& name, const HomPtr& hom, const PointSampler& points) {
  r.check(name, "T(phi) intertwines the effects of isotropic arrows with those of their images",
          [&](CheckRecord& c, Rng& rng) {
            const std::size_t total = r.n().intertwining;
            const std::size_t per_point = 5;
            double worst = 0;
            std::size_t arrows = 0;
            while (arrows < total) {
              const Vector x = points(rng);
              const auto iso = isotropy_at(*hom->domain(), rng, x, std::min(per_point, total - arrows));
              worst = std::max(worst, intertwining_check(*hom, x, iso, r.tol()));
              arrows += iso.size();
            }
            c.deviation = worst;
            c.witnesses["hom"] = hom->name();
            c.witnesses["arrows"] = arrows;
            verdict(c, worst < r.tol().map_abs_tol);
          });
}

void functoriality(Runner& r, const std::string& name, const GroupoidPtr& g, const PointSampler& points) {
  r.check(name, "eps(a'a) = eps(a') eps(a) for isotropic pairs at a common point", [&](CheckRecord& c, Rng& rng) {
    std::vector<std::pair<Arrow, Arrow>> pairs;
    while (pairs.size() < r.n().arrows) {
      const Vector x = points(rng);
      for (int i = 0; i < 5 && pairs.size() < r.n().arrows; ++i) {
        pairs.emplace_back(require_isotropy(*g, rng, x), require_isotropy(*g, rng, x));
      }
    }
    c.deviation = effect_functoriality_check(*g, pairs, r.tol());
    c.witnesses["groupoid"] = g->name();
    c.witnesses["pairs"] = pairs.size();
    verdict(c, c.deviation < r.tol().map_abs_tol);
  });
}

void fd_action(Runner& r, const std::string& prefix, const std::shared_ptr<const TranslationGroupoid>& g,
               const PointSampler& points) {
  r.check(prefix + "_action_jacobian_fd", "analytic action Jacobian agrees with central differences",
          [&](CheckRecord& c, Rng& rng) {
            for (std::size_t i = 0; i < r.n().jacobian; ++i) {
              const Matrix a = g->group().sample(rng);
              c.deviation = std::max(c.deviation, action_jacobian_fd_residual(g->action(), a, points(rng), r.tol()));
            }
            c.witnesses["action"] = g->action().name();
            c.witnesses["points"] = r.n().jacobian;
            verdict(c, c.deviation <= r.tol().fd_abs_tol);
          });
  r.check(prefix + "_generator_fd", "analytic infinitesimal generators agree with central differences",
          [&](CheckRecord& c, Rng& rng) {
            for (std::size_t i = 0; i < r.n().jacobian; ++i) {
              c.deviation =
                  std::max(c.deviation, action_generator_fd_residual(g->group(), g->action(), points(rng), r.tol()));
            }
            c.witnesses["action"] = g->action().name();
            c.witnesses["points"] = r.n().jacobian;
            verdict(c, c.deviation <= r.tol().fd_abs_tol);
          });
}

void fd_hom(Runner& r, const std::string& prefix, const HomPtr& hom, const PointSampler& points,
            bool arrow_level = true) {
  r.check(prefix + "_base_jacobian_fd", "analytic base Jacobian of the hom agrees with central differences",
          [&](CheckRecord& c, Rng& rng) {
            for (std::size_t i = 0; i < r.n().jacobian; ++i) {
              const auto res = base_jacobian_fd_residual(*hom, points(rng), r.tol());
              if (!res) throw PreconditionError("base charts are not flat");
              c.deviation = std::max(c.deviation, *res);
            }
            c.witnesses["hom"] = hom->name();
            c.witnesses["points"] = r.n().jacobian;
            verdict(c, c.deviation <= r.tol().fd_abs_tol);
          });
  if (!arrow_level) return;
  r.check(prefix + "_arrow_jacobian_fd", "analytic arrow-level Jacobian of the hom agrees with central differences",
          [&](CheckRecord& c, Rng& rng) {
            for (std::size_t i = 0; i < r.n().jacobian; ++i) {
              const Vector x = points(rng);
              const auto res = arrow_jacobian_fd_residual(*hom, hom->domain()->sample_arrow(rng, x), r.tol());
              if (!res) throw PreconditionError("no flat arrow charts or no arrow-level differential");
              c.deviation = std::max(c.deviation, *res);
            }
            c.witnesses["hom"] = hom->name();
            c.witnesses["arrows"] = r.n().jacobian;
            verdict(c, c.deviation <= r.tol().fd_abs_tol);
          });
}

void axioms(Runner& r, const std::string& name, const GroupoidPtr& g) {
  r.check(name, "groupoid structure laws hold on sampled composable triples", [&](CheckRecord& c, Rng& rng) {
    const AxiomReport a = check_groupoid_axioms(*g, r.samples(), child_seed(rng));
    c.deviation = a.worst();
    c.witnesses["samples"] = a.samples;
    c.witnesses["unit_source_target"] = a.unit_source_target;
    c.witnesses["composition_ends"] = a.composition_ends;
    c.witnesses["associativity"] = a.associativity;
    c.witnesses["unit_laws"] = a.unit_laws;
    c.witnesses["inverse_laws"] = a.inverse_laws;
    c.witnesses["target_of_inverse"] = a.target_of_inverse;
    verdict(c, c.deviation < r.tol().map_abs_tol);
  });
}

NaturalTransformationWitness unit_tau(const HomPtr& phi, CongruenceMode mode) {
  const GroupoidPtr cod = phi->codomain();
  return {[phi, cod](const Vector& x) { return cod->unit(phi->base_map(x)); }, mode};
}

Json congruence_json(const CongruenceResult& res) {
  Json j;
  j["passed"] = res.passed;
  j["rejected"] = res.rejected;
  if (!res.reason.empty()) j["reason"] = res.reason;
  j["samples"] = res.samples;
  j["max_deviation"] = res.max_deviation;
  return j;
}

// ---------------------------------------------------------------------------
// ex1: reflections through O(2) x R2 -> G x R3

void run_ex1(Runner& r) {
  const auto m = models::reflections();
  const Vector p = vec({1.0, 0.0});
  Matrix flip = Matrix::Identity(2, 2);
  flip(1, 1) = -1.0;
  const Arrow upstairs = make_action_arrow(flip, p);

  r.check("upstairs_effect", "the reflection fixing (1,0) has effect [1] in O(2) x R2", [&](CheckRecord& c, Rng&) {
    const Effect e = effect(*m.plane, upstairs, r.tol());
    const Matrix& eff = e.map.matrix;
    if (eff.rows() != 1 || eff.cols() != 1) throw InternalConsistencyError("transversal at (1,0) is not a line");
    c.deviation = (eff - Matrix::Identity(1, 1)).norm();
    c.witnesses["effect"] = to_json(eff);
    c.witnesses["ineffective"] = is_ineffective(*m.plane, upstairs, r.tol()).ineffective;
    verdict(c, c.deviation <= r.tol().map_abs_tol);
  });

  r.check("downstairs_effect", "its image has effect diag(1,-1) on span{e1, e3}", [&](CheckRecord& c, Rng&) {
    const Arrow image = m.hom->apply(upstairs);
    const Effect e = effect(*m.space, image, r.tol());
    Matrix expected = Matrix::Identity(2, 2);
    expected(1, 1) = -1.0;
    Matrix complement = Matrix::Zero(3, 2);
    complement(0, 0) = complement(2, 1) = 1.0;
    const Matrix& eff = e.map.matrix;
    if (eff.rows() != 2 || eff.cols() != 2) throw InternalConsistencyError("transversal at (1,0,0) is not a plane");
    c.deviation = (eff - expected).norm() + (e.map.source.complement() - complement).norm();
    c.witnesses["image_group"] = to_json(image.as<ActionArrow>().group);
    c.witnesses["effect"] = to_json(eff);
    c.witnesses["complement"] = to_json(e.map.source.complement());
    verdict(c, c.deviation <= r.tol().map_abs_tol);
  });

  r.check("not_in_dotted_category", "the hom maps an ineffective arrow to an effective one at (1,0)",
          [&](CheckRecord& c, Rng&) {
            const PreservationReport pr = ineffective_preservation_check(*m.hom, {{p, {upstairs}}}, r.tol());
            c.deviation = pr.worst_image_deviation;
            c.witnesses["dotted_violations"] = pr.dotted_violations;
            expect_tri(c, pr.in_dotted_category, Tri::False);
          });

  r.check("downstairs_isotropy_partition", "at (1,0,0) the unit and axis rotations are ineffective, the flip is not",
          [&](CheckRecord& c, Rng& rng) {
            const Vector y = vec({1.0, 0.0, 0.0});
            std::vector<Arrow> s{m.space->unit(y), m.hom->apply(upstairs)};
            for (int i = 0; i < 8; ++i) s.push_back(require_isotropy(*m.space, rng, y));
            const IsotropyPartition part = ineffective_subgroup_sample(*m.space, y, s, r.tol());
            const bool flip_effective = std::find(part.effective.begin(), part.effective.end(), 1) != part.effective.end();
            const bool unit_ineffective =
                std::find(part.ineffective.begin(), part.ineffective.end(), 0) != part.ineffective.end();
            c.deviation = part.closure_deviation;
            c.witnesses["ineffective"] = part.ineffective.size();
            c.witnesses["effective"] = part.effective.size();
            c.witnesses["closed"] = part.closed;
            verdict(c, flip_effective && unit_ineffective && part.closed);
          });

  r.check("downstairs_effective_model", "the effective model at (1,0,0) is {I, diag(1,-1)}", [&](CheckRecord& c, Rng& rng) {
    const Vector y = vec({1.0, 0.0, 0.0});
    std::vector<Arrow> s{m.hom->apply(upstairs)};
    for (int i = 0; i < 8; ++i) s.push_back(require_isotropy(*m.space, rng, y));
    const EffectiveIsotropyModel model = effective_infinitesimal_model(*m.space, y, s, r.tol());
    c.deviation = model.closure_deviation;
    c.witnesses["effects"] = model.effects.size();
    verdict(c, model.effects.size() == 2 && c.deviation <= r.tol().map_abs_tol);
  });

  r.check("skeleton_at_reflection_point", "lambda at (1,0) is equivariant though theta is not well defined",
          [&](CheckRecord& c, Rng& rng) {
            std::vector<Arrow> iso{upstairs};
            for (int i = 0; i < 4; ++i) iso.push_back(require_isotropy(*m.plane, rng, p));
            const SkeletonPoint sk = skeleton_point(*m.hom, p, iso, r.tol());
            c.deviation = sk.equivariance_residual;
            c.witnesses["lambda"] = to_json(sk.lambda);
            c.witnesses["theta_well_defined"] = sk.theta_well_defined;
            verdict(c, c.deviation < r.tol().map_abs_tol && sk.lambda.rows() == 2 && sk.lambda.cols() == 1 &&
                           !sk.theta_well_defined);
          });

  r.check("classification", "sampled flags are consistent and the hom is outside the dotted category",
          [&](CheckRecord& c, Rng& rng) {
            auto pts = sample_points(*m.plane, rng, r.n().points);
            pts.push_back(p);
            const HomClassification cl = classify(*m.hom, pts, rng, r.tol());
            c.witnesses["flags"] = flags_json(cl);
            const std::string bad = classification_inconsistency(cl);
            if (!bad.empty()) c.witnesses["inconsistency"] = bad;
            verdict(c, bad.empty() && cl.in_dotted_category == Tri::False);
          });

  const PointSampler plane_points = with_special(*m.plane, {Vector::Zero(2), p});
  intertwining(r, "intertwining", m.hom, plane_points);
  functoriality(r, "effect_functoriality_plane", m.plane, plane_points);
  functoriality(r, "effect_functoriality_space", m.space, with_special(*m.space, {Vector::Zero(3), vec({1, 0, 0})}));
  fd_action(r, "plane", m.plane, plane_points);
  fd_action(r, "space", m.space, [&](Rng& rng) { return m.space->sample_point(rng); });
  fd_hom(r, "hom", m.hom, plane_points);
}

// ---------------------------------------------------------------------------
// ex2a: the plane collapsed onto the pole, with and without A -> A^k

void run_ex2a(Runner& r) {
  const int k = r.integer("k");
  const auto m = models::pole_collapse(k);
  const Vector pole = vec({0.0, 0.0, 1.0});
  const Vector origin2 = Vector::Zero(2);

  // Arrows shared by the exact and congruence checks.
  auto plane_arrows = [&](Rng& rng) {
    std::vector<Arrow> out;
    for (std::size_t i = 0; i < r.n().arrows; ++i) {
      const Vector x = i % 4 == 0 ? origin2 : m.plane->sample_point(rng);
      out.push_back(m.plane->sample_arrow(rng, x));
    }
    return out;
  };

  r.check("unit_congruence", "the unit-valued transformation is a natural congruence theta => theta^k",
          [&](CheckRecord& c, Rng& rng) {
            const CongruenceResult res = natural_congruence_check(unit_tau(m.direct, CongruenceMode::Congruence),
                                                                  *m.direct, *m.twisted, plane_arrows(rng), r.tol());
            c.deviation = res.max_deviation;
            c.witnesses["result"] = congruence_json(res);
            verdict(c, res.passed && !res.rejected);
          });

  r.check("unit_not_exact", "the unit-valued transformation is not exactly natural unless k = 1",
          [&](CheckRecord& c, Rng& rng) {
            const CongruenceResult res = natural_congruence_check(unit_tau(m.direct, CongruenceMode::Exact),
                                                                  *m.direct, *m.twisted, plane_arrows(rng), r.tol());
            c.deviation = res.max_deviation;
            c.witnesses["result"] = congruence_json(res);
            c.witnesses["expected_exact"] = k == 1;
            verdict(c, !res.rejected && res.passed == (k == 1));
          });

  // Isotropic arrows at the plane origin, with rotation angles kept away from
  // the angles where R^(k-1) = I.
  struct Obstruction {
    double beta;
    ObstructionResult exact;
    ObstructionResult congruence;
  };
  std::vector<Obstruction> obstructions;
  r.check("exact_obstruction", "no stabilizer rotation h at the pole satisfies h theta(g) = theta^k(g) h",
          [&](CheckRecord& c, Rng& rng) {
            std::vector<Arrow> candidates;
            for (int j = 0; j < 360; ++j) candidates.push_back(make_action_arrow(rot_z(2 * kPi * j / 360.0), pole));
            Json per_point = Json::array();
            bool ok = true;
            c.deviation = std::numeric_limits<double>::infinity();
            while (obstructions.size() < r.n().obstruction) {
              const double beta = rng.uniform(-kPi, kPi);
              if (k != 1 && std::abs(std::sin((k - 1) * beta / 2)) < 0.1) continue;
              const Arrow g = make_action_arrow(rot2(beta), origin2);
              Obstruction o{beta,
                            congruence_obstruction(*m.direct, *m.twisted, origin2, g, candidates, CongruenceMode::Exact,
                                                   r.tol()),
                            congruence_obstruction(*m.direct, *m.twisted, origin2, g, candidates,
                                                   CongruenceMode::Congruence, r.tol())};
              const Tri expected = tri(k == 1);
              ok = ok && o.exact.witness_found == expected;
              c.deviation = std::min(c.deviation, o.exact.best_deviation);
              per_point.push_back({{"beta", beta},
                                   {"witness_found", to_string(o.exact.witness_found)},
                                   {"best_deviation", o.exact.best_deviation}});
              obstructions.push_back(o);
            }
            c.witnesses["candidates"] = candidates.size();
            c.witnesses["points"] = per_point;
            verdict(c, ok);
          });

  r.check("exact_obstruction_closed_form",
          "for abelian stabilizers the best candidate misses by |R_z((k-1) beta) - I|",
          [&](CheckRecord& c, Rng&) {
            if (obstructions.empty()) throw PreconditionError("no obstruction samples");
            for (const auto& o : obstructions) {
              const double closed = 2 * std::sqrt(2.0) * std::abs(std::sin((k - 1) * o.beta / 2));
              c.deviation = std::max(c.deviation, std::abs(o.exact.best_deviation - closed));
            }
            c.witnesses["points"] = obstructions.size();
            verdict(c, c.deviation <= r.tol().map_abs_tol);
          });

  r.check("congruence_obstruction", "modulo ineffective arrows every stabilizer candidate is a witness",
          [&](CheckRecord& c, Rng&) {
            if (obstructions.empty()) throw PreconditionError("no obstruction samples");
            bool ok = true;
            for (const auto& o : obstructions) {
              ok = ok && o.congruence.witness_found == Tri::True;
              c.deviation = std::max(c.deviation, o.congruence.best_deviation);
            }
            c.witnesses["points"] = obstructions.size();
            verdict(c, ok);
          });

  r.check("transversal_map_vanishes", "T(phi) is zero at every sampled point", [&](CheckRecord& c, Rng& rng) {
    auto pts = sample_points(*m.plane, rng, r.n().points);
    pts.push_back(origin2);
    for (const auto& x : pts) c.deviation = std::max(c.deviation, transversal_map(*m.direct, x, r.tol()).matrix.norm());
    c.witnesses["points"] = pts.size();
    verdict(c, c.deviation <= r.tol().map_abs_tol);
  });

  r.check("classification", "the pole collapse is neither transversal nor faithfully transversal",
          [&](CheckRecord& c, Rng& rng) {
            const HomClassification cl = classify(*m.direct, sample_points(*m.plane, rng, r.n().points), rng, r.tol());
            c.witnesses["flags"] = flags_json(cl);
            const std::string bad = classification_inconsistency(cl);
            if (!bad.empty()) c.witnesses["inconsistency"] = bad;
            verdict(c, bad.empty() && cl.transversal == Tri::False && cl.faithfully_transversal == Tri::False);
          });

  r.check("pole_rotations_ineffective", "rotations about the axis act trivially on the transversal at the pole",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            for (std::size_t i = 0; i < r.n().points; ++i) {
              const auto res = is_ineffective(*m.space, make_action_arrow(rot_z(rng.uniform(-kPi, kPi)), pole), r.tol());
              ok = ok && res.ineffective;
              c.deviation = std::max(c.deviation, res.deviation);
            }
            verdict(c, ok);
          });

  r.check("origin_rotation_effective", "the same rotations act faithfully at the origin", [&](CheckRecord& c, Rng&) {
    const auto res = is_ineffective(*m.space, make_action_arrow(rot_z(0.7), Vector::Zero(3)), r.tol());
    c.deviation = res.deviation;
    c.witnesses["expected_deviation"] = (rot_z(0.7) - Matrix::Identity(3, 3)).norm();
    verdict(c, !res.ineffective);
  });

  functoriality(r, "effect_functoriality_pole", m.space, [&](Rng&) { return pole; });
  functoriality(r, "effect_functoriality_origin", m.space, [](Rng&) { return Vector(Vector::Zero(3)); });

  r.check("orbit_map_not_injective", "distinct circles all land in the orbit of the pole", [&](CheckRecord& c, Rng& rng) {
    std::vector<std::pair<Vector, Vector>> pairs;
    for (std::size_t i = 0; i < r.n().points; ++i) pairs.emplace_back(m.plane->sample_point(rng), m.plane->sample_point(rng));
    const OrbitMapReport rep = orbit_map_check(*m.direct, pairs, sample_points(*m.space, rng, r.n().points), r.tol());
    c.deviation = static_cast<double>(rep.injectivity_failures);
    c.witnesses["injectivity_failures"] = rep.injectivity_failures;
    c.witnesses["surjective"] = to_string(rep.surjective);
    expect_tri(c, rep.injective, Tri::False);
  });

  r.check("model_isomorphism_fails", "lambda = 0, so the effective models are not isomorphic",
          [&](CheckRecord& c, Rng& rng) {
            std::vector<IsotropySample> dom;
            std::vector<std::vector<Arrow>> cod;
            for (std::size_t i = 0; i < r.n().obstruction; ++i) {
              const Vector x = i == 0 ? origin2 : m.plane->sample_point(rng);
              dom.push_back({x, isotropy_at(*m.plane, rng, x, 3)});
              cod.push_back(isotropy_at(*m.space, rng, pole, 3));
            }
            const ModelIsomorphismReport rep = model_isomorphism_check(*m.direct, dom, cod, r.tol());
            c.witnesses["singular_lambdas"] = rep.singular_lambdas;
            expect_tri(c, rep.isomorphic, Tri::False);
          });

  const PointSampler plane_points = with_special(*m.plane, {origin2});
  intertwining(r, "intertwining_direct", m.direct, plane_points);
  intertwining(r, "intertwining_twisted", m.twisted, plane_points);
  functoriality(r, "effect_functoriality_plane", m.plane, plane_points);
  fd_action(r, "plane", m.plane, plane_points);
  fd_action(r, "space", m.space, [&](Rng& rng) { return m.space->sample_point(rng); });
  fd_hom(r, "direct", m.direct, plane_points);
  fd_hom(r, "twisted", m.twisted, plane_points);
}

// ---------------------------------------------------------------------------
// ex2b: the circle quotient and the homs (theta; z, t) -> R_z(+-omega(t) theta)

void run_ex2b(Runner& r) {
  const FrequencyProfile omega = r.frequency("omega");
  const int s0 = r.sign_of("phi0");
  const int s1 = r.sign_of("phi1");
  const double delta = r.real("delta");
  const auto m = models::circle_quotient(omega, s0, s1);
  const bool agree_at_zero = s0 * omega.value(0.0) == s1 * omega.value(0.0);
  const QuotientGroupoid& q = *m.quotient;

  // Points off the axis where the kernel is discrete and nontrivial.
  auto generic_point = [&](Rng& rng) {
    for (;;) {
      const double t = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.01, 2.0);
      if (std::abs(omega.value(t)) < 1e-3) continue;
      Vector x(3);
      x << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), t;
      if (x.head(2).norm() < 0.1) continue;
      return x;
    }
  };
  auto axis_point = [&](Rng& rng) {
    for (;;) {
      const double t = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.1, 2.0);
      if (std::abs(omega.value(t)) >= 1e-3) return vec({0.0, 0.0, t});
    }
  };
  auto zero_slice = [](Rng& rng) { return vec({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), 0.0}); };

  r.check("kernel_arrows_ineffective", "whole turns off the axis are ineffective in the quotient",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            for (std::size_t i = 0; i < r.n().points; ++i) {
              const Vector x = generic_point(rng);
              const double turns = static_cast<double>(1 + rng.index(3));
              const double period = *q.kernel().period(x(2));
              ok = ok && q.kernel().contains(turns * period, x(2), r.tol());
              const auto res = is_ineffective(q, q.make_class(turns * period, x), r.tol());
              ok = ok && res.ineffective;
              c.deviation = std::max(c.deviation, res.deviation);
            }
            c.witnesses["points"] = r.n().points;
            verdict(c, ok && c.deviation < 1e-6);
          });

  r.check("kernel_normalization", "normalization is idempotent and constant along kernel cosets",
          [&](CheckRecord& c, Rng& rng) {
            for (std::size_t i = 0; i < r.n().points; ++i) {
              const Vector x = generic_point(rng);
              const double theta = rng.uniform(-10.0, 10.0);
              const auto& kern = q.kernel();
              const double a = kern.normalize(theta, x(2), r.tol());
              const double b = kern.normalize(a, x(2), r.tol());
              const double shifted = kern.normalize(theta + 2 * *kern.period(x(2)), x(2), r.tol());
              const double period = *kern.period(x(2));
              // Distances on the circle of circumference `period`.
              auto circ = [period](double u, double v) {
                const double d = std::fmod(std::abs(u - v), period);
                return std::min(d, period - d);
              };
              c.deviation = std::max({c.deviation, std::abs(a - b), circ(a, shifted)});
            }
            verdict(c, c.deviation <= r.tol().map_abs_tol);
          });

  auto congruence_arrows = [&](Rng& rng) {
    std::vector<Arrow> out;
    for (std::size_t i = 0; i < r.n().arrows; ++i) {
      const Vector x = i % 2 == 0 ? zero_slice(rng) : q.sample_point(rng);
      out.push_back(q.sample_arrow(rng, x));
    }
    return out;
  };

  r.check("unit_congruence", "the unit-valued transformation is a congruence exactly when phi0(0) = phi1(0)",
          [&](CheckRecord& c, Rng& rng) {
            const CongruenceResult res = natural_congruence_check(unit_tau(m.first, CongruenceMode::Congruence),
                                                                  *m.first, *m.second, congruence_arrows(rng), r.tol());
            c.deviation = res.max_deviation;
            c.witnesses["result"] = congruence_json(res);
            c.witnesses["phi_agree_at_zero"] = agree_at_zero;
            verdict(c, !res.rejected && res.passed == agree_at_zero);
          });

  struct AxisSample {
    Vector x;
    double theta;
  };
  auto axis_samples = [&](Rng& rng) {
    std::vector<AxisSample> out;
    while (out.size() < r.n().obstruction) {
      const Vector x = axis_point(rng);
      const double theta = rng.uniform(-kPi, kPi);
      const double gap = (s0 - s1) * omega.value(x(2)) * theta;
      if (s0 != s1 && std::abs(std::sin(gap / 2)) < 0.1) continue;
      out.push_back({x, theta});
    }
    return out;
  };
  auto candidates_at = [](const Vector& x) {
    std::vector<Arrow> out;
    for (int j = 0; j < 360; ++j) out.push_back(make_action_arrow(rot_z(2 * kPi * j / 360.0), x));
    return out;
  };

  r.check("exact_obstruction", "on the axis off t = 0 no stabilizer rotation is an exact witness unless phi0 = phi1",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            Json per_point = Json::array();
            c.deviation = std::numeric_limits<double>::infinity();
            for (const auto& s : axis_samples(rng)) {
              const ObstructionResult res = congruence_obstruction(*m.first, *m.second, s.x, q.make_class(s.theta, s.x),
                                                                   candidates_at(m.first->base_map(s.x)),
                                                                   CongruenceMode::Exact, r.tol());
              const Tri expected = tri(s0 == s1);
              ok = ok && res.witness_found == expected;
              c.deviation = std::min(c.deviation, res.best_deviation);
              per_point.push_back({{"t", s.x(2)},
                                   {"theta", s.theta},
                                   {"witness_found", to_string(res.witness_found)},
                                   {"best_deviation", res.best_deviation}});
            }
            c.witnesses["points"] = per_point;
            verdict(c, ok);
          });

  r.check("congruence_obstruction", "modulo ineffective arrows every stabilizer rotation is a witness off t = 0",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            for (const auto& s : axis_samples(rng)) {
              const ObstructionResult res = congruence_obstruction(*m.first, *m.second, s.x, q.make_class(s.theta, s.x),
                                                                   candidates_at(m.first->base_map(s.x)),
                                                                   CongruenceMode::Congruence, r.tol());
              ok = ok && res.witness_found == Tri::True;
              c.deviation = std::max(c.deviation, res.best_deviation);
            }
            verdict(c, ok);
          });

  // Identity cover of the quotient base; half of the samples sit on t = 0.
  GroupoidHooks cover_hooks;
  cover_hooks.sample_point = [&](Rng& rng) { return rng.coin() ? zero_slice(rng) : q.sample_point(rng); };
  cover_hooks.sample_arrow = [&](Rng& rng, const Vector& u) {
    const Arrow h = q.sample_arrow(rng, u);
    return Arrow{PullbackArrow{q.target(h), share(h), u}};
  };
  const BaseMap identity_cover{[](const Vector& x) { return x; },
                               [](const Vector&) { return Matrix(Matrix::Identity(3, 3)); }};
  auto axiom_III_input = [&](std::function<Arrow(const Vector&)> tau) {
    AxiomIIIInput in;
    in.first = m.first;
    in.second = m.second;
    in.phi = identity_hom(m.space);
    in.tau_prime = unit_tau(m.first, CongruenceMode::Congruence);
    in.cover = identity_cover;
    in.cover_dim = 3;
    in.cover_hooks = cover_hooks;
    in.tau = {std::move(tau), CongruenceMode::Congruence};
    return in;
  };
  auto axiom_III_json = [](const AxiomIIIReport& rep) {
    Json j;
    j["verified"] = to_string(rep.verified);
    j["lifted"] = congruence_json(rep.lifted);
    j["lift_consistency"] = rep.lift_consistency;
    j["points"] = rep.points;
    j["faithful_samples"] = rep.faithful_samples;
    j["faithful_violations"] = rep.faithful_violations;
    if (!rep.reason.empty()) j["reason"] = rep.reason;
    return j;
  };

  r.check("axiom_III_unit", "the unit lift over the identity cover verifies exactly when phi0(0) = phi1(0)",
          [&](CheckRecord& c, Rng& rng) {
            const auto space = m.space;
            const auto first = m.first;
            const AxiomIIIReport rep = axiom_III_instance(
                axiom_III_input([space, first](const Vector& u) { return space->unit(first->base_map(u)); }), rng,
                r.n().points, r.tol());
            c.deviation = std::max(rep.lifted.max_deviation, rep.lift_consistency);
            c.witnesses["report"] = axiom_III_json(rep);
            c.witnesses["phi_agree_at_zero"] = agree_at_zero;
            expect_tri(c, rep.verified, tri(agree_at_zero));
          });

  r.check("axiom_III_corrupted", "a lift offset by R_x(delta) at t = 0 is rejected", [&](CheckRecord& c, Rng& rng) {
    const auto space = m.space;
    const auto first = m.first;
    const AxiomIIIReport rep = axiom_III_instance(axiom_III_input([space, first, delta](const Vector& u) {
                                                    const Vector y = first->base_map(u);
                                                    if (u(2) == 0.0) return make_action_arrow(rot_x(delta), y);
                                                    return space->unit(y);
                                                  }),
                                                  rng, r.n().points, r.tol());
    c.deviation = rep.lift_consistency;
    c.witnesses["report"] = axiom_III_json(rep);
    expect_tri(c, rep.verified, Tri::False);
  });

  r.check("span_equivalence_at_zero", "spans with legs phi0 and phi1 are equivalent through units exactly when phi0(0) = phi1(0)",
          [&](CheckRecord& c, Rng& rng) {
            const HomPtr id = identity_hom(m.quotient);
            const SampleBudget budget;
            const Span first = make_span(m.first, id, rng, r.tol(), budget);
            const Span second = make_span(m.second, id, rng, r.tol(), budget);
            std::vector<Arrow> arrows;
            for (std::size_t i = 0; i < r.n().points; ++i) arrows.push_back(q.sample_arrow(rng, zero_slice(rng)));
            SpanBridge bridge{id, id, unit_tau(m.first, CongruenceMode::Congruence),
                              unit_tau(id, CongruenceMode::Exact)};
            const SpanEquivalenceReport rep = span_equivalence_check(first, second, bridge, arrows, rng, r.tol(), budget);
            if (rep.left) {
              c.deviation = rep.left->max_deviation;
              c.witnesses["left"] = congruence_json(*rep.left);
            }
            if (rep.right) c.witnesses["right"] = congruence_json(*rep.right);
            c.witnesses["through_in_E"] = to_string(rep.through_in_E);
            expect_tri(c, rep.equivalent, tri(agree_at_zero));
          });

  const PointSampler quotient_points = [&](Rng& rng) { return rng.coin() ? zero_slice(rng) : q.sample_point(rng); };
  functoriality(r, "effect_functoriality_quotient", m.quotient, quotient_points);
  axioms(r, "quotient_axioms", m.quotient);
  intertwining(r, "intertwining_first", m.first, quotient_points);
  intertwining(r, "intertwining_second", m.second, quotient_points);
  intertwining(r, "intertwining_projection", m.projection, quotient_points);
  fd_action(r, "rotation", m.base, [&](Rng& rng) { return m.base->sample_point(rng); });
  fd_hom(r, "first", m.first, quotient_points);
  fd_hom(r, "second", m.second, quotient_points);
  fd_hom(r, "projection", m.projection, [&](Rng& rng) { return m.base->sample_point(rng); });
}

// ---------------------------------------------------------------------------
// ex3: the trivial circle bundle and its power endomorphisms

void run_ex3(Runner& r) {
  const int kmax = r.integer("kmax");
  const auto bundle = models::circle_bundle();
  std::map<int, HomPtr> endos;
  for (int k = -kmax; k <= kmax; ++k) endos[k] = models::power_endomorphism(bundle, k);
  const PointSampler points = [&](Rng& rng) { return bundle->sample_point(rng); };

  r.check("all_arrows_ineffective", "every arrow of the bundle has trivial effect", [&](CheckRecord& c, Rng& rng) {
    bool ok = true;
    for (std::size_t i = 0; i < r.n().arrows; ++i) {
      const Vector x = bundle->sample_point(rng);
      const auto res = is_ineffective(*bundle, bundle->sample_arrow(rng, x), r.tol());
      ok = ok && res.ineffective;
      c.deviation = std::max(c.deviation, res.deviation);
    }
    c.witnesses["arrows"] = r.n().arrows;
    verdict(c, ok && c.deviation < 1e-10);
  });

  r.check("endomorphism_congruence", "any two power endomorphisms are congruent through units",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            Json pairs = Json::array();
            for (std::size_t i = 0; i < r.n().obstruction; ++i) {
              const int a = static_cast<int>(rng.index(2 * kmax + 1)) - kmax;
              const int b = static_cast<int>(rng.index(2 * kmax + 1)) - kmax;
              std::vector<Arrow> arrows;
              for (std::size_t j = 0; j < r.n().points; ++j) arrows.push_back(bundle->sample_arrow(rng, points(rng)));
              const CongruenceResult res = natural_congruence_check(unit_tau(endos[a], CongruenceMode::Congruence),
                                                                    *endos[a], *endos[b], arrows, r.tol());
              ok = ok && res.passed && !res.rejected;
              c.deviation = std::max(c.deviation, res.max_deviation);
              pairs.push_back({a, b});
            }
            c.witnesses["pairs"] = pairs;
            verdict(c, ok);
          });

  r.check("endomorphism_span_equivalence", "the span (g^kmax, id) is equivalent to (id, id)", [&](CheckRecord& c, Rng& rng) {
    const HomPtr id = identity_hom(bundle);
    const SampleBudget budget;
    const Span first = make_span(endos[kmax], id, rng, r.tol(), budget);
    const Span second = make_span(id, id, rng, r.tol(), budget);
    std::vector<Arrow> arrows;
    for (std::size_t i = 0; i < r.n().points; ++i) arrows.push_back(bundle->sample_arrow(rng, points(rng)));
    SpanBridge bridge{id, id, unit_tau(endos[kmax], CongruenceMode::Congruence), unit_tau(id, CongruenceMode::Exact)};
    const SpanEquivalenceReport rep = span_equivalence_check(first, second, bridge, arrows, rng, r.tol(), budget);
    if (rep.left) {
      c.deviation = rep.left->max_deviation;
      c.witnesses["left"] = congruence_json(*rep.left);
    }
    if (rep.right) c.witnesses["right"] = congruence_json(*rep.right);
    c.witnesses["through_in_E"] = to_string(rep.through_in_E);
    expect_tri(c, rep.equivalent, Tri::True);
  });

  r.check("classification", "power endomorphisms preserve ineffective arrows", [&](CheckRecord& c, Rng& rng) {
    Json per = Json::object();
    bool ok = true;
    for (const auto& [k, hom] : endos) {
      const HomClassification cl = classify(*hom, sample_points(*bundle, rng, r.n().obstruction), rng, r.tol());
      const std::string bad = classification_inconsistency(cl);
      ok = ok && bad.empty() && cl.in_dotted_category == Tri::True;
      per[std::to_string(k)] = to_string(cl.in_dotted_category);
    }
    c.witnesses["in_dotted_category"] = per;
    verdict(c, ok);
  });

  r.check("intertwining_endomorphisms", "every power endomorphism intertwines effects", [&](CheckRecord& c, Rng& rng) {
    for (const auto& [k, hom] : endos) {
      for (std::size_t i = 0; i < r.n().intertwining; i += 5) {
        const Vector x = points(rng);
        c.deviation = std::max(c.deviation, intertwining_check(*hom, x, isotropy_at(*bundle, rng, x, 5), r.tol()));
      }
    }
    c.witnesses["endomorphisms"] = endos.size();
    verdict(c, c.deviation < r.tol().map_abs_tol);
  });

  functoriality(r, "effect_functoriality_bundle", bundle, points);

  r.check("endomorphism_jacobians_fd", "analytic Jacobians of every endomorphism agree with central differences",
          [&](CheckRecord& c, Rng& rng) {
            for (const auto& [k, hom] : endos) {
              for (std::size_t i = 0; i < r.n().jacobian; ++i) {
                const Vector x = points(rng);
                const auto base = base_jacobian_fd_residual(*hom, x, r.tol());
                const auto arrow = arrow_jacobian_fd_residual(*hom, bundle->sample_arrow(rng, x), r.tol());
                if (!base || !arrow) throw PreconditionError("bundle charts are expected to be flat");
                c.deviation = std::max({c.deviation, *base, *arrow});
              }
            }
            c.witnesses["points_per_endomorphism"] = r.n().jacobian;
            verdict(c, c.deviation <= r.tol().fd_abs_tol);
          });
}

// ---------------------------------------------------------------------------
// ex4: the half-turn kernel against the whole-turn kernel

void run_ex4(Runner& r) {
  const FrequencyProfile omega = r.frequency("omega");
  const double scale = r.real("scale");
  const RotationKernel whole(omega, 1.0);
  const RotationKernel part(omega, scale);
  const auto base = models::circle_quotient(omega, 1, 1).base;

  auto generic_point = [&](Rng& rng) {
    for (;;) {
      const double t = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.01, 2.0);
      if (std::abs(omega.value(t)) < 1e-3) continue;
      Vector x(3);
      x << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), t;
      if (x.head(2).norm() < 0.1) continue;
      return x;
    }
  };

  r.check("strict_containment", "a period of the scaled kernel is not a whole turn", [&](CheckRecord& c, Rng& rng) {
    const Vector fixed = vec({1.0, 0.0, 3.0});
    std::vector<Vector> pts{fixed};
    for (std::size_t i = 0; i < r.n().points; ++i) pts.push_back(generic_point(rng));
    bool ok = true;
    for (const auto& x : pts) {
      const auto period = part.period(x(2));
      if (!period) throw PreconditionError("omega vanishes at a sampled point");
      const double normalized = whole.normalize(*period, x(2), r.tol());
      ok = ok && part.contains(*period, x(2), r.tol()) && !whole.contains(*period, x(2), r.tol()) && normalized != 0.0;
      if (&x == &pts.front()) {
        c.deviation = normalized;
        c.witnesses["arrow"] = {{"theta", *period}, {"point", to_json(fixed)}};
        c.witnesses["whole_turn_normalization"] = normalized;
      }
    }
    c.witnesses["points"] = pts.size();
    verdict(c, ok);
  });

  r.check("kernel_contains_units", "the scaled kernel contains every unit", [&](CheckRecord& c, Rng& rng) {
    bool ok = true;
    for (std::size_t i = 0; i < r.n().points; ++i) ok = ok && part.contains(0.0, generic_point(rng)(2), r.tol());
    ok = ok && part.contains(0.0, 0.0, r.tol());
    verdict(c, ok);
  });

  auto isotropy_defect = [&](const RotationKernel& kern, Rng& rng, CheckRecord& c) {
    for (std::size_t i = 0; i < r.n().points; ++i) {
      const Vector x = generic_point(rng);
      const double period = *kern.period(x(2));
      for (int turns = -3; turns <= 3; ++turns) {
        const Arrow a = make_action_arrow(additive_element(turns * period), x);
        c.deviation = std::max(c.deviation, (base->target(a) - base->source(a)).norm());
      }
    }
    c.witnesses["points"] = r.n().points;
    verdict(c, c.deviation <= r.tol().map_abs_tol);
  };
  r.check("kernel_totally_isotropic", "every arrow of the scaled kernel fixes its base point",
          [&](CheckRecord& c, Rng& rng) { isotropy_defect(part, rng, c); });
  r.check("whole_turn_kernel_totally_isotropic", "every arrow of the whole-turn kernel fixes its base point",
          [&](CheckRecord& c, Rng& rng) { isotropy_defect(whole, rng, c); });

  r.check("kernel_conjugation_stable", "conjugating a kernel arrow by any arrow stays in the kernel",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            for (std::size_t i = 0; i < r.n().points; ++i) {
              const Vector x = generic_point(rng);
              const double theta = static_cast<double>(static_cast<int>(rng.index(7)) - 3) * *part.period(x(2));
              const Arrow k = make_action_arrow(additive_element(theta), x);
              const double s = rng.uniform(-4.0, 4.0);
              const Arrow g_src = make_action_arrow(additive_element(s), x);
              const Arrow g_tgt = make_action_arrow(additive_element(s), base->target(k));
              const Arrow conj = base->compose(g_tgt, base->compose(k, base->inverse(g_src)));
              const auto& aa = conj.as<ActionArrow>();
              ok = ok && part.contains(additive_value(aa.group), aa.source(2), r.tol());
              c.deviation = std::max(c.deviation, std::abs(additive_value(aa.group) - theta));
            }
            verdict(c, ok);
          });

  fd_action(r, "rotation", base, [&](Rng& rng) { return base->sample_point(rng); });
}

// ---------------------------------------------------------------------------
// weak_equiv: SO(3) on R3 minus the origin pulled back to the radii

void run_weak_equiv(Runner& r) {
  const auto m = models::radial_pullback();
  const auto& pb = *m.pullback;
  const PointSampler radii = [&](Rng& rng) { return pb.sample_point(rng); };
  auto radius_points = [&](Rng& rng, std::size_t count) { return sample_points(pb, rng, count); };

  r.check("transversal_map_bijective", "T(pi) is bijective with condition number below 10", [&](CheckRecord& c, Rng& rng) {
    bool ok = true;
    for (const auto& t : radius_points(rng, r.n().points)) {
      const Matrix tm = transversal_map(*m.projection, t, r.tol()).matrix;
      const bool square = tm.rows() == tm.cols() && tm.rows() > 0;
      const double cond = square ? condition_number(tm) : std::numeric_limits<double>::infinity();
      ok = ok && square && cond < 10.0;
      c.deviation = std::max(c.deviation, cond);
    }
    c.witnesses["points"] = r.n().points;
    verdict(c, ok);
  });

  r.check("ineffectivity_equivalence", "an isotropic arrow is ineffective upstairs exactly when its image is",
          [&](CheckRecord& c, Rng& rng) {
            std::size_t checked = 0, mismatches = 0;
            auto compare = [&](const Arrow& up) {
              const auto a = is_ineffective(pb, up, r.tol());
              const auto b = is_ineffective(*m.punctured, m.projection->apply(up), r.tol());
              ++checked;
              mismatches += a.ineffective != b.ineffective;
              c.deviation = std::max(c.deviation, std::abs(a.deviation - b.deviation));
            };
            // Upstairs samples pushed down.
            for (const auto& t : radius_points(rng, r.n().points)) {
              for (const auto& a : isotropy_at(pb, rng, t, 5)) compare(a);
            }
            // Downstairs samples at arbitrary points, conjugated onto the axis and lifted.
            const auto& witness = m.projection->witnesses().surjectivity;
            for (std::size_t i = 0; i < r.n().points; ++i) {
              const Vector y = m.punctured->sample_point(rng);
              const SurjectivityWitness w = witness(y);
              const Arrow k = require_isotropy(*m.punctured, rng, y);
              const Arrow moved = m.punctured->compose(w.connector, m.punctured->compose(k, m.punctured->inverse(w.connector)));
              const bool down = is_ineffective(*m.punctured, k, r.tol()).ineffective;
              const Arrow up = pb.make_arrow(w.point, moved, w.point);
              const bool lifted = is_ineffective(pb, up, r.tol()).ineffective;
              ++checked;
              mismatches += down != lifted;
            }
            c.witnesses["arrows"] = checked;
            c.witnesses["mismatches"] = mismatches;
            verdict(c, mismatches == 0);
          });

  r.check("orbit_map_bijective", "radii correspond to spheres", [&](CheckRecord& c, Rng& rng) {
    std::vector<std::pair<Vector, Vector>> pairs;
    for (std::size_t i = 0; i < r.n().points; ++i) {
      const Vector t = pb.sample_point(rng);
      pairs.emplace_back(t, rng.coin() ? t : pb.sample_point(rng));
    }
    const OrbitMapReport rep =
        orbit_map_check(*m.projection, pairs, sample_points(*m.punctured, rng, r.n().points), r.tol());
    c.deviation = static_cast<double>(rep.injectivity_failures + rep.surjectivity_failures);
    c.witnesses["injective"] = to_string(rep.injective);
    c.witnesses["surjective"] = to_string(rep.surjective);
    c.witnesses["pairs"] = rep.pairs;
    c.witnesses["codomain_points"] = rep.codomain_points;
    verdict(c, rep.injective == Tri::True && rep.surjective == Tri::True);
  });

  r.check("classification", "pi is a weak equivalence in class E", [&](CheckRecord& c, Rng& rng) {
    const HomClassification cl = classify(*m.projection, radius_points(rng, r.n().points), rng, r.tol());
    c.witnesses["flags"] = flags_json(cl);
    const std::string bad = classification_inconsistency(cl);
    if (!bad.empty()) c.witnesses["inconsistency"] = bad;
    c.deviation = cl.max_condition_number;
    verdict(c, bad.empty() && cl.weak_equivalence == Tri::True && cl.in_E == Tri::True);
  });

  r.check("natural_isomorphism_effect", "the rotation tau carries T(pi) onto T of the rotated projection",
          [&](CheckRecord& c, Rng& rng) {
            const NaturalTransformationWitness tau{m.rotation, CongruenceMode::Exact};
            const auto pts = radius_points(rng, r.n().points);
            const double eff = natural_transformation_effect_check(tau, *m.projection, *m.rotated, pts, r.tol());
            std::vector<Arrow> arrows;
            for (const auto& t : pts) arrows.push_back(pb.sample_arrow(rng, t));
            const CongruenceResult res = natural_congruence_check(tau, *m.projection, *m.rotated, arrows, r.tol());
            c.deviation = std::max(eff, res.max_deviation);
            c.witnesses["effect_residual"] = eff;
            c.witnesses["exact"] = congruence_json(res);
            verdict(c, eff < r.tol().map_abs_tol && res.passed && !res.rejected);
          });

  r.check("skeleton_projection", "at t = 1 lambda = [1] and theta is all identity", [&](CheckRecord& c, Rng& rng) {
    const Vector t = vec({1.0});
    const SkeletonPoint sk = skeleton_point(*m.projection, t, isotropy_at(pb, rng, t, 5), r.tol());
    if (sk.lambda.rows() != 1 || sk.lambda.cols() != 1) throw InternalConsistencyError("lambda is not 1 x 1");
    c.deviation = std::abs(sk.lambda(0, 0) - 1.0);
    for (const auto& row : sk.theta) {
      c.deviation = std::max({c.deviation, (row.source_effect - Matrix::Identity(1, 1)).norm(),
                              (row.target_effect - Matrix::Identity(1, 1)).norm()});
    }
    c.witnesses["lambda"] = to_json(sk.lambda);
    c.witnesses["theta_rows"] = sk.theta.size();
    verdict(c, c.deviation <= r.tol().map_abs_tol);
  });

  r.check("skeleton_functoriality", "skeleton of inclusion after pi equals the composed skeletons",
          [&](CheckRecord& c, Rng& rng) {
            const HomPtr both = composite({m.projection, m.inclusion});
            for (const auto& t : radius_points(rng, r.n().obstruction)) {
              const auto iso = isotropy_at(pb, rng, t, 5);
              std::vector<Arrow> images;
              for (const auto& a : iso) images.push_back(m.projection->apply(a));
              const SkeletonPoint p = skeleton_point(*m.projection, t, iso, r.tol());
              const SkeletonPoint q = skeleton_point(*m.inclusion, p.y, images, r.tol());
              const SkeletonPoint direct = skeleton_point(*both, t, iso, r.tol());
              c.deviation = std::max(c.deviation, skeleton_distance(skeleton_compose(p, q, r.tol()), direct, r.tol()));
            }
            verdict(c, c.deviation < r.tol().map_abs_tol);
          });

  r.check("skeleton_equivalence", "skeletons at rotated points match through the rotation; a doubled lambda does not",
          [&](CheckRecord& c, Rng& rng) {
            const HomPtr id = identity_hom(m.punctured);
            const Vector x = m.punctured->sample_point(rng);
            const Matrix rot = random_rotation3(rng);
            const Vector x2 = rot * x;
            const auto iso = isotropy_at(*m.punctured, rng, x, 5);
            std::vector<Arrow> moved;
            for (const auto& a : iso) {
              moved.push_back(make_action_arrow(rot * a.as<ActionArrow>().group * rot.transpose(), x2));
            }
            const SkeletonPoint p = skeleton_point(*id, x, iso, r.tol());
            const SkeletonPoint q = skeleton_point(*id, x2, moved, r.tol());
            const Arrow g = make_action_arrow(rot, x);
            const SkeletonEquivalenceReport same = skeleton_equivalence_check(p, q, *m.punctured, *m.punctured, g, g, r.tol());
            SkeletonPoint scaled = q;
            scaled.lambda *= 2.0;
            const SkeletonEquivalenceReport off =
                skeleton_equivalence_check(p, scaled, *m.punctured, *m.punctured, g, g, r.tol());
            c.deviation = std::max(same.lambda_deviation, same.theta_deviation);
            c.witnesses["rotated"] = {{"equivalent", to_string(same.equivalent)}, {"matched", same.matched}};
            c.witnesses["scaled"] = {{"equivalent", to_string(off.equivalent)},
                                     {"lambda_deviation", off.lambda_deviation},
                                     {"lambda_norm", q.lambda.norm()}};
            verdict(c, same.equivalent == Tri::True && off.equivalent == Tri::False);
          });

  r.check("model_isomorphism", "pi identifies the effective infinitesimal models", [&](CheckRecord& c, Rng& rng) {
    std::vector<IsotropySample> dom;
    std::vector<std::vector<Arrow>> cod;
    for (const auto& t : radius_points(rng, r.n().obstruction)) {
      dom.push_back({t, isotropy_at(pb, rng, t, 5)});
      cod.push_back(isotropy_at(*m.punctured, rng, m.projection->base_map(t), 5));
    }
    const ModelIsomorphismReport rep = model_isomorphism_check(*m.projection, dom, cod, r.tol());
    c.deviation = rep.max_condition_number;
    c.witnesses["non_injective"] = rep.non_injective;
    c.witnesses["non_surjective"] = rep.non_surjective;
    expect_tri(c, rep.isomorphic, Tri::True);
  });

  axioms(r, "pullback_axioms", m.pullback);

  // The weak pullback of the planar hom along pi, shared by the next checks.
  std::optional<AxiomIIReport> axiom_II;
  r.check("axiom_II_weak_pullback_axioms", "the weak pullback satisfies the structure laws", [&](CheckRecord& c, Rng& rng) {
    AxiomIIOptions opts;
    opts.fuzz_samples = r.samples();
    opts.preservation_points = r.n().preservation;
    opts.isotropy_per_point = 1;
    opts.seed = child_seed(rng);
    axiom_II = axiom_II_instance(m.planar, m.projection, rng, r.tol(), opts);
    const AxiomReport& a = axiom_II->structure;
    c.deviation = a.worst();
    c.witnesses["samples"] = a.samples;
    c.witnesses["associativity"] = a.associativity;
    c.witnesses["unit_laws"] = a.unit_laws;
    c.witnesses["inverse_laws"] = a.inverse_laws;
    c.witnesses["target_of_inverse"] = a.target_of_inverse;
    c.witnesses["phi_transversal"] = to_string(axiom_II->phi_transversal);
    c.witnesses["verified"] = to_string(axiom_II->verified);
    verdict(c, c.deviation < r.tol().map_abs_tol);
  });
  r.check("axiom_II_left_projection_in_E", "the projection to the planar factor lies in class E",
          [&](CheckRecord& c, Rng&) {
            if (!axiom_II) throw PreconditionError("weak pullback was not built");
            c.witnesses["flags"] = flags_json(axiom_II->left_projection);
            expect_tri(c, axiom_II->left_projection.in_E, Tri::True);
          });
  r.check("axiom_II_right_preservation", "the projection to the pullback factor preserves ineffective arrows",
          [&](CheckRecord& c, Rng&) {
            if (!axiom_II) throw PreconditionError("weak pullback was not built");
            const PreservationReport& pr = axiom_II->right_preservation;
            c.deviation = pr.worst_image_deviation;
            c.witnesses["arrows"] = pr.arrows;
            c.witnesses["dotted_violations"] = pr.dotted_violations;
            expect_tri(c, pr.in_dotted_category, Tri::True);
          });

  r.check("weak_pullback_effect_transport", "chart effects agree with effects transported through the projections",
          [&](CheckRecord& c, Rng& rng) {
            if (!axiom_II) throw PreconditionError("weak pullback was not built");
            for (const auto& t : radius_points(rng, r.n().obstruction)) {
              for (const auto& a : isotropy_at(pb, rng, t, 3)) {
                c.deviation = std::max(
                    c.deviation, (effect(pb, a, r.tol()).map.matrix - transported_effect(*m.projection, a, r.tol())).norm());
              }
            }
            const auto& z = *axiom_II->pullback.groupoid;
            for (std::size_t i = 0; i < r.n().obstruction; ++i) {
              const Vector p = z.sample_point(rng);
              const Arrow a = require_isotropy(z, rng, p);
              c.deviation =
                  std::max(c.deviation, (effect(z, a, r.tol()).map.matrix -
                                         transported_effect(*axiom_II->pullback.left_projection, a, r.tol()))
                                            .norm());
            }
            verdict(c, c.deviation < r.tol().map_abs_tol);
          });

  r.check("span_identity_composition", "composing identity spans keeps the right leg in class E",
          [&](CheckRecord& c, Rng& rng) {
            const HomPtr id = identity_hom(m.punctured);
            const Span s = make_span(id, id, rng, r.tol());
            const SpanComposition comp = compose_spans(s, s, rng, r.tol());
            c.witnesses["flags"] = flags_json(comp.span.right_class);
            expect_tri(c, comp.span.right_class.in_E, Tri::True);
          });

  r.check("span_composition", "(planar, id) composed with (id, pi) has a class-E right leg and a lawful apex",
          [&](CheckRecord& c, Rng& rng) {
            const Span outer = make_span(m.planar, identity_hom(m.plane), rng, r.tol());
            const Span inner = make_span(identity_hom(m.pullback), m.projection, rng, r.tol());
            const SpanComposition comp = compose_spans(outer, inner, rng, r.tol());
            const AxiomReport a = check_groupoid_axioms(*comp.apex.groupoid, r.n().points, child_seed(rng));
            c.deviation = a.worst();
            c.witnesses["flags"] = flags_json(comp.span.right_class);
            verdict(c, comp.span.right_class.in_E == Tri::True && c.deviation < r.tol().map_abs_tol);
          });

  r.check("span_associativity", "(A B) C and A (B C) are equivalent for identity spans", [&](CheckRecord& c, Rng& rng) {
    const HomPtr id = identity_hom(m.punctured);
    const Span s = make_span(id, id, rng, r.tol());
    const SpanComposition ab = compose_spans(s, s, rng, r.tol());
    const SpanComposition ab_c = compose_spans(ab.span, s, rng, r.tol());
    const SpanComposition a_bc = compose_spans(s, ab.span, rng, r.tol());
    // Diagonals x -> (x, 1, x) into each apex.
    const HomPtr into_ab = pairing_hom(ab.apex.groupoid, id, id);
    const HomPtr to_first = pairing_hom(ab_c.apex.groupoid, into_ab, id);
    const HomPtr to_second = pairing_hom(a_bc.apex.groupoid, id, into_ab);
    SpanBridge bridge{to_first, to_second, unit_tau(composite({to_first, ab_c.span.left}), CongruenceMode::Exact),
                      unit_tau(composite({to_first, ab_c.span.right}), CongruenceMode::Exact)};
    std::vector<Arrow> arrows;
    for (std::size_t i = 0; i < r.n().points; ++i) {
      arrows.push_back(m.punctured->sample_arrow(rng, m.punctured->sample_point(rng)));
    }
    const SpanEquivalenceReport rep = span_equivalence_check(ab_c.span, a_bc.span, bridge, arrows, rng, r.tol());
    if (rep.left) {
      c.deviation = rep.left->max_deviation;
      c.witnesses["left"] = congruence_json(*rep.left);
    }
    if (rep.right) {
      c.deviation = std::max(c.deviation, rep.right->max_deviation);
      c.witnesses["right"] = congruence_json(*rep.right);
    }
    c.witnesses["through_in_E"] = to_string(rep.through_in_E);
    expect_tri(c, rep.equivalent, Tri::True);
  });

  const auto wp = build_weak_pullback(m.planar, m.projection);
  const PointSampler plane_points = [&](Rng& rng) { return m.plane->sample_point(rng); };
  const PointSampler punctured_points = [&](Rng& rng) { return m.punctured->sample_point(rng); };
  const PointSampler apex_points = [&](Rng& rng) { return wp.groupoid->sample_point(rng); };
  intertwining(r, "intertwining_projection", m.projection, radii);
  intertwining(r, "intertwining_rotated", m.rotated, radii);
  intertwining(r, "intertwining_inclusion", m.inclusion, punctured_points);
  intertwining(r, "intertwining_planar", m.planar, plane_points);
  intertwining(r, "intertwining_apex_left", wp.left_projection, apex_points);
  intertwining(r, "intertwining_apex_right", wp.right_projection, apex_points);
  functoriality(r, "effect_functoriality_pullback", m.pullback, radii);
  functoriality(r, "effect_functoriality_punctured", m.punctured, punctured_points);
  fd_action(r, "punctured", m.punctured, punctured_points);
  fd_action(r, "plane", m.plane, plane_points);
  fd_hom(r, "projection", m.projection, radii, false);
  fd_hom(r, "rotated", m.rotated, radii, false);
  fd_hom(r, "inclusion", m.inclusion, punctured_points);
  fd_hom(r, "planar", m.planar, plane_points);
}

// ---------------------------------------------------------------------------
// custom: generic checks for one of the bundled actions

void run_custom(Runner& r) {
  const std::string group = r.text("group");
  std::shared_ptr<const TranslationGroupoid> g;
  std::vector<Vector> special;
  if (group == "rotation") {
    g = models::circle_quotient(r.frequency("omega"), 1, 1).base;
    special = {Vector::Zero(3), vec({0.0, 0.0, 1.0})};
  } else {
    GroupoidHooks hooks;
    const int dim = group == "so2" || group == "o2" ? 2 : 3;
    hooks.sample_point = models::box_sampler(dim, 2.0);
    if (group == "so2") hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so2);
    if (group == "o2") hooks.sample_isotropy = stabilizer_isotropy(stabilizer_o2);
    if (group == "so3") hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so3);
    if (group == "so3_axis") hooks.sample_isotropy = stabilizer_isotropy(stabilizer_so3_axis_preserving);
    const LieGroupModel model = group == "so2" ? so2() : group == "o2" ? o2() : group == "so3" ? so3() : so3_axis_preserving();
    g = build_translation(model, linear_action(dim), hooks);
    special = {Vector::Zero(dim)};
    if (dim == 3) special.push_back(vec({0.0, 0.0, 1.0}));
  }
  const PointSampler points = with_special(*g, special);

  axioms(r, "axioms", g);
  functoriality(r, "effect_functoriality", g, points);

  r.check("transversal_dimensions", "orbit and transversal dimensions add up to the base dimension",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            for (std::size_t i = 0; i < r.n().points; ++i) {
              const TransversalData td = transversal_space(*g, points(rng), r.tol());
              ok = ok && td.longitudinal.dim() + td.quotient.dim() == g->point_dim();
              const Matrix overlap = td.longitudinal.basis().transpose() * td.quotient.complement();
              c.deviation = std::max(c.deviation, overlap.size() == 0 ? 0.0 : overlap.norm());
            }
            verdict(c, ok && c.deviation <= r.tol().map_abs_tol);
          });

  r.check("ineffective_subgroup_closed", "sampled ineffective isotropy is closed under products",
          [&](CheckRecord& c, Rng& rng) {
            bool ok = true;
            for (std::size_t i = 0; i < r.n().obstruction; ++i) {
              const Vector x = points(rng);
              const IsotropyPartition part = ineffective_subgroup_sample(*g, x, isotropy_at(*g, rng, x, 8), r.tol());
              ok = ok && part.closed;
              c.deviation = std::max(c.deviation, part.closure_deviation);
            }
            verdict(c, ok);
          });

  intertwining(r, "intertwining_identity", identity_hom(g), points);
  fd_action(r, "action", g, points);
}

const std::vector<ScenarioEntry>& registry() {
  static const std::vector<ScenarioEntry> entries = {
      {"ex1", "reflections in O(2) x R2 mapped into axis-preserving rotations of R3", {}, run_ex1},
      {"ex2a",
       "the plane collapsed onto the north pole of SO(3) x R3, through A and through A^k",
       {{{"k", "3", "exponent of the twisted group map"}, int_in(-50, 50)}},
       run_ex2a},
      {"ex2b",
       "the circle-action quotient on C x R mapped to the axis of SO(3) x R3",
       {{{"omega", "t", "rotation frequency: t, poly:c0,c1,... or texp:a,b"}, profile()},
        {{"phi0", "+", "sign of the first hom's frequency"}, sign()},
        {{"phi1", "-", "sign of the second hom's frequency"}, sign()},
        {{"delta", "0.5", "offset angle of the corrupted lift at t = 0"}, any_real()}},
       run_ex2b},
      {"ex3",
       "the trivial SO(2) bundle over R and its power endomorphisms",
       {{{"kmax", "3", "largest power |k| sampled"}, int_in(0, 50)}},
       run_ex3},
      {"ex4",
       "the half-turn kernel on the trivial line bundle over R",
       {{{"omega", "t", "rotation frequency: t, poly:c0,c1,... or texp:a,b"}, profile()},
        {{"scale", "0.5", "fraction of a whole turn generating the kernel"}, positive_real()}},
       run_ex4},
      {"weak_equiv", "SO(3) on R3 minus the origin pulled back to the radii", {}, run_weak_equiv},
      {"custom",
       "generic checks for a bundled action groupoid",
       {{{"group", "so3", "so2, o2, so3, so3_axis or rotation"}, group_choice()},
        {{"omega", "t", "frequency for the rotation group"}, profile()}},
       run_custom},
  };
  return entries;
}

std::map<std::string, std::string> resolve_params(const ScenarioConfig& config) {
  const ScenarioEntry& entry = find_entry(config.scenario);
  for (const auto& [key, value] : config.params) {
    auto it = std::find_if(entry.params.begin(), entry.params.end(),
                           [&](const ParamSpec& p) { return p.info.name == key; });
    if (it == entry.params.end()) throw InputError("scenario " + entry.name + " has no parameter '" + key + "'");
    it->validate(key, value);
  }
  std::map<std::string, std::string> out;
  for (const auto& p : entry.params) {
    auto it = config.params.find(p.info.name);
    out[p.info.name] = it == config.params.end() ? p.info.default_value : it->second;
  }
  return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const Json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  static const std::set<std::string> known = {"scenario", "params", "samples", "seed", "tolerances"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InputError("unknown config key '" + key + "'");
  }
  ScenarioConfig c;
  try {
    if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
    if (j.contains("params")) {
      const Json& p = j.at("params");
      if (!p.is_object()) throw InputError("params must be an object");
      for (const auto& [key, value] : p.items()) {
        if (value.is_string()) {
          c.params[key] = value.get<std::string>();
        } else if (value.is_number()) {
          c.params[key] = value.dump();
        } else {
          throw InputError("parameter " + key + " must be a string or a number");
        }
      }
    }
    if (j.contains("samples")) {
      if (!j.at("samples").is_number_unsigned()) throw InputError("samples must be a positive integer");
      c.samples = j.at("samples").get<std::size_t>();
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw InputError("seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("tolerances")) {
      const Json& t = j.at("tolerances");
      if (!t.is_object()) throw InputError("tolerances must be an object");
      for (const auto& [key, value] : t.items()) {
        if (!value.is_number()) throw InputError("tolerance " + key + " must be a number");
        const double v = value.get<double>();
        if (key == "rank_rel_tol") c.tolerance.rank_rel_tol = v;
        else if (key == "map_abs_tol") c.tolerance.map_abs_tol = v;
        else if (key == "fd_abs_tol") c.tolerance.fd_abs_tol = v;
        else if (key == "fd_step") c.tolerance.fd_step = v;
        else throw InputError("unknown tolerance '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed config: ") + e.what());
  }
  return c;
}

void ScenarioConfig::validate() const {
  if (scenario.empty()) throw InputError("no scenario given");
  if (samples == 0) throw InputError("samples must be positive");
  tolerance.validate();
  resolve_params(*this);
}

const std::vector<ScenarioInfo>& list_scenarios() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> out;
    for (const auto& e : registry()) {
      ScenarioInfo info{e.name, e.description, {}};
      for (const auto& p : e.params) info.parameters.push_back(p.info);
      out.push_back(std::move(info));
    }
    return out;
  }();
  return infos;
}

SampleCounts SampleCounts::from(std::size_t n) {
  auto part = [n](std::size_t d) { return std::max<std::size_t>(1, n / d); };
  return {std::max<std::size_t>(1, n), part(2), part(5), part(10), part(20), part(100)};
}

Report run_scenario(const ScenarioConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto params = resolve_params(config);

  Report report;
  report.scenario = config.scenario;
  report.seed = config.seed;
  report.samples = config.samples;
  report.tolerance = config.tolerance;
  for (const auto& p : find_entry(config.scenario).params) report.parameters[p.info.name] = params.at(p.info.name);

  Runner runner(config, std::move(params), report);
  find_entry(config.scenario).run(runner);

  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ge
