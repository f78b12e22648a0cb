// Acceptance harness: one PASS/FAIL line per criterion.
//
//   acceptance                 all criteria
//   acceptance --criterion N   only criterion N
//
// Exit status is 0 when every selected criterion passes.

#include "groupoid_effect/effect.hpp"
#include "groupoid_effect/homs.hpp"
#include "groupoid_effect/lie.hpp"
#include "groupoid_effect/models.hpp"
#include "groupoid_effect/rng.hpp"
#include "groupoid_effect/scenarios.hpp"

#include "oracles.hpp"

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

using namespace ge;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr std::size_t kSamples = 1000;

const std::vector<std::string> kScenarios = {"ex1", "ex2a", "ex2b", "ex3", "ex4", "weak_equiv", "custom"};

Report run(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.samples = kSamples;
  c.seed = kSeed;
  return run_scenario(c);
}

const Report& report(const std::string& scenario) {
  static std::map<std::string, Report> cache;
  auto it = cache.find(scenario);
  if (it == cache.end()) it = cache.emplace(scenario, run(scenario)).first;
  return it->second;
}

// Collects failures; a criterion passes when none were recorded.
class Verdict {
 public:
  void require(bool ok, const std::string& what) {
    ++checked_;
    if (!ok) failures_.push_back(what);
  }

  // Named check must pass with deviation below `tol` (if given).
  const CheckRecord* check(const std::string& scenario, const std::string& name, double tol = -1) {
    const CheckRecord* c = report(scenario).find(name);
    if (!c) {
      require(false, scenario + "/" + name + " missing");
      return nullptr;
    }
    require(c->status == CheckStatus::Pass, scenario + "/" + name + " " + to_string(c->status));
    if (tol >= 0) {
      require(c->deviation < tol, scenario + "/" + name + " deviation " + format_deviation(c->deviation));
    }
    return c;
  }

  void at_least(const Json& value, std::size_t n, const std::string& what) {
    require(value.is_number() && value.get<std::size_t>() >= n, what + " count " + value.dump());
  }

  bool passed() const { return failures_.empty(); }

  std::string summary() const {
    std::ostringstream os;
    os << checked_ << " assertions";
    if (!failures_.empty()) {
      os << ", failed:";
      for (const auto& f : failures_) os << " [" << f << "]";
    }
    return os.str();
  }

 private:
  std::size_t checked_ = 0;
  std::vector<std::string> failures_;
};

Vector v3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

// Reflection on the plane and its image in the axis-preserving rotations.
void criterion_1(Verdict& v) {
  const auto m = models::reflections();
  Matrix flip = Matrix::Identity(2, 2);
  flip(1, 1) = -1;
  const Arrow a = make_action_arrow(flip, Vector::Unit(2, 0));

  const Effect up = effect(*m.plane, a);
  v.require(up.map.matrix.rows() == 1 && std::abs(up.map.matrix(0, 0) - 1.0) < 1e-8, "upstairs effect is [1]");

  const Arrow image = m.hom->apply(a);
  const Matrix& g = image.as<ActionArrow>().group;
  Matrix expected_group = Matrix::Identity(3, 3);
  expected_group(1, 1) = expected_group(2, 2) = -1;
  v.require((g - expected_group).norm() < 1e-12, "image group is diag(1,-1,-1)");
  const Effect down = effect(*m.space, image);
  Matrix jz = Matrix::Zero(3, 3);
  jz(1, 0) = 1;
  jz(0, 1) = -1;
  const auto ref = oracle::linear_effect({jz}, g, v3(1, 0, 0));
  v.require(down.map.matrix.rows() == 2, "downstairs transversal is 2-dimensional");
  v.require(oracle::basis_free_distance(down.map.matrix, down.map.source.complement(), ref.effect,
                                        ref.complement) < 1e-8,
            "downstairs effect matches oracle");
  Matrix diag = Matrix::Identity(2, 2);
  diag(1, 1) = -1;
  const Matrix e1_e3 = (Matrix(3, 2) << 1, 0, 0, 0, 0, 1).finished();
  v.require(oracle::basis_free_distance(down.map.matrix, down.map.source.complement(), diag, e1_e3) < 1e-8,
            "downstairs effect is diag(1,-1) on span{e1, e3}");
  v.require(!is_ineffective(*m.space, image).ineffective, "image is effective");

  const auto pres = ineffective_preservation_check(*m.hom, {{Vector::Unit(2, 0), {a}}});
  v.require(pres.in_dotted_category == Tri::False, "hom flagged outside the dotted category");

  v.check("ex1", "upstairs_effect", 1e-8);
  v.check("ex1", "downstairs_effect", 1e-8);
  v.check("ex1", "not_in_dotted_category");
}

void criterion_2(Verdict& v) {
  if (const auto* c = v.check("ex2a", "unit_congruence")) {
    v.require(c->deviation == 0.0, "unit congruence deviation is exactly 0");
    v.at_least(c->witnesses["result"]["samples"], 1000, "congruence samples");
  }
  if (const auto* c = v.check("ex2a", "exact_obstruction")) {
    v.require(c->witnesses["candidates"] == 360, "360 candidates");
    const auto& points = c->witnesses["points"];
    v.require(points.size() == 10, "10 points");
    for (const auto& p : points) v.require(p["witness_found"] == "false", "no exact witness");
  }
}

void criterion_3(Verdict& v) {
  if (const auto* c = v.check("ex2b", "kernel_arrows_ineffective", 1e-6)) {
    v.require(c->witnesses["points"] == 100, "100 kernel points");
  }
  if (const auto* c = v.check("ex2b", "unit_congruence")) {
    v.require(c->witnesses["phi_agree_at_zero"] == true, "frequencies agree at zero");
    v.require(c->witnesses["result"]["passed"] == true, "congruence holds");
  }
  if (const auto* c = v.check("ex2b", "exact_obstruction")) {
    v.require(!c->witnesses["points"].empty(), "obstruction points");
    for (const auto& p : c->witnesses["points"]) v.require(p["witness_found"] == "false", "no exact witness");
  }
}

void criterion_4(Verdict& v) {
  if (const auto* c = v.check("ex3", "all_arrows_ineffective", 1e-10)) {
    v.at_least(c->witnesses["arrows"], 1000, "bundle arrows");
  }
  if (const auto* c = v.check("ex3", "endomorphism_congruence")) {
    v.require(!c->witnesses["pairs"].empty(), "endomorphism pairs");
  }
}

void criterion_5(Verdict& v) {
  if (const auto* c = v.check("ex4", "strict_containment")) {
    v.require(c->deviation > 1e-6, "normalization of the exhibited arrow is nonzero");
  }
  v.check("ex4", "kernel_contains_units");
  v.check("ex4", "kernel_totally_isotropic");
  v.check("ex4", "kernel_conjugation_stable");
}

void criterion_6(Verdict& v) {
  // Direct cross-check against the linear oracle at the pole and the origin.
  const auto pole = models::pole_collapse(3);
  const auto& space = *pole.space;
  Rng rng(kSeed);
  const Vector e3 = v3(0, 0, 1);
  std::vector<std::pair<Arrow, Arrow>> at_pole, at_origin;
  double oracle_gap = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double b = rng.uniform(-std::numbers::pi, std::numbers::pi);
    at_pole.emplace_back(make_action_arrow(oracle::rot_z(a), e3), make_action_arrow(oracle::rot_z(b), e3));
    at_origin.emplace_back(make_action_arrow(random_rotation3(rng), Vector::Zero(3)),
                           make_action_arrow(random_rotation3(rng), Vector::Zero(3)));
    if (i % 10 == 0) {
      const Arrow composite = make_action_arrow(oracle::rot_z(a) * oracle::rot_z(b), e3);
      const Effect e = effect(space, composite);
      const auto ref = oracle::linear_effect(oracle::so3_basis(), oracle::rot_z(a + b), e3);
      oracle_gap = std::max(oracle_gap, oracle::basis_free_distance(e.map.matrix, e.map.source.complement(),
                                                                    ref.effect, ref.complement));
    }
  }
  v.require(effect_functoriality_check(space, at_pole) < 1e-8, "functoriality at the pole");
  v.require(effect_functoriality_check(space, at_origin) < 1e-8, "functoriality at the origin");
  v.require(oracle_gap < 1e-8, "pole effects match oracle");

  for (const auto& [scenario, name] : std::vector<std::pair<std::string, std::string>>{
           {"ex2a", "effect_functoriality_pole"},
           {"ex2a", "effect_functoriality_origin"},
           {"ex2b", "effect_functoriality_quotient"}}) {
    if (const auto* c = v.check(scenario, name, 1e-8)) v.at_least(c->witnesses["pairs"], 1000, name);
  }
}

// Every check in every bundled scenario whose name matches.
template <typename Fn>
void for_each_named(const std::function<bool(const std::string&)>& match, Fn fn) {
  for (const auto& s : kScenarios) {
    for (const auto& c : report(s).checks) {
      if (match(c.name)) fn(s, c);
    }
  }
}

void criterion_7(Verdict& v) {
  std::size_t seen = 0;
  for_each_named([](const std::string& n) { return n.rfind("intertwining", 0) == 0; },
                 [&](const std::string& s, const CheckRecord& c) {
                   ++seen;
                   v.check(s, c.name, 1e-8);
                   if (c.witnesses.contains("arrows")) {
                     v.at_least(c.witnesses["arrows"], 500, s + "/" + c.name);
                   } else {
                     v.require(c.witnesses.contains("endomorphisms"), s + "/" + c.name + " sample count");
                   }
                 });
  v.require(seen >= 10, "intertwining checks present");
}

void criterion_8(Verdict& v) {
  if (const auto* c = v.check("weak_equiv", "transversal_map_bijective", 10.0)) {
    v.require(c->witnesses["points"] == 100, "100 radii");
  }
  if (const auto* c = v.check("weak_equiv", "ineffectivity_equivalence")) {
    v.require(c->witnesses["mismatches"] == 0, "no mismatches");
  }
  if (const auto* c = v.check("weak_equiv", "orbit_map_bijective")) {
    v.require(c->witnesses["injective"] == "true" && c->witnesses["surjective"] == "true", "orbit map bijective");
    v.require(c->witnesses["pairs"] == 100, "100 radius pairs");
  }
}

void criterion_9(Verdict& v) {
  if (const auto* c = v.check("weak_equiv", "axiom_II_weak_pullback_axioms", 1e-8)) {
    v.at_least(c->witnesses["samples"], 1000, "axiom samples");
  }
  if (const auto* c = v.check("weak_equiv", "axiom_II_left_projection_in_E")) {
    v.require(c->witnesses["flags"]["in_E"] == "true", "left projection in E");
  }
  if (const auto* c = v.check("weak_equiv", "axiom_II_right_preservation")) {
    v.at_least(c->witnesses["arrows"], 50, "preservation arrows");
  }
}

void criterion_10(Verdict& v) {
  std::size_t seen = 0;
  for_each_named(
      [](const std::string& n) { return n.size() > 3 && n.compare(n.size() - 3, 3, "_fd") == 0; },
      [&](const std::string& s, const CheckRecord& c) {
        ++seen;
        v.check(s, c.name, 1e-5);
        const auto& w = c.witnesses;
        const Json count = w.contains("points")   ? w["points"]
                           : w.contains("arrows") ? w["arrows"]
                                                  : w.value("points_per_endomorphism", Json());
        v.at_least(count, 200, s + "/" + c.name);
      });
  v.require(seen >= 20, "finite-difference checks present");
}

void criterion_11(Verdict& v) {
  for (const auto& s : kScenarios) {
    const std::string first = emit_json(run(s), false);
    const std::string second = emit_json(run(s), false);
    v.require(first == second, s + " JSON differs between runs");
  }
}

const std::map<int, std::pair<std::string, void (*)(Verdict&)>> kCriteria = {
    {1, {"reflection effects", criterion_1}},
    {2, {"pole collapse congruent but not exact", criterion_2}},
    {3, {"circle quotient kernel and congruence", criterion_3}},
    {4, {"circle bundle arrows ineffective", criterion_4}},
    {5, {"half-turn kernel invariants", criterion_5}},
    {6, {"effect functoriality", criterion_6}},
    {7, {"intertwining", criterion_7}},
    {8, {"weak equivalence suite", criterion_8}},
    {9, {"weak pullback fuzz", criterion_9}},
    {10, {"finite-difference Jacobians", criterion_10}},
    {11, {"determinism", criterion_11}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [id, _] : kCriteria) selected.push_back(id);
  }

  bool all = true;
  for (int id : selected) {
    const auto it = kCriteria.find(id);
    if (it == kCriteria.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Verdict v;
    try {
      it->second.second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << id << ": " << (v.passed() ? "PASS" : "FAIL") << "  " << it->second.first << "  ("
              << v.summary() << ")\n";
    all = all && v.passed();
  }
  return all ? 0 : 1;
}
