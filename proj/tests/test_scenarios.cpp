#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/scenarios.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace ge;

namespace {

Report run(const std::string& name, std::map<std::string, std::string> params = {}, std::size_t samples = 200,
           std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.scenario = name;
  c.params = std::move(params);
  c.samples = samples;
  c.seed = seed;
  return run_scenario(c);
}

CheckStatus status(const Report& r, const std::string& check) {
  const CheckRecord* c = r.find(check);
  if (!c) throw std::runtime_error("missing check " + check);
  return c->status;
}

}  // namespace

TEST(Scenarios, RegistryListsEveryScenario) {
  std::set<std::string> names;
  for (const auto& s : list_scenarios()) names.insert(s.name);
  EXPECT_EQ(names, (std::set<std::string>{"ex1", "ex2a", "ex2b", "ex3", "ex4", "weak_equiv", "custom"}));
}

TEST(Scenarios, ManifestNamesAreUnique) {
  for (const auto& s : list_scenarios()) {
    const Report r = run(s.name, {}, 50);
    std::set<std::string> names;
    for (const auto& c : r.checks) EXPECT_TRUE(names.insert(c.name).second) << s.name << ": " << c.name;
    EXPECT_FALSE(r.checks.empty());
  }
}

TEST(Scenarios, ReflectionExample) {
  const Report r = run("ex1");
  EXPECT_EQ(status(r, "upstairs_effect"), CheckStatus::Pass);
  EXPECT_EQ(status(r, "downstairs_effect"), CheckStatus::Pass);
  EXPECT_EQ(status(r, "not_in_dotted_category"), CheckStatus::Pass);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Scenarios, PoleCollapseCongruentButNotExact) {
  const Report r = run("ex2a", {{"k", "3"}});
  EXPECT_EQ(status(r, "unit_congruence"), CheckStatus::Pass);
  EXPECT_EQ(r.find("unit_congruence")->deviation, 0.0);
  EXPECT_EQ(status(r, "unit_not_exact"), CheckStatus::Pass);
  EXPECT_EQ(status(r, "exact_obstruction"), CheckStatus::Pass);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Scenarios, CircleBundle) {
  const Report r = run("ex3");
  EXPECT_EQ(status(r, "all_arrows_ineffective"), CheckStatus::Pass);
  EXPECT_EQ(status(r, "endomorphism_congruence"), CheckStatus::Pass);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Scenarios, CircleQuotientDependsOnTheFrequenciesAtZero) {
  // omega(0) = 1 with opposite signs: no unit congruence, and the checks
  // that predict this still pass.
  const Report r = run("ex2b", {{"omega", "poly:1,1"}});
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_FALSE(r.find("unit_congruence")->witnesses["result"]["passed"].get<bool>());
  EXPECT_EQ(r.find("axiom_III_unit")->witnesses["observed"], "false");
  const Report same = run("ex2b", {{"phi1", "+"}});
  EXPECT_EQ(same.exit_code(), 0);
}

TEST(Scenarios, SameSeedSameJson) {
  for (const auto& s : list_scenarios()) {
    EXPECT_EQ(emit_json(run(s.name, {}, 100, 5), false), emit_json(run(s.name, {}, 100, 5), false)) << s.name;
  }
  EXPECT_NE(emit_json(run("ex1", {}, 100, 5), false), emit_json(run("ex1", {}, 100, 6), false));
}

TEST(Scenarios, ParametersAreEchoedWithDefaults) {
  const Report r = run("ex2b", {{"delta", "0.25"}}, 30);
  EXPECT_EQ(r.parameters["delta"], "0.25");
  EXPECT_EQ(r.parameters["omega"], "t");
  EXPECT_EQ(r.parameters["phi0"], "+");
}

TEST(Scenarios, CustomGroups) {
  for (const std::string g : {"so2", "o2", "so3", "so3_axis", "rotation"}) {
    const Report r = run("custom", {{"group", g}}, 100);
    EXPECT_EQ(r.exit_code(), 0) << g;
  }
  EXPECT_THROW(run("custom", {{"group", "sl2"}}), InputError);
}
