#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/report.hpp"
#include "groupoid_effect/rng.hpp"
#include "groupoid_effect/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

using namespace ge;

namespace {

Report sample_report() {
  Report r;
  r.scenario = "demo";
  r.seed = 3;
  r.samples = 10;
  r.checks.push_back({"a", "first property", CheckStatus::Pass, 1.0 / 3.0, Json::object()});
  r.checks.push_back({"b", "second, with a comma", CheckStatus::Fail, 2.5e-17, {{"k", 1}}});
  r.checks.push_back({"c", "third", CheckStatus::Undetermined, std::numeric_limits<double>::infinity(), {}});
  r.elapsed_ms = 12.5;
  return r;
}

}  // namespace

TEST(Report, JsonFieldOrderAndSummary) {
  const Json j = Json::parse(emit_json(sample_report()));
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  const std::vector<std::string> expected = {"schema_version", "tool_version", "scenario", "parameters", "seed",
                                             "samples", "tolerances", "checks", "summary", "elapsed_ms"};
  EXPECT_EQ(keys, expected);
  EXPECT_EQ(j["schema_version"], "1");
  EXPECT_EQ(j["summary"]["pass"], 1);
  EXPECT_EQ(j["summary"]["fail"], 1);
  EXPECT_EQ(j["summary"]["undetermined"], 1);
  EXPECT_EQ(j["summary"]["exit_code"], 1);
  EXPECT_EQ(j["checks"][2]["deviation"], "inf");
  EXPECT_FALSE(Json::parse(emit_json(sample_report(), false)).contains("elapsed_ms"));
}

TEST(Report, DeviationStringsHaveTwelveDigitsAndExactRoundTrip) {
  const Json j = Json::parse(emit_json(sample_report()));
  EXPECT_EQ(j["checks"][0]["deviation"], "0.333333333333");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double d = std::exp(rng.uniform(-40, 10));
    const double back = std::strtod(format_deviation_exact(d).c_str(), nullptr);
    EXPECT_EQ(back, d);
    const double approx = std::strtod(format_deviation(d).c_str(), nullptr);
    EXPECT_LE(std::abs(approx - d), 1e-11 * d);
  }
}

TEST(Report, CsvHasOneRowPerCheck) {
  const std::string csv = emit_csv(sample_report());
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 1 + 3);
  EXPECT_NE(csv.find("\"second, with a comma\""), std::string::npos);
}

TEST(Report, TextSummaryMentionsFailures) {
  EXPECT_NE(emit_text(sample_report()).find("1 check(s) failed"), std::string::npos);
}

TEST(Report, DuplicateChecksAreRejected) {
  Report r;
  r.add({"x", "p", CheckStatus::Pass, 0, {}});
  EXPECT_THROW(r.add({"x", "p", CheckStatus::Pass, 0, {}}), InternalConsistencyError);
}

TEST(Report, ExitCodeIgnoresUndetermined) {
  Report r;
  r.add({"x", "p", CheckStatus::Pass, 0, {}});
  r.add({"y", "p", CheckStatus::Undetermined, 0, {}});
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Config, FromJson) {
  const ScenarioConfig c = ScenarioConfig::from_json(Json::parse(
      R"({"scenario": "ex2a", "params": {"k": 4}, "samples": 200, "seed": 9, "tolerances": {"map_abs_tol": 1e-9}})"));
  EXPECT_EQ(c.scenario, "ex2a");
  EXPECT_EQ(c.params.at("k"), "4");
  EXPECT_EQ(c.samples, 200u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_DOUBLE_EQ(c.tolerance.map_abs_tol, 1e-9);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(ScenarioConfig::from_json(Json::parse(R"({"scenario": "ex1", "extra": 1})")), InputError);
  EXPECT_THROW(ScenarioConfig::from_json(Json::parse(R"({"samples": -3})")), InputError);
  EXPECT_THROW(ScenarioConfig::from_json(Json::parse(R"({"params": {"k": [1]}})")), InputError);
  EXPECT_THROW(ScenarioConfig::from_json(Json::parse(R"({"tolerances": {"bogus": 1}})")), InputError);
  EXPECT_THROW(ScenarioConfig::from_json(Json::parse("[1]")), InputError);
  EXPECT_THROW(ScenarioConfig::from_json(Json::parse(R"({"scenario": 5})")), InputError);

  ScenarioConfig c;
  c.scenario = "ex2a";
  c.params["k"] = "three";
  EXPECT_THROW(c.validate(), InputError);
  c.params = {{"j", "1"}};
  EXPECT_THROW(c.validate(), InputError);
  c.params.clear();
  c.scenario = "ex9";
  EXPECT_THROW(c.validate(), InputError);
  c.scenario = "ex2b";
  c.params = {{"omega", "sin:1"}};
  EXPECT_THROW(c.validate(), InputError);
  c.params = {{"phi0", "0"}};
  EXPECT_THROW(c.validate(), InputError);
  c.params.clear();
  c.samples = 0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(SampleCounts, DerivedFromBase) {
  const SampleCounts n = SampleCounts::from(1000);
  EXPECT_EQ(n.arrows, 1000u);
  EXPECT_EQ(n.intertwining, 500u);
  EXPECT_EQ(n.jacobian, 200u);
  EXPECT_EQ(n.points, 100u);
  EXPECT_EQ(n.preservation, 50u);
  EXPECT_EQ(n.obstruction, 10u);
  const SampleCounts tiny = SampleCounts::from(3);
  EXPECT_EQ(tiny.obstruction, 1u);
  EXPECT_EQ(tiny.points, 1u);
}
