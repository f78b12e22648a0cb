#pragma once

// Scenario registry: configuration, manifests of checks, and execution.

#include "groupoid_effect/report.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ge {

struct ScenarioConfig {
  std::string scenario;
  std::map<std::string, std::string> params;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  ToleranceProfile tolerance;

  // Schema: {"scenario": str, "params": {str: str|number}, "samples": int,
  // "seed": int, "tolerances": {field: number}}. Missing keys keep the
  // defaults. Throws InputError.
  static ScenarioConfig from_json(const Json& j);
  // Throws InputError for unknown scenarios, unknown parameters or bad values.
  void validate() const;
};

struct ParameterInfo {
  std::string name;
  std::string default_value;
  std::string description;
};

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::vector<ParameterInfo> parameters;
};

const std::vector<ScenarioInfo>& list_scenarios();

// Sample counts derived from the base count N = samples.
struct SampleCounts {
  std::size_t arrows;        // N
  std::size_t intertwining;  // N / 2
  std::size_t jacobian;      // N / 5
  std::size_t points;        // N / 10
  std::size_t preservation;  // N / 20
  std::size_t obstruction;   // N / 100

  static SampleCounts from(std::size_t n);
};

// Validates the config and runs its manifest. Throws InputError or
// ConfigurationError for invalid configurations.
Report run_scenario(const ScenarioConfig& config);

}  // namespace ge
