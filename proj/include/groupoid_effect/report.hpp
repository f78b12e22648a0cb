#pragma once

// Scenario reports: one record per manifest check, serialized as JSON, CSV
// or plain text.

#include "groupoid_effect/numlin.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ge {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

enum class CheckStatus { Pass, Fail, Undetermined };

std::string to_string(CheckStatus s);

struct CheckRecord {
  std::string name;
  std::string property;  // what the check asserts, in plain words
  CheckStatus status = CheckStatus::Undetermined;
  double deviation = 0;
  Json witnesses = Json::object();
};

struct Report {
  std::string scenario;
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  ToleranceProfile tolerance;
  std::vector<CheckRecord> checks;
  double elapsed_ms = 0;

  // Throws InternalConsistencyError on a duplicate check name.
  void add(CheckRecord record);
  const CheckRecord* find(const std::string& name) const;
  // 0 if every determined check passed, 1 otherwise.
  int exit_code() const;
};

// "%.12g"; "inf", "-inf" and "nan" for non-finite values.
std::string format_deviation(double value);
// "%.17g", enough to round-trip a double.
std::string format_deviation_exact(double value);

Json to_json(const Report& report, bool include_timing = true);
std::string emit_json(const Report& report, bool include_timing = true);
std::string emit_csv(const Report& report);
std::string emit_text(const Report& report);

}  // namespace ge
