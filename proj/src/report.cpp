#include "groupoid_effect/report.hpp"

#include "groupoid_effect/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ge {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Undetermined: return "undetermined";
  }
  return "undetermined";
}

void Report::add(CheckRecord record) {
  if (find(record.name)) throw InternalConsistencyError("duplicate check in manifest: " + record.name);
  checks.push_back(std::move(record));
}

const CheckRecord* Report::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

int Report::exit_code() const {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Fail) return 1;
  }
  return 0;
}

namespace {

std::string format(double value, const char* fmt) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_deviation(double value) { return format(value, "%.12g"); }
std::string format_deviation_exact(double value) { return format(value, "%.17g"); }

Json to_json(const Report& report, bool include_timing) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["scenario"] = report.scenario;
  j["parameters"] = report.parameters;
  j["seed"] = report.seed;
  j["samples"] = report.samples;
  j["tolerances"] = {
      {"rank_rel_tol", format_deviation_exact(report.tolerance.rank_rel_tol)},
      {"map_abs_tol", format_deviation_exact(report.tolerance.map_abs_tol)},
      {"fd_abs_tol", format_deviation_exact(report.tolerance.fd_abs_tol)},
      {"fd_step", format_deviation_exact(report.tolerance.fd_step)},
  };
  Json checks = Json::array();
  std::size_t passed = 0, failed = 0, undetermined = 0;
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"property", c.property},
                      {"status", to_string(c.status)},
                      {"deviation", format_deviation(c.deviation)},
                      {"deviation_exact", format_deviation_exact(c.deviation)},
                      {"witnesses", c.witnesses}});
    switch (c.status) {
      case CheckStatus::Pass: ++passed; break;
      case CheckStatus::Fail: ++failed; break;
      case CheckStatus::Undetermined: ++undetermined; break;
    }
  }
  j["checks"] = std::move(checks);
  j["summary"] = {{"pass", passed}, {"fail", failed}, {"undetermined", undetermined},
                  {"exit_code", report.exit_code()}};
  if (include_timing) j["elapsed_ms"] = report.elapsed_ms;
  return j;
}

std::string emit_json(const Report& report, bool include_timing) {
  return to_json(report, include_timing).dump(2) + "\n";
}

std::string emit_csv(const Report& report) {
  std::ostringstream out;
  out << "scenario,check,status,deviation,property\n";
  for (const auto& c : report.checks) {
    out << csv_field(report.scenario) << ',' << csv_field(c.name) << ',' << to_string(c.status) << ','
        << format_deviation(c.deviation) << ',' << csv_field(c.property) << '\n';
  }
  return out.str();
}

std::string emit_text(const Report& report) {
  std::ostringstream out;
  out << "scenario " << report.scenario << " (seed " << report.seed << ", samples " << report.samples << ")\n";
  for (const auto& c : report.checks) {
    std::string status = to_string(c.status);
    status.resize(12, ' ');
    out << "  " << status << c.name << "  deviation " << format_deviation(c.deviation) << '\n';
  }
  std::size_t failed = 0;
  for (const auto& c : report.checks) failed += c.status == CheckStatus::Fail;
  out << (failed == 0 ? "all determined checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  return out.str();
}

}  // namespace ge
