#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/scenarios.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitInvalid = 2;

ge::Json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ge::InputError("cannot open config file " + path);
  try {
    return ge::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ge::InputError("config file " + path + " is not valid JSON: " + e.what());
  }
}

std::pair<std::string, std::string> split_param(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ge::InputError("--param expects key=value, got '" + kv + "'");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw std::ios_base::failure("cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw std::ios_base::failure("cannot write " + path);
}

void print_scenarios() {
  for (const auto& s : ge::list_scenarios()) {
    std::cout << s.name << "\n  " << s.description << '\n';
    for (const auto& p : s.parameters) {
      std::cout << "    " << p.name << " (default " << p.default_value << "): " << p.description << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effects of Lie groupoid arrows: scenario diagnostics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one scenario and emit its report");
  std::string scenario, config_path, format = "json", out_path;
  std::vector<std::string> params;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool no_timing = false;
  run->add_option("--scenario", scenario, "scenario name (see list-scenarios)");
  run->add_option("--param", params, "scenario parameter key=value (repeatable)");
  auto* samples_opt = run->add_option("--samples", samples, "base sample count N")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "random seed");
  run->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  run->add_option("--out", out_path, "output file (default stdout)");
  run->add_option("--config", config_path, "JSON config file; explicit flags override it");
  run->add_flag("--no-timing", no_timing, "omit elapsed_ms from the JSON report");

  app.add_subcommand("list-scenarios", "list scenarios and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (app.got_subcommand("list-scenarios")) {
    print_scenarios();
    return 0;
  }

  ge::Report report;
  try {
    ge::ScenarioConfig config;
    if (!config_path.empty()) config = ge::ScenarioConfig::from_json(read_config(config_path));
    if (!scenario.empty()) config.scenario = scenario;
    for (const auto& kv : params) {
      auto [k, v] = split_param(kv);
      config.params[k] = v;
    }
    if (samples_opt->count() > 0) config.samples = samples;
    if (seed_opt->count() > 0) config.seed = seed;
    if (const char* env = std::getenv("GE_TOL_OVERRIDE")) {
      config.tolerance = ge::ToleranceProfile::with_overrides(config.tolerance, env);
    }
    report = ge::run_scenario(config);
  } catch (const ge::InputError& e) {
    std::cerr << "groupoid-effect: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ge::ConfigurationError& e) {
    std::cerr << "groupoid-effect: invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    const std::string text = format == "csv"    ? ge::emit_csv(report)
                             : format == "text" ? ge::emit_text(report)
                                                : ge::emit_json(report, !no_timing);
    write_output(text, out_path);
  } catch (const std::exception& e) {
    std::cerr << "groupoid-effect: " << e.what() << '\n';
    return kExitInvalid;
  }
  return report.exit_code();
}
