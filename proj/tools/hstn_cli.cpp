// Command-line front end; talks to the library exclusively through the
// public C API in hstn/hstn.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hstn/hstn.h"

namespace {

int fail(int status) {
  std::cerr << "error: " << hstn_last_error() << "\n";
  return status;
}

int write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << out_path << "' for writing\n";
    return HSTN_ERR_IO;
  }
  out << text;
  return 0;
}

std::string read_file_or_die(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    ok = false;
    return {};
  }
  ok = true;
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrum-sharing resource allocation for hybrid satellite-terrestrial "
               "networks (large-scale CSI only)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 1;
  int threads = 1;

  auto* solve = app.add_subcommand(
      "solve", "Solve one scenario: power allocation per pair + channel assignment");
  solve->add_option("--config", config_path, "Scenario JSON file (default: built-in scenario)");
  solve->add_option("--seed", seed, "Deployment / fading seed");
  solve->add_option("--out", out_path, "Output JSON path (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write CSV results");
  sweep->add_option("--config", config_path, "Experiment spec JSON file")->required();
  sweep->add_option("--seed", seed, "Master seed for fading trials");
  sweep->add_option("--out", out_path, "Output CSV path")->required();
  sweep->add_option("--threads", threads, "Worker threads (results are thread-count invariant)");

  auto* validate = app.add_subcommand(
      "validate-approx", "Compare model rates against Monte Carlo link simulation");
  validate->add_option("--config", config_path, "Experiment spec JSON file")->required();
  validate->add_option("--seed", seed, "Master seed");
  validate->add_option("--out", out_path, "Output CSV path")->required();
  validate->add_option("--threads", threads, "Worker threads");

  auto* gen = app.add_subcommand("gen-scenario", "Write the reference scenario as JSON");
  gen->add_option("--seed", seed, "Geometry seed recorded in the file");
  gen->add_option("--out", out_path, "Output JSON path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    hstn_scenario* scenario = nullptr;
    int status = config_path.empty() ? hstn_scenario_default(&scenario)
                                     : hstn_scenario_from_file(config_path.c_str(), &scenario);
    if (status != HSTN_OK) return fail(status);
    hstn_result* result = nullptr;
    status = hstn_solve(scenario, seed, &result);
    hstn_scenario_free(scenario);
    if (status != HSTN_OK) return fail(status);
    char* json = nullptr;
    status = hstn_result_to_json(result, &json);
    hstn_result_free(result);
    if (status != HSTN_OK) return fail(status);
    const int rc = write_or_print(out_path, json);
    hstn_string_free(json);
    return rc;
  }

  if (sweep->parsed()) {
    bool ok = false;
    const std::string spec = read_file_or_die(config_path, ok);
    if (!ok) return HSTN_ERR_IO;
    const int status = hstn_sweep_run(spec.c_str(), seed, threads, out_path.c_str());
    if (status != HSTN_OK) return fail(status);
    return 0;
  }

  if (validate->parsed()) {
    bool ok = false;
    const std::string spec = read_file_or_die(config_path, ok);
    if (!ok) return HSTN_ERR_IO;
    char* summary = nullptr;
    const int status =
        hstn_validate_approx(spec.c_str(), seed, threads, out_path.c_str(), &summary);
    if (status != HSTN_OK) return fail(status);
    std::cout << summary << "\n";
    hstn_string_free(summary);
    return 0;
  }

  if (gen->parsed()) {
    hstn_scenario* scenario = nullptr;
    int status = hstn_scenario_default(&scenario);
    if (status != HSTN_OK) return fail(status);
    char* json = nullptr;
    status = hstn_scenario_to_json(scenario, &json);
    hstn_scenario_free(scenario);
    if (status != HSTN_OK) return fail(status);
    // record the seed so downstream runs can reuse the deployment
    nlohmann::json doc = nlohmann::json::parse(json);
    hstn_string_free(json);
    doc["geometry_seed"] = seed;
    return write_or_print(out_path, doc.dump(2) + "\n");
  }

  return 0;
}
