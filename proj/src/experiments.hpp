#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "assignment.hpp"
#include "scenario.hpp"

namespace hstn {

enum class Scheme { proposed, waterfilling, equal_power, random_assignment, exhaustive };

const char* scheme_name(Scheme s);

struct SweepSpec {
  std::string parameter = "power_budget";  // or "leak_threshold"
  std::vector<double> values_dbm;          // nonempty, sorted ascending
};

struct McValidation {
  bool enabled = false;
  long samples = 100000;
};

struct ExperimentSpec {
  ScenarioConfig scenario;
  std::uint64_t geometry_seed = 1;
  SweepSpec sweep;
  std::vector<Scheme> schemes;
  McValidation mc_validation;
  int trials = 50;
  bool timing = false;  // real wall_ms breaks byte-reproducibility; off by default

  void validate() const;
};

// One CSV line: a (sweep value, scheme, trial, user) record. trial == -1
// marks the cross-trial average appended when trials > 1; its channel is -1
// because assignments may differ between trials.
struct SweepRow {
  double sweep_value_dbm = 0.0;
  Scheme scheme = Scheme::proposed;
  int trial = 0;
  int user = 0;
  int channel = 0;
  double rate = 0.0;      // bit/s/Hz for this user
  double sum_rate = 0.0;  // bit/s/Hz over all users
  std::vector<double> leakage_mw;  // per channel, audited independently
  long iterations = 0;    // total solver iterations behind this trial's table
  double wall_ms = 0.0;
};

struct SweepResult {
  int n_pairs = 0;
  std::vector<SweepRow> rows;
};

// Per-pair inputs assembled from a scenario and a large-scale draw.
PairContext make_pair_context(const ScenarioConfig& cfg, const LargeScaleState& ls, int user,
                              int channel);
PowerConstraints make_pair_constraints(const ScenarioConfig& cfg, const LargeScaleState& ls,
                                       int user, int channel);

struct PipelineResult {
  Assignment assignment;
  RateTable table;
  double sum_rate = 0.0;
  long iterations = 0;
};

// The hierarchical solve: K^2 per-pair max-min solves, then maximum-weight
// matching over the resulting rate table.
PipelineResult algorithm1(const LargeScaleState& ls, const ScenarioConfig& cfg);

SweepResult run_sweep(const ExperimentSpec& spec, std::uint64_t seed, int threads);

std::string sweep_to_csv(const SweepResult& result);

struct ValidationRow {
  int trial = 0;
  int user = 0;
  int channel = 0;
  double upsilon = 0.0;
  double mc_mean = 0.0;
  double mc_std_error = 0.0;
  double rel_gap = 0.0;  // NaN when upsilon and the MC mean are both zero
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double median_gap = 0.0;
  double max_gap = 0.0;
};

// Solves every pair of the proposed scheme and compares upsilon with the
// Monte Carlo ergodic rate.
ValidationReport validate_approx(const ExperimentSpec& spec, std::uint64_t seed, int threads);

std::string validation_to_csv(const ValidationReport& report);

// ExperimentSpec JSON: scenario inline under "scenario" or referenced via
// "scenario_file". See README for the schema.
ExperimentSpec spec_from_json(const std::string& json_text);
ExperimentSpec spec_from_file(const std::string& path);

// Solve output for the CLI: assignment, rate table, powers, leakage.
std::string solve_report_json(const ScenarioConfig& cfg, const LargeScaleState& ls,
                              const PipelineResult& res);

}  // namespace hstn
