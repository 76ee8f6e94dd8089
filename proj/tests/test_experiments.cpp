#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "experiments.hpp"
#include "units.hpp"

using namespace hstn;

namespace {

// Small scenario so the pipeline tests stay fast.
ScenarioConfig small_config(int k = 3, int n = 3, int m = 2) {
  ScenarioConfig cfg = default_config();
  cfg.n_bs = n;
  cfg.n_pairs = k;
  cfg.n_antennas = m;
  cfg.power_budget.assign(k, dbm_to_mw(10.0));
  cfg.leak_threshold.assign(k, dbm_to_mw(-117.0));
  cfg.sat_interference.assign(k, std::vector<double>(k, cfg.noise_power));
  cfg.suppression.assign(k, std::sqrt(db_to_lin(-20.0)));
  return cfg;
}

LargeScaleState draw_state(const ScenarioConfig& cfg, std::uint64_t seed) {
  RngStream geom_rng(seed);
  const Geometry geom = sample_geometry(cfg, cfg.region, geom_rng);
  RngStream shadow_rng = RngStream(seed).split(1);
  return derive_large_scale(geom, cfg, shadow_rng);
}

ExperimentSpec quick_spec(const ScenarioConfig& cfg) {
  ExperimentSpec spec;
  spec.scenario = cfg;
  spec.geometry_seed = 2;
  spec.sweep.parameter = "power_budget";
  spec.sweep.values_dbm = {0.0, 10.0, 20.0};
  spec.schemes = {Scheme::proposed, Scheme::waterfilling, Scheme::equal_power};
  spec.trials = 2;
  return spec;
}

}  // namespace

TEST_CASE("pair context wiring") {
  ScenarioConfig cfg = small_config(2, 2, 3);
  cfg.sat_interference[0][1] = 5.0 * cfg.noise_power;
  const LargeScaleState ls = draw_state(cfg, 3);

  const PairContext ctx = make_pair_context(cfg, ls, 0, 1);
  CHECK(ctx.n_antennas == 3);
  CHECK(ctx.denom == doctest::Approx(6.0 * cfg.noise_power));
  for (int n = 0; n < 2; ++n)
    CHECK(ctx.gains_sq[n] == doctest::Approx(ls.terr(0, 1, n) * ls.terr(0, 1, n)));

  const PowerConstraints c = make_pair_constraints(cfg, ls, 0, 1);
  CHECK(c.budget == cfg.power_budget[0]);
  CHECK(c.leak_threshold == cfg.leak_threshold[1]);
  const double nu_sq = cfg.suppression[1] * cfg.suppression[1];
  for (int n = 0; n < 2; ++n)
    CHECK(c.leak_coeff[n] == doctest::Approx(nu_sq * ls.sat(1, n) * ls.sat(1, n)));
}

TEST_CASE("algorithm1 single pair") {
  const ScenarioConfig cfg = small_config(1, 2, 2);
  const LargeScaleState ls = draw_state(cfg, 5);
  const PipelineResult res = algorithm1(ls, cfg);

  const PairContext ctx = make_pair_context(cfg, ls, 0, 0);
  const PowerConstraints c = make_pair_constraints(cfg, ls, 0, 0);
  CHECK(res.sum_rate == doctest::Approx(solve_pair(ctx, c).rate));
  CHECK(res.assignment.perm == std::vector<int>{0});
}

TEST_CASE("algorithm1 matches exhaustive search and beats random assignments") {
  const ScenarioConfig cfg = small_config(3, 3, 2);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const LargeScaleState ls = draw_state(cfg, seed);
    const PipelineResult res = algorithm1(ls, cfg);

    CHECK(res.sum_rate == exhaustive_oracle(res.table).total);

    RngStream rng(seed);
    double random_mean = 0.0;
    const int reps = 100;
    for (int i = 0; i < reps; ++i)
      random_mean += assignment_total(res.table.r, random_assignment(3, rng));
    random_mean /= reps;
    CHECK(res.sum_rate >= random_mean);
  }
}

TEST_CASE("run_sweep row layout") {
  ExperimentSpec spec = quick_spec(small_config(2, 2, 2));
  spec.sweep.values_dbm = {10.0};
  spec.schemes = {Scheme::proposed};
  spec.trials = 1;
  const SweepResult result = run_sweep(spec, 7, 1);
  // one row per user, no average block for a single trial
  CHECK(result.rows.size() == 2);
  CHECK(result.rows[0].trial == 0);
  CHECK(result.rows[0].user == 0);
  CHECK(result.rows[1].user == 1);
  CHECK(result.rows[0].sum_rate == result.rows[1].sum_rate);

  spec.trials = 3;
  const SweepResult multi = run_sweep(spec, 7, 1);
  // 3 trials x 2 users + 2 averaged rows
  CHECK(multi.rows.size() == 8);
  CHECK(multi.rows.back().trial == -1);
  CHECK(multi.rows.back().channel == -1);
}

TEST_CASE("run_sweep ordering, monotonicity and leakage audit") {
  const ExperimentSpec spec = quick_spec(small_config(2, 3, 2));
  const SweepResult result = run_sweep(spec, 11, 1);

  // collect per (value, scheme) averaged sum rates
  auto avg_sum = [&](double value, Scheme s) {
    for (const SweepRow& row : result.rows)
      if (row.trial == -1 && row.user == 0 && row.sweep_value_dbm == value && row.scheme == s)
        return row.sum_rate;
    FAIL("missing averaged row");
    return 0.0;
  };

  double prev = -1.0;
  for (double v : spec.sweep.values_dbm) {
    const double proposed = avg_sum(v, Scheme::proposed);
    CHECK(proposed >= avg_sum(v, Scheme::waterfilling));
    CHECK(proposed >= avg_sum(v, Scheme::equal_power));
    // monotone within the solver's relative gap tolerance
    CHECK(proposed >= prev - std::max(2e-6 * prev, 1e-9));
    prev = proposed;
  }

  for (const SweepRow& row : result.rows)
    for (int j = 0; j < 2; ++j)
      CHECK(row.leakage_mw[j] <=
            spec.scenario.leak_threshold[j] * (1.0 + 1e-9));
}

TEST_CASE("run_sweep is deterministic and thread-count invariant") {
  const ExperimentSpec spec = quick_spec(small_config(2, 2, 2));
  const std::string a = sweep_to_csv(run_sweep(spec, 13, 1));
  const std::string b = sweep_to_csv(run_sweep(spec, 13, 1));
  const std::string c = sweep_to_csv(run_sweep(spec, 13, 4));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.find("wall_ms") != std::string::npos);

  // different seed, different numbers
  const std::string d = sweep_to_csv(run_sweep(spec, 14, 1));
  CHECK(a != d);
}

TEST_CASE("validate_approx row count and gap stats") {
  ExperimentSpec spec = quick_spec(small_config(2, 2, 2));
  spec.trials = 2;
  spec.mc_validation.enabled = true;
  spec.mc_validation.samples = 4000;
  const ValidationReport report = validate_approx(spec, 17, 2);
  CHECK(report.rows.size() == 2 * 2 * 2);  // trials x K^2
  CHECK(report.median_gap >= 0.0);
  CHECK(report.max_gap < 0.2);
  for (const ValidationRow& row : report.rows) {
    CHECK(std::isfinite(row.upsilon));
    CHECK(row.mc_std_error > 0.0);
  }

  SUBCASE("zero-budget pairs are excluded from the statistics") {
    ExperimentSpec zero = spec;
    zero.scenario.power_budget.assign(2, 0.0);
    zero.trials = 1;
    const ValidationReport r0 = validate_approx(zero, 17, 1);
    CHECK(r0.rows.size() == 4);
    CHECK(r0.median_gap == 0.0);
    for (const ValidationRow& row : r0.rows) {
      CHECK(row.upsilon == 0.0);
      CHECK(!std::isfinite(row.rel_gap));
    }
  }
}

TEST_CASE("proposed equals exhaustive inside a sweep") {
  ExperimentSpec spec = quick_spec(small_config(3, 2, 2));
  spec.sweep.values_dbm = {0.0, 20.0};
  spec.schemes = {Scheme::proposed, Scheme::exhaustive};
  spec.trials = 3;
  const SweepResult result = run_sweep(spec, 23, 1);
  for (const SweepRow& row : result.rows) {
    if (row.trial < 0 || row.scheme != Scheme::proposed) continue;
    for (const SweepRow& other : result.rows)
      if (other.scheme == Scheme::exhaustive && other.trial == row.trial &&
          other.user == row.user && other.sweep_value_dbm == row.sweep_value_dbm)
        CHECK(row.sum_rate == other.sum_rate);
  }
}

TEST_CASE("model rates track MC on the reference scenario") {
  ExperimentSpec spec;
  spec.scenario = default_config();
  spec.geometry_seed = 3;
  spec.sweep.values_dbm = {20.0};
  spec.schemes = {Scheme::proposed};
  spec.trials = 1;
  spec.mc_validation.enabled = true;
  spec.mc_validation.samples = 10000;
  const ValidationReport report = validate_approx(spec, 29, 1);
  CHECK(report.rows.size() == 9);
  CHECK(report.median_gap <= 0.03);
}

TEST_CASE("spec JSON parsing and validation") {
  const std::string good = R"({
    "scenario": {"n_bs": 2, "n_pairs": 2, "n_antennas": 2, "noise_power_dbm": -100,
                 "power_budget_dbm": 10, "leak_threshold_dbm": -110},
    "sweep": {"parameter": "power_budget", "values_dbm": [0, 10]},
    "schemes": ["proposed", "waterfilling"],
    "trials": 2
  })";
  const ExperimentSpec spec = spec_from_json(good);
  CHECK(spec.scenario.n_pairs == 2);
  CHECK(spec.sweep.values_dbm == std::vector<double>{0.0, 10.0});
  CHECK(spec.schemes.size() == 2);
  CHECK(spec.trials == 2);
  CHECK(spec.timing == false);

  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      spec_from_json(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error(R"({"schemes": ["bogus"]})", "bogus");
  expect_error(R"({"sweep": {"values_dbm": [10, 0]}})", "sorted");
  // a bare scenario handed to the spec parser gets a pointed hint
  expect_error(R"({"n_bs": 4, "n_pairs": 3})", "looks like a scenario file");
  expect_error(R"({"sweep": {"parameter": "noise", "values_dbm": [0]}})", "parameter");
  expect_error(R"({"trials": 0})", "trials");
  expect_error(R"({"unknown_field": 1})", "unknown_field");

  // defaults: full scheme set, reference sweep, 50 trials
  const ExperimentSpec dflt = spec_from_json("{}");
  CHECK(dflt.schemes.size() == 5);
  CHECK(dflt.sweep.values_dbm.size() == 9);
  CHECK(dflt.trials == 50);
}

TEST_CASE("csv shape") {
  ExperimentSpec spec = quick_spec(small_config(2, 2, 2));
  spec.sweep.values_dbm = {10.0};
  spec.schemes = {Scheme::proposed};
  spec.trials = 1;
  const std::string csv = sweep_to_csv(run_sweep(spec, 19, 1));
  CHECK(csv.substr(0, csv.find('\n')) ==
        "sweep_value_dbm,scheme,trial,user,channel,rate_bps_hz,sum_rate_bps_hz,"
        "leakage_mw_1,leakage_mw_2,iterations,wall_ms");
  // header + 2 user rows
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  // timing disabled by default: wall_ms column is zero
  CHECK(csv.find(",0\n") != std::string::npos);
}
