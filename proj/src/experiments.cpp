#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mc_oracle.hpp"
#include "units.hpp"

namespace hstn {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGeomTag = 0x47454f4d;   // stream tags
constexpr std::uint64_t kShadowTag = 0x53484144;
constexpr std::uint64_t kAssignTag = 0x41534e47;
constexpr std::uint64_t kMcTag = 0x4d43;

void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    int i;
    while ((i = next.fetch_add(1)) < n_tasks) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min(threads, n_tasks);
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

ScenarioConfig with_sweep_value(const ScenarioConfig& base, const std::string& parameter,
                                double value_dbm) {
  ScenarioConfig cfg = base;
  const double mw = dbm_to_mw(value_dbm);
  if (parameter == "power_budget")
    cfg.power_budget.assign(cfg.n_pairs, mw);
  else
    cfg.leak_threshold.assign(cfg.n_pairs, mw);
  return cfg;
}

using TableBuilder = PairSolution (*)(const PairContext&, const PowerConstraints&);

RateTable build_table(const ScenarioConfig& cfg, const LargeScaleState& ls,
                      const TableBuilder& builder, long& iterations) {
  const int k = cfg.n_pairs;
  RateTable table;
  table.r.assign(k, std::vector<double>(k, 0.0));
  table.solutions.assign(k, std::vector<PairSolution>(k));
  iterations = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const PairContext ctx = make_pair_context(cfg, ls, i, j);
      const PowerConstraints c = make_pair_constraints(cfg, ls, i, j);
      PairSolution sol = builder(ctx, c);
      iterations += sol.iterations;
      table.r[i][j] = sol.rate;
      table.solutions[i][j] = std::move(sol);
    }
  return table;
}

PairSolution proposed_builder(const PairContext& ctx, const PowerConstraints& c) {
  return solve_pair(ctx, c);
}

// Per-channel leakage of an assignment, recomputed from the power vectors
// and raw gains rather than trusting any solver-side bookkeeping.
std::vector<double> audited_leakage(const ScenarioConfig& cfg, const LargeScaleState& ls,
                                    const RateTable& table, const Assignment& a) {
  const int k = cfg.n_pairs;
  std::vector<double> leak(k, 0.0);
  for (int i = 0; i < k; ++i) {
    const int j = a.perm[i];
    const PairSolution& sol = table.solutions[i][j];
    const double nu_sq = cfg.suppression[j] * cfg.suppression[j];
    double sum = 0.0;
    for (int n = 0; n < cfg.n_bs; ++n) {
      const double g = ls.sat(j, n);
      sum += sol.p_star.p[n] * nu_sq * g * g;
    }
    leak[j] = sum;
  }
  return leak;
}

struct TrialOutput {
  // one entry per scheme, in spec order
  std::vector<std::vector<SweepRow>> scheme_rows;
};

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::waterfilling: return "waterfilling";
    case Scheme::equal_power: return "equal_power";
    case Scheme::random_assignment: return "random_assignment";
    case Scheme::exhaustive: return "exhaustive";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  scenario.validate();
  if (sweep.parameter != "power_budget" && sweep.parameter != "leak_threshold")
    throw ConfigError("config error: sweep.parameter must be 'power_budget' or 'leak_threshold'");
  if (sweep.values_dbm.empty())
    throw ConfigError("config error: sweep.values_dbm must be nonempty");
  if (!std::is_sorted(sweep.values_dbm.begin(), sweep.values_dbm.end()))
    throw ConfigError("config error: sweep.values_dbm must be sorted ascending");
  if (schemes.empty()) throw ConfigError("config error: schemes must be nonempty");
  if (trials < 1) throw ConfigError("config error: trials must be >= 1");
  if (mc_validation.samples < 1)
    throw ConfigError("config error: mc_validation.samples must be >= 1");
}

PairContext make_pair_context(const ScenarioConfig& cfg, const LargeScaleState& ls, int user,
                              int channel) {
  PairContext ctx;
  ctx.n_antennas = cfg.n_antennas;
  ctx.denom = cfg.sat_interference[user][channel] + cfg.noise_power;
  ctx.gains_sq.resize(cfg.n_bs);
  for (int n = 0; n < cfg.n_bs; ++n) {
    const double l = ls.terr(user, channel, n);
    ctx.gains_sq[n] = l * l;
  }
  return ctx;
}

PowerConstraints make_pair_constraints(const ScenarioConfig& cfg, const LargeScaleState& ls,
                                       int user, int channel) {
  PowerConstraints c;
  c.budget = cfg.power_budget[user];
  c.leak_threshold = cfg.leak_threshold[channel];
  const double nu_sq = cfg.suppression[channel] * cfg.suppression[channel];
  c.leak_coeff.resize(cfg.n_bs);
  for (int n = 0; n < cfg.n_bs; ++n) {
    const double l = ls.sat(channel, n);
    c.leak_coeff[n] = nu_sq * l * l;
  }
  return c;
}

PipelineResult algorithm1(const LargeScaleState& ls, const ScenarioConfig& cfg) {
  PipelineResult res;
  res.table = build_table(cfg, ls, proposed_builder, res.iterations);
  MatchResult match = kuhn_munkres(res.table);
  res.assignment = std::move(match.assignment);
  res.sum_rate = match.total;
  return res;
}

SweepResult run_sweep(const ExperimentSpec& spec, std::uint64_t seed, int threads) {
  spec.validate();
  const int k = spec.scenario.n_pairs;
  const int n_values = static_cast<int>(spec.sweep.values_dbm.size());
  const int n_schemes = static_cast<int>(spec.schemes.size());

  const RngStream root(seed);
  RngStream geom_rng = RngStream(spec.geometry_seed).split(kGeomTag);
  const Geometry geom = sample_geometry(spec.scenario, spec.scenario.region, geom_rng);

  const bool want_proposed_table =
      std::any_of(spec.schemes.begin(), spec.schemes.end(), [](Scheme s) {
        return s == Scheme::proposed || s == Scheme::random_assignment ||
               s == Scheme::exhaustive;
      });

  // task = (value index, trial); every task owns its RNG streams, so the
  // result is independent of the execution order.
  const int n_tasks = n_values * spec.trials;
  std::vector<TrialOutput> outputs(n_tasks);

  parallel_for(n_tasks, threads, [&](int task) {
    const int vi = task / spec.trials;
    const int trial = task % spec.trials;
    const double value_dbm = spec.sweep.values_dbm[vi];
    const ScenarioConfig cfg = with_sweep_value(spec.scenario, spec.sweep.parameter, value_dbm);

    RngStream shadow_rng = root.split(kShadowTag, trial);
    const LargeScaleState ls = derive_large_scale(geom, cfg, shadow_rng);

    const auto t0 = std::chrono::steady_clock::now();

    RateTable proposed_table;
    long proposed_iters = 0;
    if (want_proposed_table) proposed_table = build_table(cfg, ls, proposed_builder, proposed_iters);

    TrialOutput& out = outputs[task];
    out.scheme_rows.resize(n_schemes);
    for (int si = 0; si < n_schemes; ++si) {
      const Scheme scheme = spec.schemes[si];
      const RateTable* table = &proposed_table;
      RateTable own_table;
      long iters = proposed_iters;
      Assignment assign;

      switch (scheme) {
        case Scheme::proposed:
          assign = kuhn_munkres(proposed_table).assignment;
          break;
        case Scheme::waterfilling:
          own_table = build_table(cfg, ls, waterfilling_baseline, iters);
          table = &own_table;
          assign = kuhn_munkres(own_table).assignment;
          break;
        case Scheme::equal_power:
          own_table = build_table(cfg, ls, equal_power_baseline, iters);
          table = &own_table;
          assign = kuhn_munkres(own_table).assignment;
          break;
        case Scheme::random_assignment: {
          RngStream arng = root.split(kAssignTag, trial).split(vi);
          assign = random_assignment(k, arng);
          break;
        }
        case Scheme::exhaustive:
          assign = exhaustive_oracle(proposed_table).assignment;
          break;
      }

      const double sum_rate = assignment_total(table->r, assign);
      const std::vector<double> leak = audited_leakage(cfg, ls, *table, assign);
      const auto t1 = std::chrono::steady_clock::now();
      const double wall_ms =
          spec.timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;

      std::vector<SweepRow>& rows = out.scheme_rows[si];
      rows.reserve(k);
      for (int user = 0; user < k; ++user) {
        SweepRow row;
        row.sweep_value_dbm = value_dbm;
        row.scheme = scheme;
        row.trial = trial;
        row.user = user;
        row.channel = assign.perm[user];
        row.rate = table->r[user][assign.perm[user]];
        row.sum_rate = sum_rate;
        row.leakage_mw = leak;
        row.iterations = iters;
        row.wall_ms = wall_ms;
        rows.push_back(std::move(row));
      }
    }
  });

  // Deterministic emission: values ascending, schemes in spec order, trials,
  // users; averaged rows (trial = -1) close each (value, scheme) block.
  SweepResult result;
  result.n_pairs = k;
  for (int vi = 0; vi < n_values; ++vi)
    for (int si = 0; si < n_schemes; ++si) {
      for (int trial = 0; trial < spec.trials; ++trial) {
        const TrialOutput& out = outputs[vi * spec.trials + trial];
        for (const SweepRow& row : out.scheme_rows[si]) result.rows.push_back(row);
      }
      if (spec.trials > 1) {
        for (int user = 0; user < k; ++user) {
          SweepRow avg;
          avg.sweep_value_dbm = spec.sweep.values_dbm[vi];
          avg.scheme = spec.schemes[si];
          avg.trial = -1;
          avg.user = user;
          avg.channel = -1;
          avg.leakage_mw.assign(k, 0.0);
          double iter_sum = 0.0;
          for (int trial = 0; trial < spec.trials; ++trial) {
            const SweepRow& row = outputs[vi * spec.trials + trial].scheme_rows[si][user];
            avg.rate += row.rate;
            avg.sum_rate += row.sum_rate;
            for (int j = 0; j < k; ++j) avg.leakage_mw[j] += row.leakage_mw[j];
            iter_sum += static_cast<double>(row.iterations);
            avg.wall_ms += row.wall_ms;
          }
          const double t = spec.trials;
          avg.rate /= t;
          avg.sum_rate /= t;
          for (double& v : avg.leakage_mw) v /= t;
          avg.iterations = std::lround(iter_sum / t);
          avg.wall_ms /= t;
          result.rows.push_back(std::move(avg));
        }
      }
    }
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "sweep_value_dbm,scheme,trial,user,channel,rate_bps_hz,sum_rate_bps_hz";
  for (int j = 0; j < result.n_pairs; ++j) os << ",leakage_mw_" << (j + 1);
  os << ",iterations,wall_ms\n";
  for (const SweepRow& row : result.rows) {
    os << fmt_num(row.sweep_value_dbm) << ',' << scheme_name(row.scheme) << ',' << row.trial
       << ',' << row.user << ',' << row.channel << ',' << fmt_num(row.rate) << ','
       << fmt_num(row.sum_rate);
    for (double v : row.leakage_mw) os << ',' << fmt_num(v);
    os << ',' << row.iterations << ',' << fmt_num(row.wall_ms) << '\n';
  }
  return os.str();
}

ValidationReport validate_approx(const ExperimentSpec& spec, std::uint64_t seed, int threads) {
  spec.validate();
  const int k = spec.scenario.n_pairs;
  const RngStream root(seed);
  RngStream geom_rng = RngStream(spec.geometry_seed).split(kGeomTag);
  const Geometry geom = sample_geometry(spec.scenario, spec.scenario.region, geom_rng);

  std::vector<std::vector<ValidationRow>> per_trial(spec.trials);
  parallel_for(spec.trials, threads, [&](int trial) {
    RngStream shadow_rng = root.split(kShadowTag, trial);
    const LargeScaleState ls = derive_large_scale(geom, spec.scenario, shadow_rng);
    std::vector<ValidationRow>& rows = per_trial[trial];
    rows.reserve(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const PairContext ctx = make_pair_context(spec.scenario, ls, i, j);
        const PowerConstraints c = make_pair_constraints(spec.scenario, ls, i, j);
        const PairSolution sol = solve_pair(ctx, c);
        RngStream mc_rng = root.split(kMcTag, trial).split(static_cast<std::uint64_t>(i) * k + j);
        const McEstimate mc = ergodic_rate_mc(ctx, sol.p_star, spec.mc_validation.samples, mc_rng);
        ValidationRow row;
        row.trial = trial;
        row.user = i;
        row.channel = j;
        row.upsilon = sol.rate;
        row.mc_mean = mc.mean;
        row.mc_std_error = mc.std_error;
        row.rel_gap = mc.mean > 0.0 ? std::abs(sol.rate - mc.mean) / mc.mean
                                    : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
      }
  });

  ValidationReport report;
  for (const auto& rows : per_trial)
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());

  std::vector<double> gaps;
  for (const ValidationRow& row : report.rows)
    if (std::isfinite(row.rel_gap)) gaps.push_back(row.rel_gap);
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    report.median_gap = n % 2 == 1 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
    report.max_gap = gaps.back();
  }
  return report;
}

std::string validation_to_csv(const ValidationReport& report) {
  std::ostringstream os;
  os << "trial,user,channel,upsilon_bps_hz,mc_mean_bps_hz,mc_stderr_bps_hz,rel_gap\n";
  for (const ValidationRow& row : report.rows) {
    os << row.trial << ',' << row.user << ',' << row.channel << ',' << fmt_num(row.upsilon)
       << ',' << fmt_num(row.mc_mean) << ',' << fmt_num(row.mc_std_error) << ',';
    if (std::isfinite(row.rel_gap)) os << fmt_num(row.rel_gap);
    os << '\n';
  }
  return os.str();
}

namespace {

const std::set<std::string> kSpecKeys = {"scenario",      "scenario_file", "geometry_seed",
                                         "sweep",         "schemes",       "mc_validation",
                                         "trials",        "timing"};

Scheme scheme_from_name(const std::string& name) {
  if (name == "proposed") return Scheme::proposed;
  if (name == "waterfilling") return Scheme::waterfilling;
  if (name == "equal_power") return Scheme::equal_power;
  if (name == "random_assignment") return Scheme::random_assignment;
  if (name == "exhaustive") return Scheme::exhaustive;
  throw ConfigError("config error: unknown scheme '" + name + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config error: cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentSpec spec_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config error: top level must be an object");
  if (j.contains("n_bs") || j.contains("n_pairs"))
    throw ConfigError(
        "config error: this looks like a scenario file; embed it under the 'scenario' key of "
        "an experiment spec, or reference it with 'scenario_file'");
  for (const auto& item : j.items())
    if (kSpecKeys.find(item.key()) == kSpecKeys.end())
      throw ConfigError("config error: unknown key '" + item.key() + "'");

  ExperimentSpec spec;
  if (j.contains("scenario") && j.contains("scenario_file"))
    throw ConfigError("config error: give either 'scenario' or 'scenario_file', not both");
  if (j.contains("scenario")) {
    spec.scenario = config_from_json(j["scenario"].dump());
    if (j["scenario"].contains("geometry_seed"))
      spec.geometry_seed = j["scenario"]["geometry_seed"].get<std::uint64_t>();
  } else if (j.contains("scenario_file")) {
    const std::string text = read_file(j["scenario_file"].get<std::string>());
    spec.scenario = config_from_json(text);
    const json sj = json::parse(text);
    if (sj.contains("geometry_seed"))
      spec.geometry_seed = sj["geometry_seed"].get<std::uint64_t>();
  } else {
    spec.scenario = default_config();
  }

  if (j.contains("geometry_seed")) {
    if (!j["geometry_seed"].is_number_unsigned() && !j["geometry_seed"].is_number_integer())
      throw ConfigError("config error: 'geometry_seed' must be an integer");
    spec.geometry_seed = j["geometry_seed"].get<std::uint64_t>();
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (!s.is_object()) throw ConfigError("config error: 'sweep' must be an object");
    if (s.contains("parameter")) {
      if (!s["parameter"].is_string())
        throw ConfigError("config error: 'sweep.parameter' must be a string");
      spec.sweep.parameter = s["parameter"].get<std::string>();
    }
    if (!s.contains("values_dbm") || !s["values_dbm"].is_array())
      throw ConfigError("config error: 'sweep.values_dbm' must be an array");
    for (const auto& v : s["values_dbm"]) {
      if (!v.is_number())
        throw ConfigError("config error: 'sweep.values_dbm' entries must be numbers");
      spec.sweep.values_dbm.push_back(v.get<double>());
    }
  } else {
    for (int v = 0; v <= 40; v += 5) spec.sweep.values_dbm.push_back(v);
  }

  if (j.contains("schemes")) {
    if (!j["schemes"].is_array()) throw ConfigError("config error: 'schemes' must be an array");
    for (const auto& s : j["schemes"]) {
      if (!s.is_string()) throw ConfigError("config error: 'schemes' entries must be strings");
      spec.schemes.push_back(scheme_from_name(s.get<std::string>()));
    }
  } else {
    spec.schemes = {Scheme::proposed, Scheme::waterfilling, Scheme::equal_power,
                    Scheme::random_assignment, Scheme::exhaustive};
  }

  if (j.contains("mc_validation")) {
    const json& m = j["mc_validation"];
    if (!m.is_object()) throw ConfigError("config error: 'mc_validation' must be an object");
    if (m.contains("enabled")) {
      if (!m["enabled"].is_boolean())
        throw ConfigError("config error: 'mc_validation.enabled' must be a boolean");
      spec.mc_validation.enabled = m["enabled"].get<bool>();
    }
    if (m.contains("samples")) {
      if (!m["samples"].is_number_integer() && !m["samples"].is_number_unsigned())
        throw ConfigError("config error: 'mc_validation.samples' must be an integer");
      spec.mc_validation.samples = m["samples"].get<long>();
    }
  }

  if (j.contains("trials")) {
    if (!j["trials"].is_number_integer() && !j["trials"].is_number_unsigned())
      throw ConfigError("config error: 'trials' must be an integer");
    spec.trials = j["trials"].get<int>();
  }
  if (j.contains("timing")) {
    if (!j["timing"].is_boolean()) throw ConfigError("config error: 'timing' must be a boolean");
    spec.timing = j["timing"].get<bool>();
  }

  spec.validate();
  return spec;
}

ExperimentSpec spec_from_file(const std::string& path) {
  return spec_from_json(read_file(path));
}

std::string solve_report_json(const ScenarioConfig& cfg, const LargeScaleState& ls,
                              const PipelineResult& res) {
  const int k = cfg.n_pairs;
  json out;
  out["sum_rate_bps_hz"] = res.sum_rate;
  out["iterations"] = res.iterations;

  json entries = json::array();
  for (int user = 0; user < k; ++user) {
    const int channel = res.assignment.perm[user];
    const PairSolution& sol = res.table.solutions[user][channel];
    json e;
    e["user"] = user;
    e["channel"] = channel;
    e["rate_bps_hz"] = sol.rate;
    e["power_mw"] = sol.p_star.p;
    const PowerConstraints c = make_pair_constraints(cfg, ls, user, channel);
    e["leakage_mw"] = leakage(sol.p_star, c);
    entries.push_back(std::move(e));
  }
  out["assignment"] = entries;
  out["rate_table_bps_hz"] = res.table.r;
  return out.dump(2);
}

}  // namespace hstn
