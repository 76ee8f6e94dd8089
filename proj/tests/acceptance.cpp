// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "hstn/hstn.h"
#include "mc_oracle.hpp"
#include "test_util.hpp"
#include "units.hpp"

using namespace hstn;
using testutil::random_pair;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("%s  [%d] %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str(), seconds);
  if (!pass) ++g_failures;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// 1. Matching optimality: Hungarian total == exhaustive total, bitwise,
//    over 200 random tables with K in 2..7.
void criterion_matching() {
  Timer timer;
  RngStream rng(1001);
  int exact = 0;
  const int cases = 200;
  for (int rep = 0; rep < cases; ++rep) {
    const int k = 2 + static_cast<int>(rng.below(6));
    std::vector<std::vector<double>> r(k, std::vector<double>(k));
    for (auto& row : r)
      for (double& v : row) v = rng.uniform(0.0, 10.0);
    const MatchResult km = kuhn_munkres(r);
    const MatchResult ex = exhaustive_oracle(r);
    if (km.total == ex.total && km.assignment.is_permutation()) ++exact;
  }
  report(1, "matching optimality (Hungarian == exhaustive)", exact == cases,
         fmt("%g/200 tables bitwise-equal totals", exact), timer.seconds());
}

// 2. Deterministic-equivalent accuracy: 50 random cases at M = N = 4 vs
//    1e5-sample MC (median <= 3%, max <= 8%), plus the closed-form single
//    link sanity point.
void criterion_accuracy() {
  Timer timer;
  RngStream rng(1002);
  std::vector<double> gaps;
  for (int rep = 0; rep < 50; ++rep) {
    auto rp = random_pair(rng, 4, 4, 0.1, 100.0);
    const double ups = upsilon(rp.ctx, rp.p);
    RngStream mc_rng = rng.split(900 + rep);
    const McEstimate mc = ergodic_rate_mc(rp.ctx, rp.p, 100000, mc_rng);
    gaps.push_back(std::abs(ups - mc.mean) / mc.mean);
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = 0.5 * (gaps[24] + gaps[25]);
  const double worst = gaps.back();

  // single link at unit SNR: quadratic-formula chi against the
  // exponential-integral ergodic value
  PairContext ctx;
  ctx.gains_sq = {1.0};
  ctx.denom = 1.0;
  ctx.n_antennas = 1;
  PowerAllocation p;
  p.p = {1.0};
  const double ups1 = upsilon(ctx, p);
  const double chi = testutil::chi_quadratic_oracle(1.0);
  const double ups1_closed =
      std::log2(1.0 + 1.0 / chi) + kLog2E * (std::log(chi) + 1.0 / chi) - kLog2E;
  const double ergodic1 = testutil::scalar_ergodic_rate(1.0);
  const double gap1 = (ergodic1 - ups1) / ergodic1;
  const bool scalar_ok = std::abs(ups1 - ups1_closed) < 1e-9 &&
                         std::abs(ups1_closed - 0.8374233570) < 1e-9 &&
                         std::abs(ergodic1 - 0.8603473823) < 1e-9 && gap1 > 0.02 &&
                         gap1 < 0.035;

  report(2, "deterministic-equivalent accuracy vs MC",
         median <= 0.03 && worst <= 0.08 && scalar_ok,
         fmt("median %.4f (<=0.03), max %.4f (<=0.08), scalar gap %.4f", median, worst, gap1),
         timer.seconds());
}

// 3. Saddle-point correctness on 50 random N = 2 instances: solver beats the
//    201x201 grid within 1e-3 and the inner derivative vanishes.
void criterion_saddle() {
  Timer timer;
  RngStream rng(1003);
  int ok = 0;
  double worst_deficit = 0.0, worst_stat = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    PairContext ctx;
    ctx.n_antennas = 1 + static_cast<int>(rng.below(4));
    ctx.denom = 1.0;
    ctx.gains_sq = {std::exp(rng.uniform(std::log(0.05), std::log(20.0))),
                    std::exp(rng.uniform(std::log(0.05), std::log(20.0)))};
    PowerConstraints c;
    c.leak_coeff = {std::exp(rng.uniform(std::log(0.01), std::log(1.0))),
                    std::exp(rng.uniform(std::log(0.01), std::log(1.0)))};
    c.budget = std::exp(rng.uniform(std::log(0.5), std::log(50.0)));
    c.leak_threshold = c.budget * std::exp(rng.uniform(std::log(0.005), std::log(1.0)));

    const PairSolution sol = solve_pair(ctx, c);
    const double grid = grid_oracle(ctx, c, 201);
    const double stationarity = std::abs(dy_dx(ctx, sol.p_star, sol.x_star));
    worst_deficit = std::max(worst_deficit, grid - sol.rate);
    worst_stat = std::max(worst_stat, stationarity);
    if (sol.rate >= grid - 1e-3 && stationarity <= 1e-8) ++ok;
  }
  report(3, "saddle-point solver vs grid oracle", ok == 50,
         fmt("%g/50 ok, worst grid deficit %.2e, worst |dy/dx| %.2e", ok, worst_deficit,
             worst_stat),
         timer.seconds());
}

// 4. Derivative identities against central finite differences of the
//    long-double y oracle (h = 1e-6 for dy/dx, 3e-5 for the second
//    difference so FD noise stays below the 1e-9 floor), plus strict
//    convexity in x, over 1000 random points.
void criterion_derivatives() {
  Timer timer;
  RngStream rng(1004);
  const long double h1 = 1e-6L;
  const long double h2 = 3e-5L;
  int ok = 0;
  const int cases = 1000;
  double worst1 = 0.0, worst2 = 0.0;
  for (int rep = 0; rep < cases; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(8));
    auto rp = random_pair(rng, n, m);
    const double x = rng.uniform(1e-6, 6.0);

    const double fd1 = static_cast<double>(
        (testutil::y_oracle(rp.ctx, rp.p, x + h1) - testutil::y_oracle(rp.ctx, rp.p, x - h1)) /
        (2.0L * h1));
    const double fd2 = static_cast<double>((testutil::y_oracle(rp.ctx, rp.p, x + h2) -
                                            2.0L * testutil::y_oracle(rp.ctx, rp.p, x) +
                                            testutil::y_oracle(rp.ctx, rp.p, x - h2)) /
                                           (h2 * h2));

    const double d1 = dy_dx(rp.ctx, rp.p, x);
    const double d2 = d2y_dx2(rp.ctx, rp.p, x);
    const double err1 = std::abs(d1 - fd1);
    const double err2 = std::abs(d2 - fd2);
    worst1 = std::max(worst1, err1 / std::max(1e-6 * std::abs(fd1), 1e-9));
    worst2 = std::max(worst2, err2 / std::max(1e-6 * std::abs(fd2), 1e-9));
    const bool first_ok = err1 <= std::max(1e-6 * std::abs(fd1), 1e-9);
    const bool second_ok = err2 <= std::max(1e-6 * std::abs(fd2), 1e-9);
    if (first_ok && second_ok && d2 > 0.0) ++ok;
  }
  report(4, "derivative identities vs finite differences", ok == cases,
         fmt("%g/1000 matched; worst err/budget: dy %.2f, d2y %.2f", ok, worst1, worst2),
         timer.seconds());
}

// 5. Fixed point: residual <= 1e-10 on 1e4 random inputs, chi = 1 at zero
//    power, golden-ratio chi on the reduced case.
void criterion_fixed_point() {
  Timer timer;
  RngStream rng(1005);
  int ok = 0;
  const int cases = 10000;
  double worst = 0.0;
  for (int rep = 0; rep < cases; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(8));
    auto rp = random_pair(rng, n, m, 1e-3, 1e3);
    const ChiSolution sol = solve_chi(rp.ctx, rp.p);
    worst = std::max(worst, std::abs(sol.residual));
    if (std::abs(sol.residual) <= 1e-10 && sol.chi >= 1.0) ++ok;
  }

  PairContext ctx;
  ctx.gains_sq = {1.0};
  ctx.denom = 1.0;
  ctx.n_antennas = 1;
  PowerAllocation zero, unit;
  zero.p = {0.0};
  unit.p = {1.0};
  const bool zero_ok = solve_chi(ctx, zero).chi == 1.0;
  const double golden = 0.5 * (1.0 + std::sqrt(5.0));
  const bool golden_ok = std::abs(solve_chi(ctx, unit).chi - golden) <= 1e-9;

  report(5, "fixed-point solver", ok == cases && zero_ok && golden_ok,
         fmt("%g/10000 within 1e-10 (worst %.2e), chi(0)=1, golden ratio ok",
             static_cast<double>(ok), worst),
         timer.seconds());
}

// 6. Scheme ordering on the reference scenario swept over the default
//    budget range, 50 trials: proposed >= waterfilling >= 0, proposed >=
//    equal power, monotone in budget, leakage audited everywhere.
void criterion_ordering() {
  Timer timer;
  ExperimentSpec spec;
  spec.scenario = default_config();
  spec.geometry_seed = 1;
  spec.sweep.parameter = "power_budget";
  for (int v = 0; v <= 40; v += 5) spec.sweep.values_dbm.push_back(v);
  spec.schemes = {Scheme::proposed, Scheme::waterfilling, Scheme::equal_power};
  spec.trials = 50;

  const SweepResult result = run_sweep(spec, 1006, 0 /* single thread default */);

  auto avg_sum = [&](double value, Scheme s) {
    for (const SweepRow& row : result.rows)
      if (row.trial == -1 && row.user == 0 && row.sweep_value_dbm == value && row.scheme == s)
        return row.sum_rate;
    return -1.0;
  };

  bool ordering = true, monotone = true, leak_ok = true;
  double prev = -1.0;
  for (double v : spec.sweep.values_dbm) {
    const double proposed = avg_sum(v, Scheme::proposed);
    const double wf = avg_sum(v, Scheme::waterfilling);
    const double eq = avg_sum(v, Scheme::equal_power);
    if (!(proposed >= wf && wf >= 0.0 && proposed >= eq)) ordering = false;
    // nondecreasing within the per-pair solver's relative gap tolerance
    if (proposed < prev - std::max(2e-6 * prev, 1e-9)) monotone = false;
    prev = proposed;
  }
  const double cap = dbm_to_mw(-117.0) * (1.0 + 1e-9);
  for (const SweepRow& row : result.rows)
    for (double leak : row.leakage_mw)
      if (leak > cap) leak_ok = false;

  report(6, "scheme ordering over the budget sweep", ordering && monotone && leak_ok,
         std::string("proposed >= waterfilling >= 0, proposed >= equal power: ") +
             (ordering ? "yes" : "NO") + "; monotone: " + (monotone ? "yes" : "NO") +
             "; leakage <= -117 dBm: " + (leak_ok ? "yes" : "NO"),
         timer.seconds());
}

// 7. Leakage expectation identity: MC mean within 3 standard errors of the
//    analytic leakage on 20 random cases.
void criterion_leakage_mc() {
  Timer timer;
  RngStream rng(1007);
  int ok = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(6));
    PowerConstraints c;
    c.budget = 1.0;
    c.leak_threshold = 1.0;
    c.leak_coeff.resize(n);
    PowerAllocation p;
    p.p.resize(n);
    for (int i = 0; i < n; ++i) {
      c.leak_coeff[i] = std::exp(rng.uniform(std::log(1e-4), std::log(1.0)));
      p.p[i] = rng.uniform(0.0, 5.0);
    }
    RngStream mc_rng = rng.split(700 + rep);
    const McEstimate est = ergodic_leakage_mc(c, p, 10000, mc_rng);
    if (std::abs(est.mean - leakage(p, c)) <= 3.0 * est.std_error) ++ok;
  }
  report(7, "leakage expectation identity", ok == 20, fmt("%g/20 within 3 std errors", ok),
         timer.seconds());
}

// 8. Reproducibility: identical spec + seed => byte-identical CSV, checked
//    through the shared-library API.
void criterion_reproducibility() {
  Timer timer;
  const char* spec = R"({
    "scenario": {"n_bs": 3, "n_pairs": 2, "n_antennas": 2, "noise_power_dbm": -107,
                 "power_budget_dbm": 10, "leak_threshold_dbm": -117},
    "sweep": {"parameter": "power_budget", "values_dbm": [0, 10, 20]},
    "schemes": ["proposed", "waterfilling", "equal_power", "random_assignment", "exhaustive"],
    "trials": 3
  })";
  char* a = nullptr;
  char* b = nullptr;
  const bool ok_a = hstn_sweep_to_string(spec, 77, 1, &a) == HSTN_OK;
  const bool ok_b = hstn_sweep_to_string(spec, 77, 4, &b) == HSTN_OK;
  const bool equal = ok_a && ok_b && std::string(a) == b;
  if (a) hstn_string_free(a);
  if (b) hstn_string_free(b);
  report(8, "sweep reproducibility (byte-identical CSV)", equal,
         equal ? "two runs, different thread counts, identical bytes" : "CSV outputs differ",
         timer.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_matching();
  criterion_accuracy();
  criterion_saddle();
  criterion_derivatives();
  criterion_fixed_point();
  criterion_ordering();
  criterion_leakage_mc();
  criterion_reproducibility();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
