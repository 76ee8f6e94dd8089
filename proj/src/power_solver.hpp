#pragma once

#include <vector>

#include "rate_model.hpp"

namespace hstn {

// Feasible power region of one pair: total-power budget and the expected
// leakage cap at the co-channel satellite terminal. leak_coeff_n folds the
// array suppression into the squared BS->satellite gain: nu^2 (l^s_n)^2.
struct PowerConstraints {
  double budget = 0.0;          // P, linear mW
  double leak_threshold = 0.0;  // linear mW
  std::vector<double> leak_coeff;

  void validate() const;
};

struct PairSolution {
  PowerAllocation p_star;
  double rate = 0.0;    // upsilon at p_star, bit/s/Hz
  double x_star = 0.0;  // ln chi at p_star
  double fw_gap = 0.0;  // Frank-Wolfe duality gap at p_star
  int iterations = 0;
};

// Expected leakage sum_n p_n leak_coeff_n, linear mW.
double leakage(const PowerAllocation& p, const PowerConstraints& c);

// Vertices of {p >= 0, sum p <= budget, leak_coeff . p <= threshold}. Each
// vertex has at most two nonzero coordinates: the origin, the capped axis
// points, and the budget/leakage pairwise intersections.
std::vector<PowerAllocation> polytope_vertices(const PairContext& ctx,
                                               const PowerConstraints& c);

struct SolveOptions {
  int max_iterations = 64;
  double rel_gap = 1e-6;
  double abs_gap = 1e-9;
};

// Maximizes upsilon over the constraint polytope by Frank-Wolfe with exact
// (golden-section) line search; the gradient comes from the inner minimizer
// via Danskin. Deterministic; never fails on finite inputs.
PairSolution solve_pair(const PairContext& ctx, const PowerConstraints& c,
                        const SolveOptions& opt = {});

// Waterfilling on the zero-power rate slopes g_n M / denom against the
// budget, then a uniform down-scaling if the leakage cap is exceeded.
PairSolution waterfilling_baseline(const PairContext& ctx, const PowerConstraints& c);

// budget/N on every BS, with the same leakage rescaling rule.
PairSolution equal_power_baseline(const PairContext& ctx, const PowerConstraints& c);

// Brute-force maximum of upsilon over a uniform grid on [0, budget]^N
// filtered by feasibility. Testing oracle; requires N <= 3 and
// resolution >= 2 grid points per axis.
double grid_oracle(const PairContext& ctx, const PowerConstraints& c, int resolution);

}  // namespace hstn
