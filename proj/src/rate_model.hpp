#pragma once

#include <vector>

namespace hstn {

// Static data of one (user, channel) pair: squared large-scale gains of the
// N BS links, the interference-plus-noise floor at the user, and the user's
// antenna count.
struct PairContext {
  std::vector<double> gains_sq;  // (l^t_n)^2, power gains, one per BS
  double denom = 0.0;            // satellite interference + noise, linear mW
  int n_antennas = 0;            // M

  int n_bs() const { return static_cast<int>(gains_sq.size()); }
  void validate() const;  // throws std::invalid_argument
};

// Per-BS transmit powers for one pair, linear mW.
struct PowerAllocation {
  std::vector<double> p;

  void validate() const;
};

// Solution of the fixed-point equation chi = 1 + sum_n rho_n chi / (chi + rho_n M),
// rho_n = p_n g_n / denom.
struct ChiSolution {
  double chi = 1.0;
  double residual = 0.0;
};

// residual(chi) = chi - 1 - sum_n p_n g_n chi / (denom chi + p_n g_n M).
// Zero exactly at the fixed point; negative below it, positive above.
double chi_residual(const PairContext& ctx, const PowerAllocation& p, double chi);

// Unique root chi >= 1 of chi_residual, found by bisection on the analytic
// bracket [1, 1 + sum_n p_n g_n / denom] and polished with Newton steps.
ChiSolution solve_chi(const PairContext& ctx, const PowerAllocation& p);

// y(x) = sum_n log2(1 + p_n g_n M / (denom e^x)) + M log2(e) (x + e^-x),
// defined on x >= 0. Convex in x; its minimizer is x = ln(chi).
double y_value(const PairContext& ctx, const PowerAllocation& p, double x);

// Analytic first and second derivatives of y_value in x. d2y_dx2 > 0 always.
double dy_dx(const PairContext& ctx, const PowerAllocation& p, double x);
double d2y_dx2(const PairContext& ctx, const PowerAllocation& p, double x);

struct InnerMin {
  double x_star = 0.0;
  double y_min = 0.0;
};

// min_{x >= 0} y(x), attained at x = ln(solve_chi(...).chi).
InnerMin inner_min_x(const PairContext& ctx, const PowerAllocation& p);

// Deterministic-equivalent ergodic rate of the pair, bit/s/Hz:
// upsilon = min_x y(x) - M log2(e).
double upsilon(const PairContext& ctx, const PowerAllocation& p);

// Same quantity evaluated through the original three-term expression at a
// given chi. Agrees with upsilon() at chi = solve_chi(...).chi; kept as an
// independent route for consistency checks.
double upsilon_direct(const PairContext& ctx, const PowerAllocation& p, double chi);

// Gradient d upsilon / d p_n at the inner minimizer (Danskin): the partial
// derivatives of y in p evaluated at x = ln(chi).
std::vector<double> upsilon_gradient(const PairContext& ctx, const PowerAllocation& p,
                                     double chi);

}  // namespace hstn
