#include "rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "units.hpp"

namespace hstn {

namespace {

// Per-BS SNR ratios rho_n = p_n g_n / denom. Everything downstream depends
// on the inputs only through these.
std::vector<double> snr_ratios(const PairContext& ctx, const PowerAllocation& p) {
  if (p.p.size() != ctx.gains_sq.size())
    throw std::invalid_argument("power vector length does not match pair context");
  std::vector<double> rho(p.p.size());
  for (std::size_t n = 0; n < rho.size(); ++n) rho[n] = p.p[n] * ctx.gains_sq[n] / ctx.denom;
  return rho;
}

double residual_at(const std::vector<double>& rho, int m, double chi) {
  // Kahan summation keeps the residual meaningful when chi is large and the
  // summands nearly cancel against chi - 1.
  double sum = 0.0, comp = 0.0;
  for (double r : rho) {
    const double term = r * chi / (chi + r * m);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return chi - 1.0 - sum;
}

double residual_slope(const std::vector<double>& rho, int m, double chi) {
  double sum = 0.0;
  for (double r : rho) {
    const double d = chi + r * m;
    sum += r * r * m / (d * d);
  }
  return 1.0 - sum;
}

}  // namespace

void PairContext::validate() const {
  if (n_antennas < 1) throw std::invalid_argument("pair context: n_antennas must be >= 1");
  if (gains_sq.empty()) throw std::invalid_argument("pair context: gains_sq must be nonempty");
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw std::invalid_argument("pair context: denom must be positive and finite");
  for (double g : gains_sq)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw std::invalid_argument("pair context: gains_sq entries must be finite and >= 0");
}

void PowerAllocation::validate() const {
  for (double v : p)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("power allocation: entries must be finite and >= 0");
}

double chi_residual(const PairContext& ctx, const PowerAllocation& p, double chi) {
  return residual_at(snr_ratios(ctx, p), ctx.n_antennas, chi);
}

ChiSolution solve_chi(const PairContext& ctx, const PowerAllocation& p) {
  const std::vector<double> rho = snr_ratios(ctx, p);
  const int m = ctx.n_antennas;

  double hi = 1.0;
  for (double r : rho) hi += r;  // each summand is at most rho_n, so chi <= 1 + sum rho
  if (hi == 1.0) return {1.0, 0.0};

  double lo = 1.0;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket narrowed to adjacent doubles
    if (residual_at(rho, m, mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }

  // Newton polish; the residual is convex and increasing through the root,
  // so steps from the bisection result stay well-behaved.
  double chi = 0.5 * (lo + hi);
  double best = chi;
  double best_res = std::abs(residual_at(rho, m, chi));
  for (int it = 0; it < 3; ++it) {
    const double r = residual_at(rho, m, chi);
    const double s = residual_slope(rho, m, chi);
    if (!(s > 0.0)) break;
    const double next = chi - r / s;
    if (!std::isfinite(next) || next < 1.0) break;
    chi = next;
    const double res = std::abs(residual_at(rho, m, chi));
    if (res < best_res) {
      best_res = res;
      best = chi;
    }
  }
  return {best, residual_at(rho, m, best)};
}

double y_value(const PairContext& ctx, const PowerAllocation& p, double x) {
  const std::vector<double> rho = snr_ratios(ctx, p);
  const int m = ctx.n_antennas;
  const double emx = std::exp(-x);
  double sum = 0.0;
  for (double r : rho) sum += std::log1p(r * m * emx);
  return kLog2E * sum + m * kLog2E * (x + emx);
}

double dy_dx(const PairContext& ctx, const PowerAllocation& p, double x) {
  const std::vector<double> rho = snr_ratios(ctx, p);
  const int m = ctx.n_antennas;
  const double ex = std::exp(x);
  double sum = 0.0;
  for (double r : rho) sum += r / (ex + r * m);
  return m * kLog2E * (1.0 - std::exp(-x)) - m * kLog2E * sum;
}

double d2y_dx2(const PairContext& ctx, const PowerAllocation& p, double x) {
  const std::vector<double> rho = snr_ratios(ctx, p);
  const int m = ctx.n_antennas;
  const double ex = std::exp(x);
  double sum = 0.0;
  for (double r : rho) {
    const double d = ex + r * m;
    sum += r * ex / (d * d);
  }
  return m * kLog2E * std::exp(-x) + m * kLog2E * sum;
}

InnerMin inner_min_x(const PairContext& ctx, const PowerAllocation& p) {
  const ChiSolution sol = solve_chi(ctx, p);
  const double x_star = std::log(sol.chi);
  return {x_star, y_value(ctx, p, x_star)};
}

double upsilon(const PairContext& ctx, const PowerAllocation& p) {
  const InnerMin im = inner_min_x(ctx, p);
  return im.y_min - ctx.n_antennas * kLog2E;
}

double upsilon_direct(const PairContext& ctx, const PowerAllocation& p, double chi) {
  const std::vector<double> rho = snr_ratios(ctx, p);
  const int m = ctx.n_antennas;
  double t1 = 0.0, bracket = 0.0, t3 = 0.0;
  for (double r : rho) {
    const double d = chi + r * m;
    t1 += std::log1p(r * m / chi);
    bracket += r * chi / d;
    t3 += r / d;
  }
  return kLog2E * t1 + m * kLog2E * std::log1p(bracket) - m * kLog2E * t3;
}

std::vector<double> upsilon_gradient(const PairContext& ctx, const PowerAllocation& p,
                                     double chi) {
  const int m = ctx.n_antennas;
  std::vector<double> grad(ctx.gains_sq.size());
  for (std::size_t n = 0; n < grad.size(); ++n) {
    const double g = ctx.gains_sq[n];
    grad[n] = kLog2E * g * m / (ctx.denom * chi + p.p[n] * g * m);
  }
  return grad;
}

}  // namespace hstn
