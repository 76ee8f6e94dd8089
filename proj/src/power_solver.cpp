#include "power_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "units.hpp"

namespace hstn {

namespace {

constexpr double kGolden = 0.6180339887498948482;  // 1/phi

double min_y(const PairContext& ctx, const PowerAllocation& p) {
  return inner_min_x(ctx, p).y_min;
}

// Golden-section maximization of the concave slice gamma -> min_x y(p + gamma d)
// over [0, max_step]. Returns the best gamma among all evaluated points,
// endpoints included, so the caller never steps to a worse point.
double line_search(const PairContext& ctx, const PowerAllocation& base,
                   const std::vector<double>& dir, double max_step, double& best_val) {
  const std::size_t n = base.p.size();
  PowerAllocation probe;
  probe.p.resize(n);
  auto eval = [&](double gamma) {
    for (std::size_t i = 0; i < n; ++i) probe.p[i] = std::max(0.0, base.p[i] + gamma * dir[i]);
    return min_y(ctx, probe);
  };

  double best_gamma = 0.0;
  best_val = eval(0.0);
  const double full = eval(max_step);
  if (full > best_val) {
    best_val = full;
    best_gamma = max_step;
  }

  double lo = 0.0, hi = max_step;
  double g1 = hi - kGolden * (hi - lo);
  double g2 = lo + kGolden * (hi - lo);
  double f1 = eval(g1), f2 = eval(g2);
  for (int it = 0; it < 64 && hi - lo > 1e-14 * max_step; ++it) {
    if (f1 < f2) {
      lo = g1;
      g1 = g2;
      f1 = f2;
      g2 = lo + kGolden * (hi - lo);
      f2 = eval(g2);
    } else {
      hi = g2;
      g2 = g1;
      f2 = f1;
      g1 = hi - kGolden * (hi - lo);
      f1 = eval(g1);
    }
    if (f1 > best_val) {
      best_val = f1;
      best_gamma = g1;
    }
    if (f2 > best_val) {
      best_val = f2;
      best_gamma = g2;
    }
  }
  return best_gamma;
}

PairSolution finish(const PairContext& ctx, PowerAllocation p, double fw_gap, int iterations) {
  PairSolution sol;
  const InnerMin im = inner_min_x(ctx, p);
  sol.p_star = std::move(p);
  sol.rate = im.y_min - ctx.n_antennas * kLog2E;
  sol.x_star = im.x_star;
  sol.fw_gap = fw_gap;
  sol.iterations = iterations;
  return sol;
}

// argmax_p sum_n log(1 + a_n p_n) over {p >= 0, sum p <= P, c . p <= T} by
// the two-multiplier waterfilling p_n = 1/(lambda + mu c_n) - 1/a_n, with
// lambda found by bisection against the budget for each mu, and mu found by
// bisection against the leakage cap.
PowerAllocation waterfill_two_constraints(std::vector<double> a, const std::vector<double>& c,
                                          double budget, double threshold) {
  const int n = static_cast<int>(a.size());
  PowerAllocation p;
  p.p.assign(n, 0.0);
  if (budget <= 0.0) return p;
  if (threshold <= 0.0) {
    // coordinates that leak at all are pinned to zero
    for (int i = 0; i < n; ++i)
      if (c[i] > 0.0) a[i] = 0.0;
  }

  double a_max = 0.0;
  for (double v : a) a_max = std::max(a_max, v);
  if (a_max == 0.0) return p;

  auto fill = [&](double lam, double mu, PowerAllocation& out) {
    for (int i = 0; i < n; ++i) {
      if (a[i] <= 0.0) {
        out.p[i] = 0.0;
        continue;
      }
      const double d = lam + mu * c[i];
      const double level = d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
      out.p[i] = std::min(budget, std::max(0.0, level - 1.0 / a[i]));
    }
  };
  PowerAllocation probe;
  probe.p.assign(n, 0.0);
  auto total_at = [&](double lam, double mu) {
    fill(lam, mu, probe);
    double s = 0.0;
    for (double v : probe.p) s += v;
    return s;
  };
  auto leak_at = [&](double lam, double mu) {
    fill(lam, mu, probe);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += c[i] * probe.p[i];
    return s;
  };

  // budget multiplier for a fixed leakage multiplier
  auto lambda_for = [&](double mu) {
    if (total_at(0.0, mu) <= budget) return 0.0;
    double lo = 0.0, hi = a_max;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (total_at(mid, mu) > budget)
        lo = mid;
      else
        hi = mid;
    }
    return hi;  // the feasible side of the bracket
  };

  double mu = 0.0;
  if (leak_at(lambda_for(0.0), 0.0) > threshold) {
    double mu_hi = 0.0;
    for (int i = 0; i < n; ++i)
      if (c[i] > 0.0 && a[i] > 0.0) mu_hi = std::max(mu_hi, a[i] / c[i]);
    double lo = 0.0, hi = mu_hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (leak_at(lambda_for(mid), mid) > threshold)
        lo = mid;
      else
        hi = mid;
    }
    mu = hi;
  }

  fill(lambda_for(mu), mu, p);

  // trim bisection residue so the point is strictly feasible
  double total = 0.0, leak = 0.0;
  for (int i = 0; i < n; ++i) {
    total += p.p[i];
    leak += c[i] * p.p[i];
  }
  double scale = 1.0;
  if (total > budget) scale = std::min(scale, budget / total);
  if (leak > threshold && leak > 0.0) scale = std::min(scale, threshold / leak);
  if (scale < 1.0)
    for (double& v : p.p) v *= scale;
  return p;
}

// Near-exact solution of max_p min_x y via the dual order min_x max_p y:
// the inner maximization is the waterfilling above, the outer minimization
// is one-dimensional and convex in x.
PowerAllocation saddle_refine(const PairContext& ctx, const PowerConstraints& c) {
  const int n = ctx.n_bs();
  const int m = ctx.n_antennas;

  // per-coordinate power caps bound chi, hence the search interval for x
  double rho_cap = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cap =
        c.leak_coeff[i] > 0.0 ? std::min(c.budget, c.leak_threshold / c.leak_coeff[i])
                              : c.budget;
    rho_cap += ctx.gains_sq[i] * cap / ctx.denom;
  }
  const double x_hi = std::log1p(rho_cap);

  std::vector<double> slopes(n);
  auto best_power = [&](double x) {
    const double scale = std::exp(-x) * m / ctx.denom;
    for (int i = 0; i < n; ++i) slopes[i] = ctx.gains_sq[i] * scale;
    return waterfill_two_constraints(slopes, c.leak_coeff, c.budget, c.leak_threshold);
  };
  auto h = [&](double x) {
    const PowerAllocation p = best_power(x);
    return y_value(ctx, p, x);
  };

  double lo = 0.0, hi = x_hi;
  double g1 = hi - kGolden * (hi - lo);
  double g2 = lo + kGolden * (hi - lo);
  double f1 = h(g1), f2 = h(g2);
  for (int it = 0; it < 90 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    if (f1 > f2) {  // minimize
      lo = g1;
      g1 = g2;
      f1 = f2;
      g2 = lo + kGolden * (hi - lo);
      f2 = h(g2);
    } else {
      hi = g2;
      g2 = g1;
      f2 = f1;
      g1 = hi - kGolden * (hi - lo);
      f1 = h(g1);
    }
  }
  return best_power(0.5 * (lo + hi));
}

// Scales p down uniformly so the leakage cap holds; the comparison rule for
// the baselines quoted from the reduced-power scheme.
void rescale_to_leakage(PowerAllocation& p, const PowerConstraints& c) {
  const double leak = leakage(p, c);
  if (leak > c.leak_threshold) {
    const double f = c.leak_threshold / leak;
    for (double& v : p.p) v *= f;
  }
}

}  // namespace

void PowerConstraints::validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget))
    throw std::invalid_argument("power constraints: budget must be finite and >= 0");
  if (!(leak_threshold >= 0.0) || !std::isfinite(leak_threshold))
    throw std::invalid_argument("power constraints: leak_threshold must be finite and >= 0");
  for (double v : leak_coeff)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("power constraints: leak_coeff entries must be finite and >= 0");
}

double leakage(const PowerAllocation& p, const PowerConstraints& c) {
  if (p.p.size() != c.leak_coeff.size())
    throw std::invalid_argument("leakage: power vector length does not match leak_coeff");
  double sum = 0.0;
  for (std::size_t n = 0; n < p.p.size(); ++n) sum += p.p[n] * c.leak_coeff[n];
  return sum;
}

std::vector<PowerAllocation> polytope_vertices(const PairContext& ctx,
                                               const PowerConstraints& c) {
  const int n = ctx.n_bs();
  const double P = c.budget;
  const double T = c.leak_threshold;
  std::vector<PowerAllocation> verts;
  PowerAllocation zero;
  zero.p.assign(n, 0.0);
  verts.push_back(zero);
  if (P <= 0.0) return verts;

  // BSs with zero gain never receive power.
  std::vector<bool> usable(n);
  for (int i = 0; i < n; ++i) usable[i] = ctx.gains_sq[i] > 0.0;

  for (int i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    const double cap = c.leak_coeff[i] > 0.0 ? std::min(P, T / c.leak_coeff[i]) : P;
    if (cap <= 0.0) continue;
    PowerAllocation v = zero;
    v.p[i] = cap;
    verts.push_back(std::move(v));
  }

  // Both constraints tight with two positive coordinates.
  for (int a = 0; a < n; ++a) {
    if (!usable[a]) continue;
    for (int b = a + 1; b < n; ++b) {
      if (!usable[b]) continue;
      const double ca = c.leak_coeff[a], cb = c.leak_coeff[b];
      if (ca == cb) continue;
      const double pa = (T - cb * P) / (ca - cb);
      const double pb = P - pa;
      if (pa <= 0.0 || pb <= 0.0) continue;
      PowerAllocation v = zero;
      v.p[a] = pa;
      v.p[b] = pb;
      verts.push_back(std::move(v));
    }
  }
  return verts;
}

PairSolution solve_pair(const PairContext& ctx, const PowerConstraints& c,
                        const SolveOptions& opt) {
  const int n = ctx.n_bs();
  if (static_cast<int>(c.leak_coeff.size()) != n)
    throw std::invalid_argument("solve_pair: leak_coeff length does not match pair context");

  PowerAllocation zero;
  zero.p.assign(n, 0.0);
  if (c.budget <= 0.0) return finish(ctx, zero, 0.0, 0);

  // Atom set: the polytope vertices plus three interior warm-start points:
  // both baselines (so the solution never falls below them) and the
  // dual-order saddle point, which already sits at or next to the optimum.
  // Interior atoms leave the hull unchanged.
  std::vector<PowerAllocation> atoms = polytope_vertices(ctx, c);
  const int n_vertices = static_cast<int>(atoms.size());
  atoms.push_back(waterfilling_baseline(ctx, c).p_star);
  atoms.push_back(equal_power_baseline(ctx, c).p_star);
  atoms.push_back(saddle_refine(ctx, c));
  for (PowerAllocation& a : atoms)
    for (int i = 0; i < n; ++i)
      if (ctx.gains_sq[i] == 0.0) a.p[i] = 0.0;

  // Convex-combination weights over the atoms; p is always recomposed from
  // them, which keeps the iterate exactly inside the polytope.
  std::vector<double> weight(atoms.size(), 0.0);
  int start = n_vertices;
  for (int a = n_vertices + 1; a < static_cast<int>(atoms.size()); ++a)
    if (min_y(ctx, atoms[a]) > min_y(ctx, atoms[start])) start = a;
  weight[start] = 1.0;

  PowerAllocation p = atoms[start];
  auto recompose = [&] {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t a = 0; a < atoms.size(); ++a) acc += weight[a] * atoms[a].p[i];
      p.p[i] = acc;
    }
  };

  // Pairwise Frank-Wolfe: move mass from the worst active atom toward the
  // best vertex. Unlike the plain variant, this does not zigzag when the
  // optimum sits inside a face, and the duality gap shrinks linearly.
  double gap = 0.0;
  int iter = 0;
  while (true) {
    const ChiSolution chi = solve_chi(ctx, p);
    const std::vector<double> grad = upsilon_gradient(ctx, p, chi.chi);

    // forward atom: best vertex of the linear subproblem (lowest index wins ties)
    int fw = 0;
    double fw_score = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_vertices; ++a) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += grad[i] * atoms[a].p[i];
      if (s > fw_score) {
        fw_score = s;
        fw = a;
      }
    }
    double at_p = 0.0;
    for (int i = 0; i < n; ++i) at_p += grad[i] * p.p[i];
    gap = fw_score - at_p;

    const double rate_now = y_value(ctx, p, std::log(chi.chi)) - ctx.n_antennas * kLog2E;
    const double tol = std::max(opt.rel_gap * std::max(rate_now, 0.0), opt.abs_gap);
    if (gap <= tol || iter >= opt.max_iterations) break;

    // away atom: active atom with the least gradient alignment
    int away = -1;
    double away_score = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      if (weight[a] <= 0.0) continue;
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += grad[i] * atoms[a].p[i];
      if (s < away_score) {
        away_score = s;
        away = static_cast<int>(a);
      }
    }
    if (away < 0 || away == fw) break;

    std::vector<double> dir(n);
    for (int i = 0; i < n; ++i) dir[i] = atoms[fw].p[i] - atoms[away].p[i];
    const double max_step = weight[away];
    double best_val = 0.0;
    const double gamma = line_search(ctx, p, dir, max_step, best_val);
    if (gamma <= 0.0) break;  // no numerical improvement along this direction
    weight[fw] += gamma;
    weight[away] -= gamma;
    if (weight[away] < 1e-15) {
      weight[fw] += weight[away];
      weight[away] = 0.0;
    }
    recompose();
    ++iter;
  }

  return finish(ctx, std::move(p), std::max(gap, 0.0), iter);
}

PairSolution waterfilling_baseline(const PairContext& ctx, const PowerConstraints& c) {
  const int n = ctx.n_bs();
  PowerAllocation p;
  p.p.assign(n, 0.0);
  if (c.budget <= 0.0) return finish(ctx, p, 0.0, 0);

  // Inverse slopes denom / (g_n M); waterfill the budget over them.
  std::vector<std::pair<double, int>> inv;
  for (int i = 0; i < n; ++i)
    if (ctx.gains_sq[i] > 0.0)
      inv.push_back({ctx.denom / (ctx.gains_sq[i] * ctx.n_antennas), i});
  if (inv.empty()) return finish(ctx, p, 0.0, 0);
  std::sort(inv.begin(), inv.end());

  double level = 0.0;
  double prefix = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < inv.size(); ++k) {
    prefix += inv[k].first;
    const double mu = (c.budget + prefix) / static_cast<double>(k + 1);
    if (k + 1 < inv.size() && mu > inv[k + 1].first) continue;
    level = mu;
    active = k + 1;
    break;
  }
  for (std::size_t k = 0; k < active; ++k)
    p.p[inv[k].second] = std::max(0.0, level - inv[k].first);

  rescale_to_leakage(p, c);
  return finish(ctx, std::move(p), 0.0, 0);
}

PairSolution equal_power_baseline(const PairContext& ctx, const PowerConstraints& c) {
  const int n = ctx.n_bs();
  PowerAllocation p;
  p.p.assign(n, c.budget > 0.0 ? c.budget / n : 0.0);
  rescale_to_leakage(p, c);
  return finish(ctx, std::move(p), 0.0, 0);
}

double grid_oracle(const PairContext& ctx, const PowerConstraints& c, int resolution) {
  const int n = ctx.n_bs();
  if (n > 3) throw std::invalid_argument("grid_oracle: supports at most N = 3");
  if (resolution < 2) throw std::invalid_argument("grid_oracle: resolution must be >= 2");
  if (c.budget <= 0.0) return 0.0;

  const double step = c.budget / static_cast<double>(resolution - 1);
  const double budget_cap = c.budget * (1.0 + 1e-12);
  const double leak_cap = c.leak_threshold * (1.0 + 1e-12);

  PowerAllocation p;
  p.p.assign(n, 0.0);
  double best = 0.0;
  std::vector<int> idx(n, 0);
  while (true) {
    double total = 0.0, leak = 0.0;
    for (int i = 0; i < n; ++i) {
      p.p[i] = idx[i] * step;
      total += p.p[i];
      leak += p.p[i] * c.leak_coeff[i];
    }
    if (total <= budget_cap && leak <= leak_cap) best = std::max(best, upsilon(ctx, p));

    int d = 0;
    while (d < n && ++idx[d] == resolution) idx[d++] = 0;
    if (d == n) break;
  }
  return best;
}

}  // namespace hstn
