#include "assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hstn {

void RateTable::validate() const {
  const std::size_t k = r.size();
  if (k == 0) throw std::invalid_argument("rate table: must be nonempty");
  if (solutions.size() != k) throw std::invalid_argument("rate table: solutions shape mismatch");
  for (std::size_t i = 0; i < k; ++i) {
    if (r[i].size() != k || solutions[i].size() != k)
      throw std::invalid_argument("rate table: must be square");
    for (std::size_t j = 0; j < k; ++j)
      if (!std::isfinite(r[i][j]) || r[i][j] < 0.0)
        throw std::invalid_argument("rate table: rates must be finite and >= 0");
  }
}

bool Assignment::is_permutation() const {
  const int k = static_cast<int>(perm.size());
  std::vector<bool> seen(k, false);
  for (int v : perm) {
    if (v < 0 || v >= k || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

double assignment_total(const std::vector<std::vector<double>>& r, const Assignment& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.perm.size(); ++i) total += r[i][a.perm[i]];
  return total;
}

MatchResult kuhn_munkres(const std::vector<std::vector<double>>& r) {
  const int k = static_cast<int>(r.size());
  if (k == 0) throw std::invalid_argument("kuhn_munkres: empty weight matrix");
  for (const auto& row : r) {
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("kuhn_munkres: weight matrix must be square");
    for (double w : row)
      if (!std::isfinite(w)) throw std::invalid_argument("kuhn_munkres: weights must be finite");
  }

  // Shortest augmenting path formulation on costs = -weights, 1-based with a
  // virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> match(k + 1, 0), way(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(k + 1, inf);
    std::vector<bool> used(k + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = -r[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  MatchResult res;
  res.assignment.perm.assign(k, -1);
  for (int j = 1; j <= k; ++j)
    if (match[j] != 0) res.assignment.perm[match[j] - 1] = j - 1;
  res.total = assignment_total(r, res.assignment);
  return res;
}

MatchResult kuhn_munkres(const RateTable& table) { return kuhn_munkres(table.r); }

MatchResult exhaustive_oracle(const std::vector<std::vector<double>>& r) {
  const int k = static_cast<int>(r.size());
  if (k == 0) throw std::invalid_argument("exhaustive_oracle: empty weight matrix");
  if (k > 8) throw std::invalid_argument("exhaustive_oracle: K must be <= 8");

  Assignment cur;
  cur.perm.resize(k);
  std::iota(cur.perm.begin(), cur.perm.end(), 0);

  MatchResult best;
  best.assignment = cur;
  best.total = assignment_total(r, cur);
  while (std::next_permutation(cur.perm.begin(), cur.perm.end())) {
    const double total = assignment_total(r, cur);
    if (total > best.total) {  // strict: keeps the lexicographically smallest tie
      best.total = total;
      best.assignment = cur;
    }
  }
  return best;
}

MatchResult exhaustive_oracle(const RateTable& table) { return exhaustive_oracle(table.r); }

Assignment random_assignment(int k, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("random_assignment: K must be >= 1");
  Assignment a;
  a.perm.resize(k);
  std::iota(a.perm.begin(), a.perm.end(), 0);
  for (int i = k - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(a.perm[i], a.perm[j]);
  }
  return a;
}

}  // namespace hstn
