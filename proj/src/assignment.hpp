#pragma once

#include <vector>

#include "power_solver.hpp"
#include "rng.hpp"

namespace hstn {

// K x K table of per-pair rates R[user][channel] with the achieving solutions.
struct RateTable {
  std::vector<std::vector<double>> r;
  std::vector<std::vector<PairSolution>> solutions;

  int size() const { return static_cast<int>(r.size()); }
  void validate() const;
};

// One channel per user; perm[user] = channel index.
struct Assignment {
  std::vector<int> perm;

  bool is_permutation() const;
};

struct MatchResult {
  Assignment assignment;
  double total = 0.0;  // sum_i r[i][perm[i]]
};

// Maximum-weight perfect matching on the rate table, O(K^3) shortest
// augmenting paths on real-valued potentials. The total is recomputed by
// direct summation over the returned permutation.
MatchResult kuhn_munkres(const std::vector<std::vector<double>>& r);
MatchResult kuhn_munkres(const RateTable& table);

// Enumerates all K! permutations; ties broken by the lexicographically
// smallest permutation. Requires K <= 8.
MatchResult exhaustive_oracle(const std::vector<std::vector<double>>& r);
MatchResult exhaustive_oracle(const RateTable& table);

// Uniform random permutation.
Assignment random_assignment(int k, RngStream& rng);

double assignment_total(const std::vector<std::vector<double>>& r, const Assignment& a);

}  // namespace hstn
