#include "mc_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace hstn {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

// Streaming mean/variance (Welford).
struct Accumulator {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  McEstimate estimate() const {
    McEstimate e;
    e.mean = mean;
    e.n_samples = n;
    e.std_error = n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0;
    return e;
  }
};

}  // namespace

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

ComplexMatrix sample_small_scale(int rows, int cols, RngStream& rng) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("sample_small_scale: dimensions must be >= 1");
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double re = rng.normal() * kInvSqrt2;
      const double im = rng.normal() * kInvSqrt2;
      m.at(r, c) = {re, im};
    }
  return m;
}

double logdet2_hermitian(const ComplexMatrix& a) {
  if (a.rows != a.cols) throw std::domain_error("logdet2_hermitian: matrix must be square");
  const int n = a.rows;

  double scale = 0.0;
  for (const auto& v : a.a) scale = std::max(scale, std::abs(v));
  const double tol = 1e-9 * std::max(scale, 1.0);
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c)
      if (std::abs(a.at(r, c) - std::conj(a.at(c, r))) > tol)
        throw std::domain_error("logdet2_hermitian: matrix is not Hermitian");

  // In-place lower Cholesky; any nonpositive pivot means the input was not
  // positive definite (or numerically corrupted).
  ComplexMatrix l = a;
  double logdet = 0.0;
  for (int j = 0; j < n; ++j) {
    double pivot = l.at(j, j).real();
    for (int k = 0; k < j; ++k) pivot -= std::norm(l.at(j, k));
    if (!(pivot > 0.0) || !std::isfinite(pivot))
      throw std::domain_error("logdet2_hermitian: matrix is not positive definite");
    const double root = std::sqrt(pivot);
    logdet += std::log2(pivot);  // 2 log2(root)
    l.at(j, j) = root;
    for (int i = j + 1; i < n; ++i) {
      std::complex<double> v = l.at(i, j);
      for (int k = 0; k < j; ++k) v -= l.at(i, k) * std::conj(l.at(j, k));
      l.at(i, j) = v / root;
    }
  }
  return logdet;
}

double instantaneous_rate(const ComplexMatrix& s, const PairContext& ctx,
                          const PowerAllocation& p) {
  const int m = ctx.n_antennas;
  const int n = ctx.n_bs();
  if (s.rows != m || s.cols != n)
    throw std::invalid_argument("instantaneous_rate: small-scale matrix must be M x N");
  if (static_cast<int>(p.p.size()) != n)
    throw std::invalid_argument("instantaneous_rate: power vector length mismatch");

  // A = I + S diag(p_n g_n / denom) S^H, Hermitian by construction.
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) w[k] = p.p[k] * ctx.gains_sq[k] / ctx.denom;

  ComplexMatrix a = ComplexMatrix::identity(m);
  for (int r = 0; r < m; ++r)
    for (int c = r; c < m; ++c) {
      std::complex<double> acc = 0.0;
      for (int k = 0; k < n; ++k) acc += w[k] * s.at(r, k) * std::conj(s.at(c, k));
      a.at(r, c) += acc;
      if (c != r) a.at(c, r) += std::conj(acc);
    }
  return logdet2_hermitian(a);
}

McEstimate ergodic_rate_mc(const PairContext& ctx, const PowerAllocation& p, long n_samples,
                           RngStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("ergodic_rate_mc: n_samples must be >= 1");
  Accumulator acc;
  for (long i = 0; i < n_samples; ++i) {
    const ComplexMatrix s = sample_small_scale(ctx.n_antennas, ctx.n_bs(), rng);
    acc.add(instantaneous_rate(s, ctx, p));
  }
  return acc.estimate();
}

McEstimate ergodic_leakage_mc(const PowerConstraints& c, const PowerAllocation& p,
                              long n_samples, RngStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("ergodic_leakage_mc: n_samples must be >= 1");
  if (p.p.size() != c.leak_coeff.size())
    throw std::invalid_argument("ergodic_leakage_mc: power vector length mismatch");
  const int n = static_cast<int>(p.p.size());
  Accumulator acc;
  for (long i = 0; i < n_samples; ++i) {
    const ComplexMatrix s = sample_small_scale(1, n, rng);
    double leak = 0.0;
    for (int k = 0; k < n; ++k) leak += p.p[k] * c.leak_coeff[k] * std::norm(s.at(0, k));
    acc.add(leak);
  }
  return acc.estimate();
}

}  // namespace hstn
