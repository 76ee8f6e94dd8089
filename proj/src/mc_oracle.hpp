#pragma once

#include <complex>
#include <vector>

#include "power_solver.hpp"
#include "rate_model.hpp"
#include "rng.hpp"

namespace hstn {

// Row-major dense complex matrix; just enough linear algebra for the
// log-det rate samples.
struct ComplexMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::complex<double>> a;

  ComplexMatrix() = default;
  ComplexMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

  std::complex<double>& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  const std::complex<double>& at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * cols + c];
  }
  static ComplexMatrix identity(int n);
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
};

// i.i.d. circularly-symmetric complex Gaussian entries, zero mean, unit
// variance (real and imaginary parts each N(0, 1/2)).
ComplexMatrix sample_small_scale(int rows, int cols, RngStream& rng);

// log2 det of a Hermitian positive-definite matrix via Cholesky. Throws
// std::domain_error if the input is not Hermitian or a pivot is not
// strictly positive.
double logdet2_hermitian(const ComplexMatrix& a);

// log2 det(I_M + S diag(p_n g_n) S^H / denom) for one small-scale draw S.
double instantaneous_rate(const ComplexMatrix& s, const PairContext& ctx,
                          const PowerAllocation& p);

// Sample mean and standard error of instantaneous_rate over i.i.d. draws.
McEstimate ergodic_rate_mc(const PairContext& ctx, const PowerAllocation& p, long n_samples,
                           RngStream& rng);

// Sample mean of the instantaneous leakage sum_n p_n leak_coeff_n |s_n|^2;
// converges to leakage(p, c) since E|s|^2 = 1.
McEstimate ergodic_leakage_mc(const PowerConstraints& c, const PowerAllocation& p,
                              long n_samples, RngStream& rng);

}  // namespace hstn
