#pragma once

/// General band matrices in LAPACK band storage and a direct LU solve with
/// a reciprocal condition estimate.
///
/// The factorization calls the unblocked dgbtf2. The blocked dgbtrf shipped
/// with OpenBLAS 0.3.20 returns wrong factors once the bandwidth exceeds
/// about 64, and a 129x129 grid needs bandwidth 127.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellcompat/grid.hpp"

extern "C" void dgbtf2_(const lapack_int* m, const lapack_int* n, const lapack_int* kl,
                        const lapack_int* ku, double* ab, const lapack_int* ldab, lapack_int* ipiv,
                        lapack_int* info);

namespace shellcompat {

class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
        ab_(static_cast<std::size_t>(ldab_) * n, 0.0) {
    if (n <= 0 || kl < 0 || ku < 0) throw std::invalid_argument("BandMatrix: bad shape");
  }

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  bool in_band(int r, int c) const { return c - r <= ku_ && r - c <= kl_; }

  double& operator()(int r, int c) {
    if (!in_band(r, c)) throw std::out_of_range("BandMatrix: entry outside band");
    return ab_[slot(r, c)];
  }
  double operator()(int r, int c) const { return in_band(r, c) ? ab_[slot(r, c)] : 0.0; }

  // Column-major storage with kl extra rows reserved for fill-in.
  double* data() { return ab_.data(); }
  int ldab() const { return ldab_; }

 private:
  std::size_t slot(int r, int c) const {
    return static_cast<std::size_t>(kl_ + ku_ + r - c) + static_cast<std::size_t>(c) * ldab_;
  }

  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
};

struct BandSolution {
  std::vector<double> x;
  double rcond = 0.0;  // reciprocal 1-norm condition estimate
  double condition() const { return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity(); }
};

/// Solves A x = b. Throws NumericalError on a singular factor, when the
/// condition estimate exceeds `max_condition`, or when the computed x
/// leaves a residual far above rounding level.
inline BandSolution solve_banded(BandMatrix a, std::vector<double> b, double max_condition = 1e12) {
  const int n = a.size();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve_banded: rhs size mismatch");
  const int kl = a.lower(), ku = a.upper();

  // 1-norm of A, read before the factorization overwrites storage.
  double anorm = 0.0;
  for (int c = 0; c < n; ++c) {
    double col = 0.0;
    for (int r = std::max(0, c - ku); r <= std::min(n - 1, c + kl); ++r) col += std::abs(a(r, c));
    anorm = std::max(anorm, col);
  }

  const BandMatrix original = a;
  const std::vector<double> rhs = b;

  std::vector<lapack_int> ipiv(n);
  lapack_int info = 0;
  const lapack_int ln = n, lkl = kl, lku = ku, ld = a.ldab();
  dgbtf2_(&ln, &ln, &lkl, &lku, a.data(), &ld, ipiv.data(), &info);
  if (info > 0) throw NumericalError("solve_banded: matrix is singular");
  if (info < 0) throw std::invalid_argument("solve_banded: dgbtf2 argument error");

  BandSolution out;
  info = LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', n, kl, ku, a.data(), a.ldab(), ipiv.data(), anorm,
                        &out.rcond);
  if (info != 0) throw NumericalError("solve_banded: condition estimate failed");
  if (out.condition() > max_condition) {
    throw NumericalError("solve_banded: condition estimate " + std::to_string(out.condition()) +
                         " exceeds limit");
  }
  info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, a.data(), a.ldab(), ipiv.data(), b.data(), n);
  if (info != 0) throw NumericalError("solve_banded: back substitution failed");

  double rmax = 0.0, bmax = 0.0, xmax = 0.0;
  for (int r = 0; r < n; ++r) {
    double ax = 0.0;
    for (int c = std::max(0, r - kl); c <= std::min(n - 1, r + ku); ++c) ax += original(r, c) * b[c];
    rmax = std::max(rmax, std::abs(ax - rhs[r]));
    bmax = std::max(bmax, std::abs(rhs[r]));
    xmax = std::max(xmax, std::abs(b[r]));
  }
  const double tol = 1e3 * std::numeric_limits<double>::epsilon() * (anorm * xmax + bmax);
  if (!(rmax <= tol)) throw NumericalError("solve_banded: residual check failed");
  out.x = std::move(b);
  return out;
}

}  // namespace shellcompat
