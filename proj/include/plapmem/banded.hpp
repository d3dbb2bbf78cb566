// Symmetric positive (semi)definite banded matrices in lower-band storage,
// with a banded Cholesky factorization.  Bandwidth is tiny here (= basis
// degree r <= 4), so this beats any general sparse machinery.
#pragma once

#include <vector>

#include "plapmem/errors.hpp"

namespace plapmem {

class BandedSpdMatrix {
 public:
  BandedSpdMatrix(int n, int bandwidth);

  int size() const { return n_; }
  int bandwidth() const { return bw_; }

  // symmetric read access; zero outside the band
  double get(int i, int j) const;
  // accumulate into entry (i,j) with i >= j (lower triangle only)
  void add(int i, int j, double v);
  void set(int i, int j, double v);

  std::vector<double> multiply(const std::vector<double>& x) const;

 private:
  friend class BandedCholesky;
  friend BandedSpdMatrix scaled_sum(double, const BandedSpdMatrix&, double,
                                    const BandedSpdMatrix&);
  int n_, bw_;
  // band_[d * n_ + j] holds A(j + d, j), d = 0..bw
  std::vector<double> band_;
};

// ca * A + cb * B; A and B must live on the same dof set.
BandedSpdMatrix scaled_sum(double ca, const BandedSpdMatrix& A, double cb,
                           const BandedSpdMatrix& B);

class BandedCholesky {
 public:
  // Factorizes A = L L^T; throws NotPositiveDefinite on a bad pivot.
  explicit BandedCholesky(const BandedSpdMatrix& A);
  std::vector<double> solve(std::vector<double> b) const;

 private:
  int n_, bw_;
  std::vector<double> band_;  // L in the same lower-band layout
};

std::vector<double> solve_spd(const BandedSpdMatrix& A, const std::vector<double>& b);

// sqrt(v^T M v); the discrete L2 norm when M is the mass matrix
double mass_norm(const BandedSpdMatrix& M, const std::vector<double>& v);

}  // namespace plapmem
