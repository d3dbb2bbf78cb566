#include "plapmem/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace plapmem {

BandedSpdMatrix::BandedSpdMatrix(int n, int bandwidth) : n_(n), bw_(bandwidth) {
  if (n < 0) throw std::invalid_argument("BandedSpdMatrix: negative size");
  if (bandwidth < 0) throw std::invalid_argument("BandedSpdMatrix: negative bandwidth");
  band_.assign(static_cast<size_t>(bw_ + 1) * n_, 0.0);
}

double BandedSpdMatrix::get(int i, int j) const {
  if (i < j) std::swap(i, j);
  int d = i - j;
  if (d > bw_) return 0.0;
  return band_[static_cast<size_t>(d) * n_ + j];
}

void BandedSpdMatrix::add(int i, int j, double v) {
  int d = i - j;  // callers scatter lower-triangle entries only
  band_[static_cast<size_t>(d) * n_ + j] += v;
}

void BandedSpdMatrix::set(int i, int j, double v) {
  int d = i - j;
  band_[static_cast<size_t>(d) * n_ + j] = v;
}

std::vector<double> BandedSpdMatrix::multiply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("BandedSpdMatrix::multiply: size mismatch");
  std::vector<double> y(n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    y[j] += band_[j] * x[j];  // diagonal
    for (int d = 1; d <= bw_ && j + d < n_; ++d) {
      double v = band_[static_cast<size_t>(d) * n_ + j];
      y[j + d] += v * x[j];
      y[j] += v * x[j + d];
    }
  }
  return y;
}

BandedSpdMatrix scaled_sum(double ca, const BandedSpdMatrix& A, double cb,
                           const BandedSpdMatrix& B) {
  if (A.n_ != B.n_) throw std::invalid_argument("scaled_sum: size mismatch");
  BandedSpdMatrix C(A.n_, std::max(A.bw_, B.bw_));
  for (int d = 0; d <= C.bw_; ++d)
    for (int j = 0; j < C.n_; ++j) {
      double v = 0.0;
      if (d <= A.bw_) v += ca * A.band_[static_cast<size_t>(d) * A.n_ + j];
      if (d <= B.bw_) v += cb * B.band_[static_cast<size_t>(d) * B.n_ + j];
      C.band_[static_cast<size_t>(d) * C.n_ + j] = v;
    }
  return C;
}

BandedCholesky::BandedCholesky(const BandedSpdMatrix& A)
    : n_(A.size()), bw_(A.bandwidth()), band_(static_cast<size_t>(bw_ + 1) * n_, 0.0) {
  auto L = [this](int i, int j) -> double& {
    return band_[static_cast<size_t>(i - j) * n_ + j];
  };
  for (int j = 0; j < n_; ++j) {
    double diag = A.get(j, j);
    for (int k = std::max(0, j - bw_); k < j; ++k) diag -= L(j, k) * L(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag))
      throw NotPositiveDefinite("BandedCholesky: non-positive pivot " + std::to_string(diag) +
                                " at row " + std::to_string(j));
    L(j, j) = std::sqrt(diag);
    for (int i = j + 1; i <= std::min(n_ - 1, j + bw_); ++i) {
      double v = A.get(i, j);
      for (int k = std::max(i - bw_, 0); k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / L(j, j);
    }
  }
}

std::vector<double> BandedCholesky::solve(std::vector<double> b) const {
  if (static_cast<int>(b.size()) != n_)
    throw std::invalid_argument("BandedCholesky::solve: size mismatch");
  auto L = [this](int i, int j) { return band_[static_cast<size_t>(i - j) * n_ + j]; };
  // forward: L z = b (in place)
  for (int i = 0; i < n_; ++i) {
    double v = b[i];
    for (int j = std::max(0, i - bw_); j < i; ++j) v -= L(i, j) * b[j];
    b[i] = v / L(i, i);
  }
  // backward: L^T x = z
  for (int i = n_ - 1; i >= 0; --i) {
    double v = b[i];
    for (int j = i + 1; j <= std::min(n_ - 1, i + bw_); ++j) v -= L(j, i) * b[j];
    b[i] = v / L(i, i);
  }
  return b;
}

std::vector<double> solve_spd(const BandedSpdMatrix& A, const std::vector<double>& b) {
  return BandedCholesky(A).solve(b);
}

double mass_norm(const BandedSpdMatrix& M, const std::vector<double>& v) {
  std::vector<double> Mv = M.multiply(v);
  double acc = 0.0;
  for (size_t i = 0; i < v.size(); ++i) acc += v[i] * Mv[i];
  // clamp tiny negative roundoff
  return std::sqrt(std::max(0.0, acc));
}

}  // namespace plapmem
