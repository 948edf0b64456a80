#pragma once

// Test-only oracles and utilities, kept independent of the library paths
// they cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "bsv/complex_matrix.hpp"

namespace testutil {

/// Cofactor-expansion determinant, O(n!) — oracle for n <= 7.
inline std::complex<double> cofactor_determinant(const bsv::ComplexMatrix& x) {
  const std::size_t n = x.rows();
  if (n == 0) return 1.0;
  if (n == 1) return x(0, 0);
  std::complex<double> acc = 0.0;
  double sign = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    bsv::ComplexMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = x(r, c);
      }
    }
    acc += sign * x(0, j) * cofactor_determinant(minor);
    sign = -sign;
  }
  return acc;
}

/// |Det(X)|^2 as the product of squared norms of successively projected
/// rows (Gram-Schmidt without normalization) — an independent oracle.
inline double abs_det_squared_by_projection(const bsv::ComplexMatrix& x) {
  const std::size_t n = x.rows();
  std::vector<std::vector<std::complex<double>>> w;
  std::vector<double> norms;
  double prod = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::complex<double>> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = x(i, j);
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (norms[k] == 0.0) continue;
      std::complex<double> dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += std::conj(w[k][j]) * v[j];
      dot /= norms[k];
      for (std::size_t j = 0; j < n; ++j) v[j] -= dot * w[k][j];
    }
    double norm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) norm2 += std::norm(v[j]);
    prod *= norm2;
    w.push_back(std::move(v));
    norms.push_back(norm2);
  }
  return n == 0 ? 1.0 : prod;
}

/// Composite Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, std::size_t intervals) {
  if (intervals % 2 == 1) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i)
    acc += f(a + h * static_cast<double>(i)) * ((i % 2 == 1) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// One-sided Mann-Whitney z statistic for "xs stochastically larger than
/// ys" (normal approximation, midranks for ties).
inline double mann_whitney_z(std::vector<double> xs, std::vector<double> ys) {
  const std::size_t nx = xs.size(), ny = ys.size();
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(nx + ny);
  for (double v : xs) pooled.push_back({v, 0});
  for (double v : ys) pooled.push_back({v, 1});
  std::sort(pooled.begin(), pooled.end());
  double rank_sum_x = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1].first == pooled[i].first)
      ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (pooled[k].second == 0) rank_sum_x += midrank;
    i = j + 1;
  }
  const double u = rank_sum_x -
                   static_cast<double>(nx) * (static_cast<double>(nx) + 1.0) / 2.0;
  const double mean = 0.5 * static_cast<double>(nx) * static_cast<double>(ny);
  const double sd = std::sqrt(static_cast<double>(nx) *
                              static_cast<double>(ny) *
                              (static_cast<double>(nx + ny) + 1.0) / 12.0);
  return (u - mean) / sd;
}

}  // namespace testutil
