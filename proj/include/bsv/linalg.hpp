/**
 * Copyright 2026 The bsv developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bsv/complex_matrix.hpp"
#include "bsv/errors.hpp"
#include "bsv/outcomes.hpp"
#include "bsv/rng.hpp"

namespace bsv {

inline constexpr std::size_t kMaxPermanentDim = 32;
inline constexpr std::size_t kMaxNaivePermanentDim = 9;

/// Matrix of iid standard complex Gaussians (E[x] = 0, E[|x|^2] = 1).
inline ComplexMatrix sample_gaussian_matrix(std::size_t n_rows,
                                            std::size_t n_cols,
                                            RngStream& rng) {
  if (n_rows == 0 || n_cols == 0)
    throw std::invalid_argument("sample_gaussian_matrix: zero dimension");
  ComplexMatrix x(n_rows, n_cols);
  for (auto& z : x.entries()) z = rng.gaussian();
  return x;
}

/**
 * Haar-random column-orthonormal m x n matrix: the first n columns of a
 * uniformly random m x m unitary.
 *
 * Draws an m x n Gaussian matrix and orthonormalizes it with modified
 * Gram-Schmidt (two passes per column). MGS yields the unique QR factor
 * with positive real diagonal of R, which makes Q exactly Haar; the
 * per-column phase correction conj(r_jj)/|r_jj| is identically 1 under
 * this convention.
 */
inline ComplexMatrix haar_column_orthonormal(std::size_t m, std::size_t n,
                                             RngStream& rng) {
  if (n == 0 || m < n)
    throw std::invalid_argument("haar_column_orthonormal: need m >= n >= 1");
  ComplexMatrix q = sample_gaussian_matrix(m, n, rng);
  std::vector<std::complex<double>> col(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) col[i] = q(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        std::complex<double> dot = 0.0;
        for (std::size_t i = 0; i < m; ++i) dot += std::conj(q(i, k)) * col[i];
        for (std::size_t i = 0; i < m; ++i) col[i] -= dot * q(i, k);
      }
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm2 += std::norm(col[i]);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < m; ++i) q(i, j) = col[i] * inv;
  }
  return q;
}

/**
 * Permanent by Ryser's inclusion-exclusion with Gray-code column updates,
 * ~2^n n floating-point operations. Hard-capped at n = 32.
 */
inline std::complex<double> permanent_ryser(const ComplexMatrix& x) {
  if (!x.square()) throw std::invalid_argument("permanent_ryser: non-square");
  const std::size_t n = x.rows();
  if (n > kMaxPermanentDim)
    throw resource_limit_error("permanent_ryser: n > 32");
  if (n == 0) return 1.0;  // empty-product convention

  std::vector<std::complex<double>> row_sum(n, 0.0);
  std::complex<double> total = 0.0;
  int included = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const std::uint64_t prev = (k - 1) ^ ((k - 1) >> 1);
    const std::uint64_t flipped = gray ^ prev;
    const auto j = static_cast<std::size_t>(std::countr_zero(flipped));
    if (gray & flipped) {
      for (std::size_t i = 0; i < n; ++i) row_sum[i] += x(i, j);
      ++included;
    } else {
      for (std::size_t i = 0; i < n; ++i) row_sum[i] -= x(i, j);
      --included;
    }
    std::complex<double> prod = row_sum[0];
    for (std::size_t i = 1; i < n; ++i) prod *= row_sum[i];
    total += (included & 1) ? -prod : prod;
  }
  return (n & 1) ? -total : total;
}

/// Test oracle: direct sum over all n! permutations. Capped at n = 9.
inline std::complex<double> permanent_naive(const ComplexMatrix& x) {
  if (!x.square()) throw std::invalid_argument("permanent_naive: non-square");
  const std::size_t n = x.rows();
  if (n > kMaxNaivePermanentDim)
    throw resource_limit_error("permanent_naive: n > 9");
  if (n == 0) return 1.0;
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  std::complex<double> total = 0.0;
  do {
    std::complex<double> prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) prod *= x(i, sigma[i]);
    total += prod;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

/// Determinant via partially pivoted Gaussian elimination.
inline std::complex<double> determinant(const ComplexMatrix& x) {
  if (!x.square()) throw std::invalid_argument("determinant: non-square");
  const std::size_t n = x.rows();
  if (n == 0) return 1.0;
  std::vector<std::complex<double>> a = x.entries();
  auto at = [&a, n](std::size_t i, std::size_t j) -> std::complex<double>& {
    return a[i * n + j];
  };
  std::complex<double> det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(at(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      const double mag = std::abs(at(i, col));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t j = col; j < n; ++j) std::swap(at(pivot, j), at(col, j));
      det = -det;
    }
    det *= at(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const std::complex<double> f = at(i, col) / at(col, col);
      for (std::size_t j = col + 1; j < n; ++j) at(i, j) -= f * at(col, j);
    }
  }
  return det;
}

/// R_i = |x_i1|^2 + ... + |x_in|^2 per row.
inline std::vector<double> row_squared_norms(const ComplexMatrix& x) {
  std::vector<double> r(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) r[i] += std::norm(x(i, j));
  return r;
}

/// A_S: row i of A repeated s_i times, modes in ascending order. For an
/// n-photon outcome over an m x n matrix this is the n x n submatrix.
inline ComplexMatrix submatrix_for_outcome(const ComplexMatrix& a,
                                           const Outcome& s) {
  if (s.modes() != a.rows())
    throw std::invalid_argument("submatrix_for_outcome: mode count mismatch");
  if (s.photons() > kMaxPermanentDim)
    throw resource_limit_error("submatrix_for_outcome: more than 32 photons");
  ComplexMatrix out(s.photons(), a.cols());
  std::size_t r = 0;
  for (std::size_t i = 0; i < s.modes(); ++i) {
    for (int copy = 0; copy < s[i]; ++copy) {
      for (std::size_t j = 0; j < a.cols(); ++j) out(r, j) = a(i, j);
      ++r;
    }
  }
  return out;
}

}  // namespace bsv
