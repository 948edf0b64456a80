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

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsv/errors.hpp"

namespace bsv {

/// Dense complex matrix, row-major. Small and value-semantic; this is the
/// container for interferometer matrices A, their submatrices A_S, and iid
/// Gaussian draws X.
class ComplexMatrix {
 public:
  using value_type = std::complex<double>;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols,
                std::vector<value_type> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      throw std::invalid_argument("ComplexMatrix: entry count != rows*cols");
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  value_type& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  const value_type& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  const std::vector<value_type>& entries() const { return data_; }
  std::vector<value_type>& entries() { return data_; }

  bool all_finite() const {
    for (const auto& z : data_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<value_type> data_;
};

/// max_ij |(A^dagger A - I)_ij|. Zero-column matrices return 0.
inline double max_gram_deviation(const ComplexMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      std::complex<double> dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += std::conj(a(i, j)) * a(i, k);
      const double dev = std::abs(dot - (j == k ? 1.0 : 0.0));
      if (dev > worst) worst = dev;
    }
  }
  return worst;
}

/// Validation used by samplers that require an interferometer matrix:
/// column-orthonormal to within `tol` in the max norm of A^dagger A - I.
inline bool is_column_orthonormal(const ComplexMatrix& a, double tol = 1e-10) {
  return max_gram_deviation(a) <= tol;
}

// --- JSON interchange: {"rows":m,"cols":n,"re":[...],"im":[...]} row-major.

inline nlohmann::ordered_json matrix_to_json(const ComplexMatrix& a) {
  nlohmann::ordered_json j;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  auto re = nlohmann::ordered_json::array();
  auto im = nlohmann::ordered_json::array();
  for (const auto& z : a.entries()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != rows * cols || im.size() != rows * cols)
    throw std::invalid_argument("matrix_from_json: re/im length != rows*cols");
  ComplexMatrix a(rows, cols);
  for (std::size_t k = 0; k < rows * cols; ++k)
    a.entries()[k] = {re[k].get<double>(), im[k].get<double>()};
  if (!a.all_finite())
    throw std::invalid_argument("matrix_from_json: non-finite entry");
  return a;
}

inline void write_matrix_json(std::ostream& os, const ComplexMatrix& a) {
  os << matrix_to_json(a).dump() << '\n';
}

inline ComplexMatrix read_matrix_json(std::istream& is) {
  nlohmann::json j;
  is >> j;
  return matrix_from_json(j);
}

/// Content digest of a matrix (FNV-1a 64 over dimensions and entry bits),
/// as a 16-digit hex string. Used to tag sample batches with their A.
inline std::string matrix_content_hash(const ComplexMatrix& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  };
  mix(a.rows());
  mix(a.cols());
  for (const auto& z : a.entries()) {
    std::uint64_t bits;
    double re = z.real(), im = z.imag();
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&bits, &re, 8);
    mix(bits);
    std::memcpy(&bits, &im, 8);
    mix(bits);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace bsv
