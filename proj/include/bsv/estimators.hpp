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
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsv/complex_matrix.hpp"
#include "bsv/errors.hpp"
#include "bsv/linalg.hpp"
#include "bsv/outcomes.hpp"
#include "bsv/samplers.hpp"
#include "bsv/stats.hpp"

namespace bsv {

namespace detail {

inline double log_factorial(std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 2; k <= n; ++k) acc += std::log(static_cast<double>(k));
  return acc;
}

}  // namespace detail

/// P(X) = |Per(X)|^2 / n!; unit mean under iid complex Gaussian X.
inline double p_statistic(const ComplexMatrix& x) {
  if (!x.square()) throw std::invalid_argument("p_statistic: non-square");
  return std::norm(permanent_ryser(x)) / detail::factorial_double(x.rows());
}

/**
 * Row-norm estimator R* = (R_1 ... R_n) / n^n, where R_i are the squared
 * row 2-norms. Computed in log space; a zero row yields the valid value 0.
 */
inline double r_star(const ComplexMatrix& x) {
  if (!x.square()) throw std::invalid_argument("r_star: non-square");
  const std::size_t n = x.rows();
  if (n == 0) return 1.0;
  double log_acc = 0.0;
  for (double r : row_squared_norms(x)) {
    if (r == 0.0) return 0.0;
    log_acc += std::log(r);
  }
  return std::exp(log_acc - static_cast<double>(n) *
                                std::log(static_cast<double>(n)));
}

/// Q = P / R*; independent of R* under Gaussian X, unit mean.
inline double q_statistic(const ComplexMatrix& x) {
  const double rs = r_star(x);
  if (rs == 0.0)
    throw degeneracy_error("q_statistic: R* = 0 (vanishing row)");
  return p_statistic(x) / rs;
}

/**
 * Generalized row-norm estimator for an arbitrary outcome S:
 *   R_S* = prod_i R_i^{s_i} / (n (n+1) ... (n + s_i - 1)),
 * with R_i the squared row norms of the scaled matrix sqrt(m) A (so each
 * row behaves like a complex chi^2 with n dof under the Gaussian
 * surrogate) and one rising-factorial factor per occupied mode. For
 * collision-free S this reduces exactly to r_star(sqrt(m) A_S).
 */
inline double r_star_general_from_row_norms(
    const std::vector<double>& scaled_row_sq_norms, const Outcome& s,
    std::size_t n_cols) {
  if (s.modes() != scaled_row_sq_norms.size())
    throw std::invalid_argument("r_star_general: row-norm count mismatch");
  if (n_cols == 0) throw std::invalid_argument("r_star_general: n == 0");
  const double n = static_cast<double>(n_cols);
  double log_acc = 0.0;
  for (std::size_t i = 0; i < s.modes(); ++i) {
    for (int t = 0; t < s[i]; ++t) {
      const double r = scaled_row_sq_norms[i];
      if (r == 0.0) return 0.0;
      log_acc += std::log(r) - std::log(n + static_cast<double>(t));
    }
  }
  return std::exp(log_acc);
}

inline double r_star_general(const ComplexMatrix& a, const Outcome& s) {
  if (s.modes() != a.rows())
    throw std::invalid_argument("r_star_general: mode count mismatch");
  std::vector<double> scaled = row_squared_norms(a);
  const double m = static_cast<double>(a.rows());
  for (double& r : scaled) r *= m;
  return r_star_general_from_row_norms(scaled, s, a.cols());
}

/**
 * Row-norm distinguisher: the fraction of batch outcomes with
 * R*(sqrt(m) A_S) >= 1 (threshold closed at 1), with a Wilson 95%
 * interval. Outcomes with collisions are routed through the generalized
 * estimator.
 */
inline FractionEstimate rownorm_distinguisher(const ComplexMatrix& a,
                                              const SampleBatch& batch) {
  if (batch.outcomes.empty())
    throw std::invalid_argument("rownorm_distinguisher: empty batch");
  std::vector<double> scaled = row_squared_norms(a);
  const double m = static_cast<double>(a.rows());
  for (double& r : scaled) r *= m;
  std::size_t hits = 0;
  for (const Outcome& s : batch.outcomes)
    if (r_star_general_from_row_norms(scaled, s, a.cols()) >= 1.0) ++hits;
  return wilson_interval(hits, batch.outcomes.size());
}

/**
 * Amplified permanent verifier: accept iff
 *   prod_i |Per(A_{S_i})|^2 >= (n! / m^n)^k,
 * evaluated as sum_i ln |Per(A_{S_i})|^2 >= k ln(n!/m^n). Ties accept;
 * k = 0 accepts (empty product sits on the threshold).
 */
struct VerifierDecision {
  bool accept = false;
  double log_likelihood_sum = 0.0;
  double threshold = 0.0;
  std::size_t k = 0;
};

inline VerifierDecision permanent_verifier(const ComplexMatrix& a,
                                           const SampleBatch& batch) {
  const std::size_t n = a.cols();
  if (n > kMaxTablePhotons)
    throw resource_limit_error("permanent_verifier: n > 9");
  VerifierDecision d;
  d.k = batch.outcomes.size();
  d.threshold = static_cast<double>(d.k) *
                (detail::log_factorial(n) -
                 static_cast<double>(n) * std::log(static_cast<double>(a.rows())));
  double acc = 0.0;
  for (const Outcome& s : batch.outcomes) {
    const double per2 = std::norm(permanent_ryser(submatrix_for_outcome(a, s)));
    acc += std::log(per2);  // -inf on an exactly vanishing permanent
  }
  d.log_likelihood_sum = acc;
  d.accept = d.log_likelihood_sum >= d.threshold;
  return d;
}

inline nlohmann::ordered_json verifier_decision_to_json(
    const VerifierDecision& d) {
  nlohmann::ordered_json j;
  j["accept"] = d.accept;
  j["log_sum"] = d.log_likelihood_sum;
  j["threshold"] = d.threshold;
  j["k"] = d.k;
  return j;
}

/**
 * Per-sample mockup statistics: Per(A_S^#), |Det(A_S)|^2, and the
 * row-norm-mockup probability of S. Three streams suitable for two-sample
 * tests between sampler kinds.
 */
struct MockupStatistics {
  std::vector<double> classical_permanent;
  std::vector<double> det_squared;
  std::vector<double> rownorm_prob;
};

inline MockupStatistics mockup_statistics(const ComplexMatrix& a,
                                          const SampleBatch& batch) {
  if (a.cols() > kMaxTablePhotons)
    throw resource_limit_error("mockup_statistics: n > 9");
  ComplexMatrix abs2(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) abs2(i, j) = std::norm(a(i, j));
  const std::vector<double> row_norms = row_squared_norms(a);
  const double n = static_cast<double>(a.cols());
  const double log_n_fact = detail::log_factorial(a.cols());

  MockupStatistics out;
  out.classical_permanent.reserve(batch.outcomes.size());
  out.det_squared.reserve(batch.outcomes.size());
  out.rownorm_prob.reserve(batch.outcomes.size());
  for (const Outcome& s : batch.outcomes) {
    out.classical_permanent.push_back(
        permanent_ryser(submatrix_for_outcome(abs2, s)).real());
    out.det_squared.push_back(
        std::norm(determinant(submatrix_for_outcome(a, s))));
    double log_p = log_n_fact;
    bool zero = false;
    for (std::size_t i = 0; i < s.modes() && !zero; ++i) {
      if (s[i] == 0) continue;
      log_p -= detail::log_factorial(static_cast<std::size_t>(s[i]));
      if (row_norms[i] == 0.0)
        zero = true;
      else
        log_p += s[i] * (std::log(row_norms[i]) - std::log(n));
    }
    out.rownorm_prob.push_back(zero ? 0.0 : std::exp(log_p));
  }
  return out;
}

/// Statistic stream rows as CSV: (rank, statistic-kind, value), one row
/// per sample in batch order. Callers emit the header once.
inline constexpr const char* kStatisticCsvHeader = "rank,statistic_kind,value\n";

inline void write_statistic_csv(std::ostream& os, const std::string& kind,
                                const std::vector<double>& values) {
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << i << ',' << kind << ',';
    std::snprintf(buf, sizeof(buf), "%.17g\n", values[i]);
    os << buf;
  }
}

}  // namespace bsv
