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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsv/errors.hpp"
#include "bsv/rng.hpp"

namespace bsv {

inline constexpr double kEulerGamma = std::numbers::egamma_v<double>;

/// Deterministic pairwise (tree) summation; order-stable across runs.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 32) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Sample mean/variance/fourth central moment with standard errors.
struct DistributionSummary {
  double mean = 0.0;
  double variance = 0.0;
  double fourth_central = 0.0;
  std::size_t count = 0;
  double se_mean = 0.0;
  double se_variance = 0.0;
};

inline nlohmann::ordered_json summary_to_json(const DistributionSummary& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["fourth_central_moment"] = s.fourth_central;
  j["count"] = s.count;
  j["se_mean"] = s.se_mean;
  j["se_variance"] = s.se_variance;
  return j;
}

inline DistributionSummary summarize(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("summarize: empty sample");
  DistributionSummary out;
  out.count = xs.size();
  const double n = static_cast<double>(xs.size());
  out.mean = pairwise_sum(xs) / n;
  std::vector<double> d2(xs.size()), d4(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - out.mean;
    d2[i] = d * d;
    d4[i] = d2[i] * d2[i];
  }
  out.variance = pairwise_sum(d2) / n;
  out.fourth_central = pairwise_sum(d4) / n;
  out.se_mean = std::sqrt(out.variance / n);
  const double var_of_var = out.fourth_central - out.variance * out.variance;
  out.se_variance = std::sqrt(std::max(var_of_var, 0.0) / n);
  return out;
}

inline double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Regularized lower incomplete gamma P(k, x) for integer k >= 1:
/// P(k, x) = 1 - e^{-x} sum_{j<k} x^j / j!.
inline double regularized_gamma_p(std::size_t k, double x) {
  if (k == 0) throw std::invalid_argument("regularized_gamma_p: k == 0");
  if (x <= 0.0) return 0.0;
  // term_j = e^{-x} x^j / j!, accumulated in linear space; for the desk
  // range (k <= ~600) e^{-x} stays representable on the support we probe.
  double term = std::exp(-x);
  double sum = term;
  for (std::size_t j = 1; j < k; ++j) {
    term *= x / static_cast<double>(j);
    sum += term;
  }
  return std::clamp(1.0 - sum, 0.0, 1.0);
}

/**
 * Reference laws for CDF-distance checks: the standard normal, the
 * lognormal, the complex chi^2 with n degrees of freedom (pdf
 * e^{-r} r^{n-1} / (n-1)!), and the exponential with rate c.
 */
struct ReferenceLaw {
  enum class Kind { standard_normal, lognormal, complex_chisq, exponential };

  Kind kind = Kind::standard_normal;
  double mu = 0.0;      // lognormal location (of the underlying normal)
  double sigma2 = 1.0;  // lognormal variance (of the underlying normal)
  std::size_t dof = 1;  // complex chi^2 degrees of freedom
  double rate = 1.0;    // exponential rate

  static ReferenceLaw standard_normal() { return {}; }
  static ReferenceLaw lognormal(double mu, double sigma2) {
    if (sigma2 <= 0.0)
      throw std::invalid_argument("ReferenceLaw::lognormal: sigma2 <= 0");
    ReferenceLaw law;
    law.kind = Kind::lognormal;
    law.mu = mu;
    law.sigma2 = sigma2;
    return law;
  }
  static ReferenceLaw complex_chisq(std::size_t n) {
    if (n == 0)
      throw std::invalid_argument("ReferenceLaw::complex_chisq: n == 0");
    ReferenceLaw law;
    law.kind = Kind::complex_chisq;
    law.dof = n;
    return law;
  }
  static ReferenceLaw exponential(double c) {
    if (c <= 0.0)
      throw std::invalid_argument("ReferenceLaw::exponential: rate <= 0");
    ReferenceLaw law;
    law.kind = Kind::exponential;
    law.rate = c;
    return law;
  }

  double cdf(double x) const {
    switch (kind) {
      case Kind::standard_normal:
        return standard_normal_cdf(x);
      case Kind::lognormal:
        if (x <= 0.0) return 0.0;
        return standard_normal_cdf((std::log(x) - mu) / std::sqrt(sigma2));
      case Kind::complex_chisq:
        return regularized_gamma_p(dof, x);
      case Kind::exponential:
        return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x);
    }
    return 0.0;
  }
};

/// Half the l1 distance between two weight vectors, co-normalized by their
/// own masses.
inline double total_variation(std::span<const double> p,
                              std::span<const double> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("total_variation: size mismatch");
  const double mp = pairwise_sum(p);
  const double mq = pairwise_sum(q);
  if (mp <= 0.0 || mq <= 0.0)
    throw std::invalid_argument("total_variation: nonpositive total mass");
  std::vector<double> diff(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    diff[i] = std::abs(p[i] / mp - q[i] / mq);
  return 0.5 * pairwise_sum(diff);
}

/**
 * One-sample Kolmogorov-Smirnov distance: sup over the sample points of
 * |empirical CDF - law CDF|, with the empirical CDF evaluated
 * right-continuously at each point. Requires >= 100 sorted samples.
 */
inline double ks_distance(const std::vector<double>& sorted,
                          const ReferenceLaw& law) {
  if (sorted.size() < 100)
    throw std::invalid_argument("ks_distance: need at least 100 samples");
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i - 1] > sorted[i])
      throw std::invalid_argument("ks_distance: samples not sorted");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double ecdf = static_cast<double>(j + 1) / n;
    d = std::max(d, std::abs(ecdf - law.cdf(sorted[i])));
    i = j + 1;
  }
  return d;
}

/// Two-sample KS distance between sorted samples.
inline double ks_two_sample(const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

/**
 * Closed-form cumulant data for ell_n = ln(complex chi^2 with n dof):
 *   E[ell_n]   = -gamma + sum_{j<n} 1/j
 *   Var[ell_n] = pi^2/6 - sum_{j<n} 1/j^2
 *   E[(ell_n - E)^4] = 6 (pi^4/90 - sum_{j<n} 1/j^4) + 3 Var^2
 * Partial sums are evaluated directly in double precision.
 */
struct LogChisqMoments {
  double mean = 0.0;
  double variance = 0.0;
  double fourth_central = 0.0;
};

inline LogChisqMoments log_chisq_moments(std::size_t n) {
  if (n == 0) throw std::invalid_argument("log_chisq_moments: n == 0");
  double h1 = 0.0, h2 = 0.0, h4 = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double x = static_cast<double>(j);
    h1 += 1.0 / x;
    h2 += 1.0 / (x * x);
    h4 += 1.0 / (x * x * x * x);
  }
  LogChisqMoments out;
  out.mean = -kEulerGamma + h1;
  out.variance = std::numbers::pi * std::numbers::pi / 6.0 - h2;
  const double pi4 = std::pow(std::numbers::pi, 4);
  out.fourth_central = 6.0 * (pi4 / 90.0 - h4) + 3.0 * out.variance * out.variance;
  return out;
}

/// Convexity bound rho_n <= (fourth central moment)^{3/4} on the third
/// absolute central moment, and the resulting CLT error ratio.
inline double berry_esseen_ratio(std::size_t n) {
  const LogChisqMoments mom = log_chisq_moments(n);
  const double rho = std::pow(mom.fourth_central, 0.75);
  const double sigma = std::sqrt(mom.variance);
  return rho / (sigma * sigma * sigma * std::sqrt(static_cast<double>(n)));
}

/**
 * Limiting law of |Det(X)|^2 for an n x n iid complex Gaussian X:
 * lognormal with underlying normal mean n ln n - n + 1/2 and variance
 * ln n + 1 + gamma.
 */
inline ReferenceLaw lognormal_det_reference(std::size_t n) {
  if (n < 2)
    throw std::invalid_argument("lognormal_det_reference: need n >= 2");
  const double nn = static_cast<double>(n);
  const double mu = nn * std::log(nn) - nn + 0.5;
  const double sigma2 = std::log(nn) + 1.0 + kEulerGamma;
  return ReferenceLaw::lognormal(mu, sigma2);
}

/// One draw of the product of independent complex chi^2 variables with
/// 1, 2, ..., n degrees of freedom (the exact law of |Det(X)|^2 for an
/// n x n iid complex Gaussian X).
inline double chisq_product_sample(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("chisq_product_sample: n == 0");
  if (n > 170)
    throw resource_limit_error("chisq_product_sample: n > 170 overflows");
  double prod = 1.0;
  for (std::size_t t = 1; t <= n; ++t) prod *= rng.chisq_complex(t);
  return prod;
}

/// Moment gates for samples of P = |Per(X)|^2 / n!: E[P] = 1 and
/// E[P^2] = n + 1.
struct MomentCheck {
  DistributionSummary summary;
  double second_moment = 0.0;
  double mean_target = 1.0;
  double second_target = 0.0;
  bool mean_ok = false;
  bool second_ok = false;
};

inline MomentCheck moment_checks(std::span<const double> p_samples,
                                 std::size_t n, double mean_band = 0.03,
                                 double second_rel_band = 0.15) {
  if (p_samples.size() < 10'000)
    throw std::invalid_argument("moment_checks: need at least 10^4 samples");
  MomentCheck out;
  out.summary = summarize(p_samples);
  std::vector<double> sq(p_samples.size());
  for (std::size_t i = 0; i < p_samples.size(); ++i)
    sq[i] = p_samples[i] * p_samples[i];
  out.second_moment = pairwise_sum(sq) / static_cast<double>(sq.size());
  out.second_target = static_cast<double>(n) + 1.0;
  out.mean_ok = std::abs(out.summary.mean - out.mean_target) <= mean_band;
  out.second_ok = std::abs(out.second_moment - out.second_target) <=
                  second_rel_band * out.second_target;
  return out;
}

/// Wilson score interval for a binomial fraction (z = 1.96 for 95%).
struct FractionEstimate {
  double fraction = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t count = 0;
};

inline FractionEstimate wilson_interval(std::size_t successes,
                                        std::size_t trials,
                                        double z = 1.959963984540054) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  FractionEstimate out;
  out.count = trials;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  out.fraction = p;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  out.ci_lo = std::max(0.0, centre - half);
  out.ci_hi = std::min(1.0, centre + half);
  return out;
}

// --- Histograms (plot-ready CSV export shape: bin_left, bin_right, density).

struct Histogram {
  std::vector<double> edges;          // bins + 1 entries
  std::vector<std::uint64_t> counts;  // in-range counts
  std::size_t total = 0;              // all samples, including out-of-range

  double density(std::size_t k) const {
    const double w = edges[k + 1] - edges[k];
    return static_cast<double>(counts[k]) / (static_cast<double>(total) * w);
  }
  double density_se(std::size_t k) const {
    const double w = edges[k + 1] - edges[k];
    return std::sqrt(static_cast<double>(counts[k])) /
           (static_cast<double>(total) * w);
  }
};

inline Histogram linear_histogram(std::span<const double> xs, double lo,
                                  double hi, std::size_t bins) {
  if (!(hi > lo) || bins == 0)
    throw std::invalid_argument("linear_histogram: bad range");
  Histogram h;
  h.total = xs.size();
  h.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k)
    h.edges[k] = lo + (hi - lo) * static_cast<double>(k) /
                          static_cast<double>(bins);
  h.counts.assign(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double x : xs) {
    if (x < lo || x >= hi) continue;
    auto k = static_cast<std::size_t>((x - lo) * scale);
    if (k >= bins) k = bins - 1;
    ++h.counts[k];
  }
  return h;
}

inline Histogram geometric_histogram(std::span<const double> xs, double lo,
                                     double hi, std::size_t bins) {
  if (!(hi > lo) || lo <= 0.0 || bins == 0)
    throw std::invalid_argument("geometric_histogram: bad range");
  Histogram h;
  h.total = xs.size();
  h.edges.resize(bins + 1);
  const double ratio = std::log(hi / lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k)
    h.edges[k] = lo * std::exp(ratio * static_cast<double>(k));
  h.counts.assign(bins, 0);
  for (double x : xs) {
    if (x < lo || x >= hi) continue;
    auto k = static_cast<std::size_t>(std::log(x / lo) / ratio);
    if (k >= bins) k = bins - 1;
    ++h.counts[k];
  }
  return h;
}

/// Largest upward step between adjacent bin densities, in combined
/// standard errors; a monotone-decreasing density should keep this below
/// the noise multiple used by the caller.
inline double max_monotone_violation_sigma(const Histogram& h) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < h.counts.size(); ++k) {
    const double rise = h.density(k + 1) - h.density(k);
    if (rise <= 0.0) continue;
    const double se = std::sqrt(h.density_se(k) * h.density_se(k) +
                                h.density_se(k + 1) * h.density_se(k + 1));
    worst = std::max(worst, se > 0.0 ? rise / se : HUGE_VAL);
  }
  return worst;
}

inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_left,bin_right,density\n";
  char buf[96];
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", h.edges[k],
                  h.edges[k + 1], h.density(k));
    os << buf;
  }
}

}  // namespace bsv
