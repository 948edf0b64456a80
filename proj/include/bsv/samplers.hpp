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
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsv/complex_matrix.hpp"
#include "bsv/errors.hpp"
#include "bsv/linalg.hpp"
#include "bsv/outcomes.hpp"
#include "bsv/rng.hpp"
#include "bsv/stats.hpp"

namespace bsv {

inline constexpr std::size_t kMaxTablePhotons = 9;

/// Whether an exact table keeps raw weights (e.g. the unnormalized
/// restriction of a distribution to the collision-free set, with its total
/// mass recorded) or is divided through by its mass.
enum class Normalization { normalized, raw };

/**
 * Exact distribution over an enumerated outcome space. `probs` is indexed
 * by outcome rank in the canonical enumeration order; `total_mass` always
 * records the pre-normalization weight sum.
 */
struct ProbabilityTable {
  OutcomeSpace space;
  std::vector<double> probs;
  std::vector<double> cumulative;
  double total_mass = 0.0;
  bool normalized = false;

  void finish(Normalization norm) {
    total_mass = pairwise_sum(probs);
    if (total_mass <= 0.0)
      throw degeneracy_error("ProbabilityTable: vanishing total mass");
    normalized = (norm == Normalization::normalized);
    if (normalized) {
      for (double& p : probs) p /= total_mass;
    }
    cumulative.resize(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cumulative[i] = acc;
    }
    if (normalized) cumulative.back() = 1.0;
  }
};

/// Table total-variation distance; both tables are co-normalized by their
/// own masses. Requires identical spaces (hence identical rank order).
inline double total_variation(const ProbabilityTable& p,
                              const ProbabilityTable& q) {
  if (!(p.space == q.space))
    throw std::invalid_argument("total_variation: space mismatch");
  return total_variation(std::span<const double>(p.probs),
                         std::span<const double>(q.probs));
}

/// Uniform table over a space.
inline ProbabilityTable uniform_table(const OutcomeSpace& space) {
  ProbabilityTable t;
  t.space = space;
  t.probs.assign(static_cast<std::size_t>(space.size()), 1.0);
  t.finish(Normalization::normalized);
  return t;
}

/// Uniform-over-collision-free outcomes, embedded in the full space
/// (weight on collided outcomes is zero). This is the comparison measure
/// for the variation-distance experiments.
inline ProbabilityTable uniform_collision_free_in_full(std::size_t m,
                                                       std::size_t n) {
  const OutcomeSpace full = OutcomeSpace::full(m, n);
  ProbabilityTable t;
  t.space = full;
  t.probs.assign(static_cast<std::size_t>(full.size()), 0.0);
  for_each_outcome(full, [&t](std::uint64_t r, const std::vector<int>& s) {
    bool cf = true;
    for (int v : s)
      if (v > 1) cf = false;
    if (cf) t.probs[r] = 1.0;
  });
  t.finish(Normalization::normalized);
  return t;
}

namespace detail {

template <typename WeightFn>
ProbabilityTable build_table(const OutcomeSpace& space, Normalization norm,
                             WeightFn&& weight) {
  ProbabilityTable t;
  t.space = space;
  t.probs.assign(static_cast<std::size_t>(space.size()), 0.0);
  for_each_outcome(space, [&](std::uint64_t r, const std::vector<int>& s) {
    t.probs[r] = weight(s);
  });
  t.finish(norm);
  return t;
}

inline void require_interferometer(const ComplexMatrix& a,
                                   const char* where) {
  if (!is_column_orthonormal(a))
    throw std::invalid_argument(std::string(where) +
                                ": matrix is not column-orthonormal");
}

inline double factorial_double(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

}  // namespace detail

/**
 * Exact boson table: weight |Per(A_S)|^2 / (s_1! ... s_m!) per outcome.
 * Over the full space this is a normalized distribution (mass 1 up to
 * roundoff, recorded in total_mass before any normalization); over the
 * collision-free space it is the unnormalized restriction, kept raw or
 * normalized per the explicit flag.
 */
inline ProbabilityTable exact_boson_table(const ComplexMatrix& a,
                                          const OutcomeSpace& space,
                                          Normalization norm) {
  detail::require_interferometer(a, "exact_boson_table");
  if (space.modes != a.rows())
    throw std::invalid_argument("exact_boson_table: mode count mismatch");
  if (space.photons != a.cols())
    throw std::invalid_argument("exact_boson_table: photon/column mismatch");
  if (space.photons > kMaxTablePhotons)
    throw resource_limit_error("exact_boson_table: n > 9");
  ComplexMatrix sub(a.cols(), a.cols());
  return detail::build_table(space, norm, [&](const std::vector<int>& s) {
    std::size_t r = 0;
    double mult = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int c = 0; c < s[i]; ++c) {
        for (std::size_t j = 0; j < a.cols(); ++j) sub(r, j) = a(i, j);
        ++r;
      }
      mult *= detail::factorial_double(static_cast<std::size_t>(s[i]));
    }
    return std::norm(permanent_ryser(sub)) / mult;
  });
}

/// Exact fermion table over the collision-free space: |Det(A_S)|^2.
inline ProbabilityTable exact_fermion_table(const ComplexMatrix& a,
                                            const OutcomeSpace& space,
                                            Normalization norm) {
  detail::require_interferometer(a, "exact_fermion_table");
  if (space.kind != SpaceKind::collision_free)
    throw std::invalid_argument(
        "exact_fermion_table: fermion outcomes are collision-free");
  if (space.modes != a.rows() || space.photons != a.cols())
    throw std::invalid_argument("exact_fermion_table: shape mismatch");
  ComplexMatrix sub(a.cols(), a.cols());
  return detail::build_table(space, norm, [&](const std::vector<int>& s) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 0) continue;
      for (std::size_t j = 0; j < a.cols(); ++j) sub(r, j) = a(i, j);
      ++r;
    }
    return std::norm(determinant(sub));
  });
}

/// Exact classical-mockup table: Per(A_S^#) / (s_1! ... s_m!) where
/// A^#_{ij} = |a_ij|^2.
inline ProbabilityTable exact_mockup_classical_table(const ComplexMatrix& a,
                                                     const OutcomeSpace& space,
                                                     Normalization norm) {
  if (space.modes != a.rows() || space.photons != a.cols())
    throw std::invalid_argument(
        "exact_mockup_classical_table: shape mismatch");
  if (space.photons > kMaxTablePhotons)
    throw resource_limit_error("exact_mockup_classical_table: n > 9");
  ComplexMatrix abs2(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) abs2(i, j) = std::norm(a(i, j));
  ComplexMatrix sub(a.cols(), a.cols());
  return detail::build_table(space, norm, [&](const std::vector<int>& s) {
    std::size_t r = 0;
    double mult = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int c = 0; c < s[i]; ++c) {
        for (std::size_t j = 0; j < a.cols(); ++j) sub(r, j) = abs2(i, j);
        ++r;
      }
      mult *= detail::factorial_double(static_cast<std::size_t>(s[i]));
    }
    return permanent_ryser(sub).real() / mult;
  });
}

/// Exact row-norm mockup table: the multinomial law of n iid row draws
/// with Pr[row i] = R_i / n, i.e. (n! / prod s_i!) prod (R_i/n)^{s_i}.
inline ProbabilityTable exact_mockup_rownorm_table(const ComplexMatrix& a,
                                                   const OutcomeSpace& space,
                                                   Normalization norm) {
  if (space.modes != a.rows() || space.photons != a.cols())
    throw std::invalid_argument("exact_mockup_rownorm_table: shape mismatch");
  const std::vector<double> row_norms = row_squared_norms(a);
  const double n = static_cast<double>(a.cols());
  const double n_fact = detail::factorial_double(a.cols());
  return detail::build_table(space, norm, [&](const std::vector<int>& s) {
    double p = n_fact;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 0) continue;
      p /= detail::factorial_double(static_cast<std::size_t>(s[i]));
      p *= std::pow(row_norms[i] / n, s[i]);
    }
    return p;
  });
}

/**
 * Seeded sample batch with provenance: sampler kind, (seed, stream) of the
 * stream that produced it, and the content hash of A (empty when no matrix
 * is involved).
 */
struct SampleBatch {
  std::vector<Outcome> outcomes;
  std::string sampler_kind;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string matrix_hash;
  std::size_t modes = 0;
};

/// One inverse-CDF draw from a table.
inline std::uint64_t table_draw_rank(const ProbabilityTable& t,
                                     RngStream& rng) {
  const double u = rng.uniform01() * t.cumulative.back();
  const auto it =
      std::upper_bound(t.cumulative.begin(), t.cumulative.end(), u);
  const auto idx = static_cast<std::uint64_t>(
      std::min<std::ptrdiff_t>(it - t.cumulative.begin(),
                               static_cast<std::ptrdiff_t>(t.probs.size()) - 1));
  return idx;
}

inline Outcome table_draw(const ProbabilityTable& t, RngStream& rng) {
  return unrank(table_draw_rank(t, rng), t.space);
}

/// k iid inverse-CDF draws.
inline SampleBatch sample_from_table(const ProbabilityTable& t, std::size_t k,
                                     RngStream& rng,
                                     std::string kind = "table",
                                     std::string matrix_hash = {}) {
  SampleBatch batch;
  batch.sampler_kind = std::move(kind);
  batch.seed = rng.seed();
  batch.stream = rng.stream_id();
  batch.matrix_hash = std::move(matrix_hash);
  batch.modes = t.space.modes;
  batch.outcomes.reserve(k);
  for (std::size_t i = 0; i < k; ++i) batch.outcomes.push_back(table_draw(t, rng));
  return batch;
}

/// Uniform outcome via a uniform rank.
inline Outcome sample_uniform(const OutcomeSpace& space, RngStream& rng) {
  return unrank(rng.below(space.size()), space);
}

/**
 * Exact fermion sampler, n rounds of row projection:
 * start from the transposed rows v_i of A; each round samples a mode with
 * probability ||v_i||^2 / (n - t + 1) and projects every vector onto the
 * orthogonal complement of the sampled one. Output is always
 * collision-free. O(m n^2) time.
 */
inline Outcome sample_fermion(const ComplexMatrix& a, RngStream& rng) {
  detail::require_interferometer(a, "sample_fermion");
  const std::size_t m = a.rows(), n = a.cols();
  if (n == 0 || m < n)
    throw std::invalid_argument("sample_fermion: need m >= n >= 1");

  // v[i] = i-th row of A, transposed; norms tracked for the degeneracy and
  // re-orthogonalization thresholds.
  std::vector<std::vector<std::complex<double>>> v(m);
  std::vector<double> norm2(m), initial_norm2(m);
  for (std::size_t i = 0; i < m; ++i) {
    v[i].resize(n);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      v[i][j] = a(i, j);
      s += std::norm(v[i][j]);
    }
    norm2[i] = initial_norm2[i] = s;
  }

  std::vector<int> occ(m, 0);
  std::vector<double> cum(m);
  for (std::size_t t = 1; t <= n; ++t) {
    const double denom = static_cast<double>(n - t + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += norm2[i] / denom;
      cum[i] = acc;
    }
    if (std::abs(acc - 1.0) > 1e-6)
      throw degeneracy_error(
          "sample_fermion: per-round probabilities sum to " +
          std::to_string(acc));
    const double u = rng.uniform01() * acc;
    std::size_t h =
        static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) -
                                 cum.begin());
    if (h >= m) h = m - 1;

    occ[h] = 1;
    const std::vector<std::complex<double>> pivot = v[h];
    const double pivot_norm2 = norm2[h];
    for (std::size_t i = 0; i < m; ++i) {
      if (i == h) {
        std::fill(v[i].begin(), v[i].end(), std::complex<double>(0.0));
        norm2[i] = 0.0;
        continue;
      }
      if (norm2[i] == 0.0) continue;
      auto project_once = [&]() {
        std::complex<double> dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += std::conj(pivot[j]) * v[i][j];
        dot /= pivot_norm2;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          v[i][j] -= dot * pivot[j];
          s += std::norm(v[i][j]);
        }
        norm2[i] = s;
      };
      project_once();
      // second pass scrubs residual components once the vector has decayed
      // far below its original scale
      if (norm2[i] < 1e-12 * initial_norm2[i] && norm2[i] > 0.0) project_once();
    }
  }
  return Outcome(std::move(occ));
}

namespace detail {

inline void require_unit_columns(const ComplexMatrix& a, const char* where) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::norm(a(i, j));
    if (std::abs(s - 1.0) > 1e-8)
      throw std::invalid_argument(std::string(where) +
                                  ": column norm deviates from 1");
  }
}

inline Outcome tally_rows(std::size_t m, const std::vector<std::size_t>& hits) {
  std::vector<int> occ(m, 0);
  for (std::size_t h : hits) ++occ[h];
  return Outcome(std::move(occ));
}

}  // namespace detail

/**
 * Classical mockup: photon j lands in mode i with probability |a_ij|^2,
 * independently (distinguishable particles / balls into bins). Law:
 * Per(A_S^#) / prod s_i!.
 */
inline Outcome sample_mockup_classical(const ComplexMatrix& a,
                                       RngStream& rng) {
  detail::require_unit_columns(a, "sample_mockup_classical");
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<std::size_t> hits(n);
  std::vector<double> cum(m);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += std::norm(a(i, j));
      cum[i] = acc;
    }
    const double u = rng.uniform01() * acc;
    auto h = static_cast<std::size_t>(
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    hits[j] = h < m ? h : m - 1;
  }
  return detail::tally_rows(m, hits);
}

/**
 * Row-norm mockup: n rows drawn iid from the single shared distribution
 * Pr[row i] = (|a_i1|^2 + ... + |a_in|^2) / n.
 */
inline Outcome sample_mockup_rownorm(const ComplexMatrix& a, RngStream& rng) {
  detail::require_unit_columns(a, "sample_mockup_rownorm");
  const std::size_t m = a.rows(), n = a.cols();
  const std::vector<double> row_norms = row_squared_norms(a);
  std::vector<double> cum(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += row_norms[i] / static_cast<double>(n);
    cum[i] = acc;
  }
  std::vector<std::size_t> hits(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = rng.uniform01() * acc;
    auto h = static_cast<std::size_t>(
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    hits[j] = h < m ? h : m - 1;
  }
  return detail::tally_rows(m, hits);
}

/**
 * Boson sampling with iid photon loss at the source: each of the n input
 * photons survives with probability 1 - loss_prob; the surviving subset of
 * columns is boson-sampled exactly. Tables are cached per survivor subset,
 * so batch generation builds each one once.
 */
class LossyBosonSampler {
 public:
  LossyBosonSampler(ComplexMatrix a, double loss_prob)
      : a_(std::move(a)), loss_(loss_prob) {
    if (loss_ < 0.0 || loss_ > 1.0)
      throw std::invalid_argument("LossyBosonSampler: loss_prob outside [0,1]");
    detail::require_interferometer(a_, "LossyBosonSampler");
    if (a_.cols() > kMaxTablePhotons)
      throw resource_limit_error("LossyBosonSampler: n > 9");
  }

  Outcome sample(RngStream& rng) {
    const std::size_t n = a_.cols();
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (rng.uniform01() >= loss_) mask |= std::uint64_t{1} << j;
    if (mask == 0) return Outcome(std::vector<int>(a_.rows(), 0));
    return table_draw(table_for(mask), rng);
  }

 private:
  const ProbabilityTable& table_for(std::uint64_t mask) {
    auto it = cache_.find(mask);
    if (it != cache_.end()) return it->second;
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < a_.cols(); ++j)
      if (mask & (std::uint64_t{1} << j)) cols.push_back(j);
    ComplexMatrix kept(a_.rows(), cols.size());
    for (std::size_t i = 0; i < a_.rows(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) kept(i, j) = a_(i, cols[j]);
    ProbabilityTable t = exact_boson_table(
        kept, OutcomeSpace::full(a_.rows(), cols.size()),
        Normalization::normalized);
    return cache_.emplace(mask, std::move(t)).first->second;
  }

  ComplexMatrix a_;
  double loss_;
  std::map<std::uint64_t, ProbabilityTable> cache_;
};

/// Single lossy draw (convenience wrapper; batch callers should hold a
/// LossyBosonSampler to reuse its tables).
inline Outcome sample_lossy_boson(const ComplexMatrix& a, double loss_prob,
                                  RngStream& rng) {
  LossyBosonSampler sampler(a, loss_prob);
  return sampler.sample(rng);
}

// --- Batch JSON-lines interchange: one header record, then one outcome
// (JSON integer array) per line.

inline void write_batch_jsonl(std::ostream& os, const SampleBatch& batch) {
  nlohmann::ordered_json header;
  header["kind"] = batch.sampler_kind;
  header["seed"] = batch.seed;
  header["stream"] = batch.stream;
  header["matrix_hash"] = batch.matrix_hash;
  header["modes"] = batch.modes;
  header["count"] = batch.outcomes.size();
  os << header.dump() << '\n';
  for (const Outcome& s : batch.outcomes) os << outcome_to_json(s).dump() << '\n';
}

inline SampleBatch read_batch_jsonl(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("read_batch_jsonl: missing header");
  const auto header = nlohmann::json::parse(line);
  SampleBatch batch;
  batch.sampler_kind = header.at("kind").get<std::string>();
  batch.seed = header.at("seed").get<std::uint64_t>();
  batch.stream = header.at("stream").get<std::uint64_t>();
  batch.matrix_hash = header.at("matrix_hash").get<std::string>();
  batch.modes = header.at("modes").get<std::size_t>();
  const auto count = header.at("count").get<std::size_t>();
  batch.outcomes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line))
      throw std::invalid_argument("read_batch_jsonl: truncated batch");
    batch.outcomes.push_back(outcome_from_json(nlohmann::json::parse(line)));
  }
  return batch;
}

}  // namespace bsv
