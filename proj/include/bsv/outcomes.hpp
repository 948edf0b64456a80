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

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsv/errors.hpp"

namespace bsv {

/**
 * Experimental outcome: occupation list S = (s_1, ..., s_m) of photon
 * counts per mode. The photon number n = sum s_i is carried by the list
 * itself; n = 0 (the empty outcome) is allowed.
 */
class Outcome {
 public:
  Outcome() = default;
  explicit Outcome(std::vector<int> occupations)
      : occ_(std::move(occupations)) {
    photons_ = 0;
    for (int s : occ_) {
      if (s < 0) throw std::invalid_argument("Outcome: negative occupation");
      photons_ += static_cast<std::size_t>(s);
    }
  }

  std::size_t modes() const { return occ_.size(); }
  std::size_t photons() const { return photons_; }
  int operator[](std::size_t i) const { return occ_[i]; }
  const std::vector<int>& occupations() const { return occ_; }

  bool operator==(const Outcome& other) const { return occ_ == other.occ_; }

 private:
  std::vector<int> occ_;
  std::size_t photons_ = 0;
};

/// true iff every s_i is 0 or 1.
inline bool is_collision_free(const Outcome& s) {
  for (std::size_t i = 0; i < s.modes(); ++i)
    if (s[i] > 1) return false;
  return true;
}

/// s_1! ... s_m!  (the outcome's automorphism count).
inline std::uint64_t multiplicity_factorial(const Outcome& s) {
  std::uint64_t prod = 1;
  for (std::size_t i = 0; i < s.modes(); ++i) {
    if (s[i] > 20)
      throw resource_limit_error(
          "multiplicity_factorial: occupation > 20 overflows 64 bits");
    for (int k = 2; k <= s[i]; ++k) prod *= static_cast<std::uint64_t>(k);
  }
  return prod;
}

/// C(n, k) in exact 64-bit arithmetic; overflow reported rather than wrapped.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;  // exact: prefix products are binomials
    if (acc > UINT64_MAX)
      throw resource_limit_error("binomial: value exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

enum class SpaceKind {
  full,            // Phi_{m,n}: all occupation lists summing to n
  collision_free,  // Lambda_{m,n}: s_i in {0,1}
};

/**
 * An enumerable outcome space. Enumeration order is descending
 * lexicographic on occupation vectors (highest occupation of low-index
 * modes first); this is the canonical order used for probability-table
 * indexing and must not change.
 */
struct OutcomeSpace {
  std::size_t modes = 0;
  std::size_t photons = 0;
  SpaceKind kind = SpaceKind::full;

  static OutcomeSpace full(std::size_t m, std::size_t n) {
    return {m, n, SpaceKind::full};
  }
  static OutcomeSpace collision_free(std::size_t m, std::size_t n) {
    return {m, n, SpaceKind::collision_free};
  }

  std::uint64_t size() const {
    if (modes == 0) return photons == 0 ? 1 : 0;
    if (kind == SpaceKind::full) return binomial(modes + photons - 1, photons);
    return binomial(modes, photons);
  }

  bool contains(const Outcome& s) const {
    if (s.modes() != modes || s.photons() != photons) return false;
    if (kind == SpaceKind::collision_free && !is_collision_free(s))
      return false;
    return true;
  }

  bool operator==(const OutcomeSpace& o) const {
    return modes == o.modes && photons == o.photons && kind == o.kind;
  }
};

inline constexpr std::uint64_t kMaxEnumerableOutcomes = 10'000'000;

namespace detail {

// Compositions of `photons` into `modes` nonnegative parts.
inline std::uint64_t composition_count(std::size_t modes,
                                       std::uint64_t photons) {
  if (modes == 0) return photons == 0 ? 1 : 0;
  return binomial(modes + photons - 1, photons);
}

// Advances `s` to its successor in descending lexicographic order over
// compositions of fixed total; returns false from the last one.
inline bool next_full_outcome(std::vector<int>& s) {
  const std::size_t m = s.size();
  if (m <= 1) return false;
  std::size_t i = m - 1;
  // rightmost index < m-1 with s_i > 0
  bool found = false;
  for (std::size_t j = m - 1; j-- > 0;) {
    if (s[j] > 0) {
      i = j;
      found = true;
      break;
    }
  }
  if (!found) return false;
  int moved = 1;
  for (std::size_t j = i + 1; j < m; ++j) {
    moved += s[j];
    s[j] = 0;
  }
  s[i] -= 1;
  s[i + 1] = moved;
  return true;
}

// Same, over collision-free outcomes (combinations of occupied modes in
// ascending index order, which coincides with descending lex occupations).
inline bool next_collision_free_outcome(std::vector<int>& s) {
  const std::size_t m = s.size();
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < m; ++i)
    if (s[i] == 1) pos.push_back(i);
  const std::size_t n = pos.size();
  if (n == 0) return false;
  // standard next-combination on positions
  std::size_t k = n;
  while (k-- > 0) {
    if (pos[k] < m - (n - k)) {
      ++pos[k];
      for (std::size_t j = k + 1; j < n; ++j) pos[j] = pos[j - 1] + 1;
      std::fill(s.begin(), s.end(), 0);
      for (std::size_t p : pos) s[p] = 1;
      return true;
    }
    if (k == 0) break;
  }
  return false;
}

}  // namespace detail

/// First outcome of the space in enumeration order.
inline Outcome first_outcome(const OutcomeSpace& space) {
  std::vector<int> s(space.modes, 0);
  if (space.photons > 0) {
    if (space.kind == SpaceKind::full) {
      s[0] = static_cast<int>(space.photons);
    } else {
      if (space.photons > space.modes)
        throw std::invalid_argument("first_outcome: empty space");
      for (std::size_t i = 0; i < space.photons; ++i) s[i] = 1;
    }
  }
  return Outcome(std::move(s));
}

/**
 * Visits every outcome in enumeration order without materializing the
 * space; `fn(rank, occupations)` is called with a reusable buffer. Guarded
 * at 10^7 outcomes.
 */
template <typename Fn>
void for_each_outcome(const OutcomeSpace& space, Fn&& fn) {
  const std::uint64_t count = space.size();
  if (count > kMaxEnumerableOutcomes)
    throw resource_limit_error("outcome space has " + std::to_string(count) +
                               " elements, above the 10^7 enumeration guard");
  if (count == 0) return;
  std::vector<int> s = first_outcome(space).occupations();
  const std::vector<int>& view = s;
  std::uint64_t rank = 0;
  for (;;) {
    fn(rank, view);
    ++rank;
    const bool more = (space.kind == SpaceKind::full)
                          ? detail::next_full_outcome(s)
                          : detail::next_collision_free_outcome(s);
    if (!more) break;
  }
  if (rank != count)
    throw std::logic_error("for_each_outcome: enumeration count mismatch");
}

/// Materialized enumeration (same guard and order as for_each_outcome).
inline std::vector<Outcome> enumerate(const OutcomeSpace& space) {
  std::vector<Outcome> all;
  all.reserve(static_cast<std::size_t>(space.size()));
  for_each_outcome(space, [&all](std::uint64_t, const std::vector<int>& s) {
    all.emplace_back(s);
  });
  return all;
}

/// Index of S in enumeration order. S must lie in the space (collision
/// outcomes passed with a collision-free space are invalid-argument).
inline std::uint64_t rank(const Outcome& s, const OutcomeSpace& space) {
  if (!space.contains(s))
    throw std::invalid_argument("rank: outcome not in space");
  const std::size_t m = space.modes;
  if (space.kind == SpaceKind::full) {
    std::uint64_t r = 0;
    std::uint64_t rem = space.photons;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::uint64_t t = rem; t > static_cast<std::uint64_t>(s[i]); --t)
        r += detail::composition_count(m - i - 1, rem - t);
      rem -= static_cast<std::uint64_t>(s[i]);
    }
    return r;
  }
  std::uint64_t r = 0;
  std::size_t k = 0;
  std::size_t prev = 0;
  for (std::size_t c = 0; c < m; ++c) {
    if (s[c] != 1) continue;
    for (std::size_t j = prev; j < c; ++j)
      r += binomial(m - 1 - j, space.photons - 1 - k);
    prev = c + 1;
    ++k;
  }
  return r;
}

/// Inverse of rank.
inline Outcome unrank(std::uint64_t index, const OutcomeSpace& space) {
  if (index >= space.size())
    throw std::invalid_argument("unrank: index out of range");
  const std::size_t m = space.modes;
  std::vector<int> s(m, 0);
  if (space.kind == SpaceKind::full) {
    std::uint64_t rem = space.photons;
    for (std::size_t i = 0; i < m; ++i) {
      if (i + 1 == m) {
        s[i] = static_cast<int>(rem);
        break;
      }
      for (std::uint64_t t = rem + 1; t-- > 0;) {
        const std::uint64_t c = detail::composition_count(m - i - 1, rem - t);
        if (index < c) {
          s[i] = static_cast<int>(t);
          rem -= t;
          break;
        }
        index -= c;
      }
    }
  } else {
    std::size_t pos = 0;
    for (std::size_t k = 0; k < space.photons; ++k) {
      for (;; ++pos) {
        const std::uint64_t c = binomial(m - 1 - pos, space.photons - 1 - k);
        if (index < c) break;
        index -= c;
      }
      s[pos] = 1;
      ++pos;
    }
  }
  return Outcome(std::move(s));
}

/// Outcome as a JSON integer array.
inline nlohmann::json outcome_to_json(const Outcome& s) {
  return nlohmann::json(s.occupations());
}

inline Outcome outcome_from_json(const nlohmann::json& j) {
  return Outcome(j.get<std::vector<int>>());
}

}  // namespace bsv
