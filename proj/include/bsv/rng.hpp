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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bsv {

namespace detail {

// splitmix64 finalizer; used only to spread (seed, stream) into engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/**
 * Seeded random stream with an explicit substream id.
 *
 * Identical (seed, stream_id) pairs produce identical draw sequences on any
 * conforming standard library: the engine is mt19937_64 (whose output is
 * specified by the standard) and every distribution below is implemented
 * directly on top of the raw 64-bit output, never via std:: distribution
 * adaptors (whose sequences are implementation-defined).
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed),
        stream_(stream_id),
        engine_(detail::splitmix64(detail::splitmix64(seed) ^
                                   detail::splitmix64(~stream_id))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  /// Derives an independent stream; same (seed, parent, child) always maps
  /// to the same stream.
  RngStream substream(std::uint64_t child) const {
    return RngStream(seed_, detail::splitmix64(stream_) ^ child);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0,1]; safe as a log argument.
  double uniform_positive() { return 1.0 - uniform01(); }

  /// Unbiased uniform integer in [0, bound) via bitmask rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("RngStream::below: bound == 0");
    const std::uint64_t mask = std::bit_ceil(bound) - 1;
    std::uint64_t x;
    do {
      x = engine_() & mask;
    } while (x >= bound);
    return x;
  }

  /// Exp(1) draw.
  double exponential() { return -std::log(uniform_positive()); }

  /// Standard complex Gaussian: E[x] = 0, E[|x|^2] = 1, real and imaginary
  /// parts independent N(0, 1/2). Drawn in polar form: |x|^2 ~ Exp(1),
  /// phase uniform.
  std::complex<double> gaussian() {
    const double r = std::sqrt(exponential());
    const double theta = 2.0 * std::numbers::pi * uniform01();
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  /// Real N(0,1) draw (Box-Muller, cosine branch).
  double gaussian_real() {
    const double r = std::sqrt(2.0 * exponential());
    return r * std::cos(2.0 * std::numbers::pi * uniform01());
  }

  /// Complex chi^2 with `dof` degrees of freedom: sum of dof iid Exp(1)
  /// variables, i.e. |x_1|^2 + ... + |x_dof|^2 for standard complex
  /// Gaussians x_j. Uses -ln of chunked uniform products (one log per
  /// chunk; chunks kept short of the double underflow range).
  double chisq_complex(std::size_t dof) {
    double total = 0.0;
    while (dof > 0) {
      const std::size_t chunk = dof < 256 ? dof : 256;
      double prod = 1.0;
      for (std::size_t i = 0; i < chunk; ++i) prod *= uniform_positive();
      total += -std::log(prod);
      dof -= chunk;
    }
    return total;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace bsv
