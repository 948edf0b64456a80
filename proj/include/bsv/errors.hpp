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

#include <stdexcept>
#include <string>

namespace bsv {

/// Thrown when a request exceeds a hard size/cost guard (e.g. permanents
/// beyond n = 32, outcome spaces beyond the enumeration cap).
class resource_limit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a computation degenerates numerically (e.g. per-round
/// probabilities of the fermion sampler failing to normalize, or a
/// division by a vanished row-norm product).
class degeneracy_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsv
