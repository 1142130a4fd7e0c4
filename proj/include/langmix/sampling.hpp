// Copyright 2026 The langmix Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic sampling helpers. std::mt19937_64 has a standard-specified
// output sequence, but std::uniform_int_distribution does not, so the
// bounded draw is done here by rejection and manifests replay identically
// on any platform.

#pragma once

#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

#include "langmix/errors.hpp"

namespace langmix {

// Unbiased draw from [0, n) by rejecting the truncated tail of the 64-bit
// range.
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw InternalError("bounded_uniform with empty range");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t raw = rng();
    if (raw >= threshold) return raw % n;
  }
}

// Floyd's algorithm: k distinct indices from [0, n), uniform over subsets,
// using exactly k draws from the generator.
inline std::vector<std::uint64_t> sample_without_replacement(
    std::mt19937_64& rng, std::uint64_t n, std::uint64_t k) {
  if (k > n) {
    throw InternalError("cannot sample " + std::to_string(k) +
                        " distinct items from " + std::to_string(n));
  }
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> picks;
  picks.reserve(static_cast<std::size_t>(k));
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = bounded_uniform(rng, j + 1);
    if (seen.insert(t).second) {
      picks.push_back(t);
    } else {
      seen.insert(j);
      picks.push_back(j);
    }
  }
  return picks;
}

}  // namespace langmix
