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

// k-subset enumeration over a language pool, with pinned members and the
// exact-enumeration guardrail. Combinations are sorted code lists; the
// canonical key is the "+"-joined sorted form (e.g. "ar+de+zh").

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "langmix/errors.hpp"

namespace langmix {

// A combination: lexicographically sorted, duplicate-free language codes.
using Combo = std::vector<std::string>;

inline std::string combo_key(const Combo& combo) {
  std::string key;
  for (std::size_t i = 0; i < combo.size(); ++i) {
    if (i > 0) key += '+';
    key += combo[i];
  }
  return key;
}

inline Combo combo_from_key(const std::string& key) {
  Combo combo;
  std::size_t start = 0;
  while (start <= key.size()) {
    const std::size_t plus = key.find('+', start);
    const std::string code = plus == std::string::npos
                                 ? key.substr(start)
                                 : key.substr(start, plus - start);
    if (code.empty()) {
      throw DataError("malformed combination key \"" + key + "\"");
    }
    combo.push_back(code);
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  for (std::size_t i = 1; i < combo.size(); ++i) {
    if (!(combo[i - 1] < combo[i])) {
      throw DataError("combination key \"" + key +
                      "\" is not sorted and duplicate-free");
    }
  }
  return combo;
}

// Exhaustive enumeration refuses to run past this many candidates; larger
// pools must opt into the greedy heuristic explicitly.
inline constexpr std::uint64_t kMaxExactCandidates = 200000;

// C(n, k), saturating at cap + 1 to keep the guardrail overflow-free.
inline std::uint64_t count_combinations(std::uint64_t n, std::uint64_t k,
                                        std::uint64_t cap) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is integral at each step.
    const std::uint64_t num = n - k + i;
    if (result > (cap + 1) / num * i) {
      return cap + 1;
    }
    result = result * num / i;
    if (result > cap) return cap + 1;
  }
  return result;
}

namespace detail {

inline std::vector<std::string> sorted_unique_pool(
    std::vector<std::string> pool) {
  std::sort(pool.begin(), pool.end());
  const auto dup = std::adjacent_find(pool.begin(), pool.end());
  if (dup != pool.end()) {
    throw DataError("duplicate pool entry \"" + *dup + "\"");
  }
  return pool;
}

}  // namespace detail

// All k-subsets of pool that contain every pin, each sorted, the whole list
// sorted lexicographically.
inline std::vector<Combo> enumerate_combinations(
    const std::vector<std::string>& pool, std::size_t k,
    const std::set<std::string>& pins = {}) {
  const std::vector<std::string> sorted_pool =
      detail::sorted_unique_pool(pool);
  for (const std::string& pin : pins) {
    if (!std::binary_search(sorted_pool.begin(), sorted_pool.end(), pin)) {
      throw ConfigError("pinned language \"" + pin + "\" is not in the pool");
    }
  }
  if (k < pins.size() || k > sorted_pool.size()) {
    throw ConfigError("k=" + std::to_string(k) + " out of range for pool of " +
                      std::to_string(sorted_pool.size()) + " with " +
                      std::to_string(pins.size()) + " pin(s)");
  }

  std::vector<std::string> rest;
  for (const std::string& code : sorted_pool) {
    if (pins.count(code) == 0) rest.push_back(code);
  }
  const std::size_t m = k - pins.size();
  const std::uint64_t candidates =
      count_combinations(rest.size(), m, kMaxExactCandidates);
  if (candidates > kMaxExactCandidates) {
    throw ConfigError(
        "candidate space exceeds the exact-enumeration limit of " +
        std::to_string(kMaxExactCandidates) +
        " combinations; use the greedy_diversity criterion");
  }

  std::vector<Combo> out;
  out.reserve(static_cast<std::size_t>(candidates));
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  const Combo pin_list(pins.begin(), pins.end());
  while (true) {
    Combo combo = pin_list;
    for (const std::size_t i : idx) combo.push_back(rest[i]);
    std::sort(combo.begin(), combo.end());
    out.push_back(std::move(combo));
    if (m == 0) break;
    // Next index combination in lexicographic order.
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (idx[pos] != pos + rest.size() - m) break;
      if (pos == 0) {
        pos = m;  // exhausted
        break;
      }
    }
    if (pos == m) break;
    ++idx[pos];
    for (std::size_t i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace langmix
