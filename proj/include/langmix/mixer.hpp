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

// Equal-budget data mixing. A total record budget is split across the
// selected combination, then record indices are sampled per language
// without replacement from a seeded generator, producing a manifest that
// replays byte-for-byte from (datasets, allocation, seed).

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "langmix/combinations.hpp"
#include "langmix/digest.hpp"
#include "langmix/errors.hpp"
#include "langmix/io.hpp"
#include "langmix/sampling.hpp"
#include "langmix/selection.hpp"

namespace langmix {

struct Allocation {
  Combo combo;
  std::uint64_t total = 0;
  std::map<std::string, std::uint64_t> per_lang;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

// floor(total / k) per language; the remainder goes one record each to the
// lexicographically first members.
inline Allocation allocate_budget(std::uint64_t total, const Combo& combo) {
  if (combo.empty()) {
    throw ConfigError("cannot allocate a budget to an empty combination");
  }
  Combo sorted = combo;
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw DataError("duplicate language \"" + *dup + "\" in combination");
  }
  Allocation allocation;
  allocation.combo = std::move(sorted);
  allocation.total = total;
  const std::uint64_t k = allocation.combo.size();
  const std::uint64_t base = total / k;
  const std::uint64_t remainder = total % k;
  for (std::uint64_t i = 0; i < k; ++i) {
    allocation.per_lang[allocation.combo[i]] = base + (i < remainder ? 1 : 0);
  }
  return allocation;
}

struct DatasetInfo {
  std::string id;
  std::uint64_t count = 0;

  friend bool operator==(const DatasetInfo&, const DatasetInfo&) = default;
};

// Descriptor file: { "<code>": { "id": "<dataset name>", "count": N } }.
inline std::map<std::string, DatasetInfo> load_datasets(
    const std::string& path) {
  const json doc = load_json_file(path);
  if (!doc.is_object()) {
    throw DataError(path + ": dataset descriptor must be a JSON object");
  }
  std::map<std::string, DatasetInfo> datasets;
  for (const auto& [code, value] : doc.items()) {
    if (!value.is_object() || !value.contains("id") ||
        !value["id"].is_string() || !value.contains("count") ||
        !value["count"].is_number_unsigned()) {
      throw DataError(path + ": entry for \"" + code +
                      "\" needs a string \"id\" and a nonnegative integer "
                      "\"count\"");
    }
    datasets.emplace(code, DatasetInfo{value["id"].get<std::string>(),
                                       value["count"].get<std::uint64_t>()});
  }
  return datasets;
}

struct ManifestEntry {
  std::string lang;
  std::string dataset;
  std::uint64_t index = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct MixManifest {
  Allocation allocation;
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
  std::string checksum;

  friend bool operator==(const MixManifest&, const MixManifest&) = default;
};

namespace detail {

// The checksum input: one "lang\tdataset\tindex\n" line per entry, in
// manifest order. Any reimplementation that verifies checksums must build
// exactly this byte string.
inline std::string serialize_entries(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const ManifestEntry& entry : entries) {
    out += entry.lang;
    out += '\t';
    out += entry.dataset;
    out += '\t';
    out += std::to_string(entry.index);
    out += '\n';
  }
  return out;
}

}  // namespace detail

// Samples per_lang[code] distinct record indices for each combo member.
// One mt19937_64 stream seeded once drives the languages in combo order,
// so the whole manifest is a pure function of (datasets, allocation, seed).
inline MixManifest build_manifest(
    const std::map<std::string, DatasetInfo>& datasets,
    const Allocation& allocation, std::uint64_t seed) {
  for (const std::string& code : allocation.combo) {
    const auto it = datasets.find(code);
    if (it == datasets.end()) {
      throw DataError("no dataset registered for language \"" + code + "\"");
    }
    const std::uint64_t wanted = allocation.per_lang.at(code);
    if (it->second.count < wanted) {
      throw DataError("language \"" + code + "\": allocation needs " +
                      std::to_string(wanted) + " records but dataset \"" +
                      it->second.id + "\" has " +
                      std::to_string(it->second.count) + " (shortfall " +
                      std::to_string(wanted - it->second.count) + ")");
    }
  }

  MixManifest manifest;
  manifest.allocation = allocation;
  manifest.seed = seed;
  std::mt19937_64 rng(seed);
  for (const std::string& code : allocation.combo) {
    const DatasetInfo& info = datasets.at(code);
    const std::vector<std::uint64_t> picks = sample_without_replacement(
        rng, info.count, allocation.per_lang.at(code));
    for (const std::uint64_t index : picks) {
      manifest.entries.push_back(ManifestEntry{code, info.id, index});
    }
  }
  manifest.checksum = sha256_hex(detail::serialize_entries(manifest.entries));
  return manifest;
}

inline json allocation_to_json(const Allocation& allocation) {
  return json{{"combo", allocation.combo},
              {"total", allocation.total},
              {"per_lang", allocation.per_lang}};
}

inline json manifest_to_json(const MixManifest& manifest) {
  json entries = json::array();
  for (const ManifestEntry& entry : manifest.entries) {
    entries.push_back(json{{"lang", entry.lang},
                           {"dataset", entry.dataset},
                           {"index", entry.index}});
  }
  return json{{"allocation", allocation_to_json(manifest.allocation)},
              {"seed", manifest.seed},
              {"generator", "mt19937_64/floyd"},
              {"entries", std::move(entries)},
              {"sha256", manifest.checksum}};
}

// One sweep step. A failed step records the stage that threw and the error
// text; later steps still run.
struct SweepItem {
  std::size_t size = 0;
  std::optional<SelectionResult> selection;
  std::optional<MixManifest> manifest;
  std::string stage;
  std::string error;

  bool ok() const { return error.empty(); }
};

// Runs the configured selection at each requested combination size and
// builds the equal-budget manifest for the winner. The size-1 case is the
// single-source baseline.
inline std::vector<SweepItem> sweep_group_sizes(
    const std::vector<std::string>& pool, const std::vector<std::size_t>& sizes,
    std::uint64_t total,
    const std::function<SelectionResult(std::size_t)>& selector,
    const std::map<std::string, DatasetInfo>& datasets, std::uint64_t seed) {
  std::vector<SweepItem> items;
  items.reserve(sizes.size());
  for (const std::size_t size : sizes) {
    SweepItem item;
    item.size = size;
    try {
      if (size < 1 || size > pool.size()) {
        item.stage = "select";
        throw ConfigError("size " + std::to_string(size) +
                          " outside [1, " + std::to_string(pool.size()) + "]");
      }
      item.stage = "select";
      item.selection = selector(size);
      item.stage = "allocate";
      const Allocation allocation = allocate_budget(total, item.selection->combo);
      item.stage = "sample";
      item.manifest = build_manifest(datasets, allocation, seed);
      item.stage.clear();
    } catch (const Error& e) {
      item.error = e.what();
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace langmix
