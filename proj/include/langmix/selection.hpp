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

// Source-language combination selection. Every criterion scores candidate
// combinations and picks the optimum, breaking ties by the lexicographically
// smallest canonical key so results are reproducible across runs and
// evaluation orders.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "langmix/combinations.hpp"
#include "langmix/errors.hpp"
#include "langmix/io.hpp"
#include "langmix/registry.hpp"
#include "langmix/vectors.hpp"
#include "langmix/vocab.hpp"

namespace langmix {

enum class Criterion {
  pretrain_size,
  vocab_coverage,
  diversity_max,
  diversity_min,
  greedy_diversity,
};

inline std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::pretrain_size:
      return "pretrain_size";
    case Criterion::vocab_coverage:
      return "vocab_coverage";
    case Criterion::diversity_max:
      return "diversity_max";
    case Criterion::diversity_min:
      return "diversity_min";
    case Criterion::greedy_diversity:
      return "greedy_diversity";
  }
  throw InternalError("unhandled criterion");
}

inline Criterion criterion_from_string(const std::string& name) {
  if (name == "pretrain_size") return Criterion::pretrain_size;
  if (name == "vocab_coverage") return Criterion::vocab_coverage;
  if (name == "diversity_max") return Criterion::diversity_max;
  if (name == "diversity_min") return Criterion::diversity_min;
  if (name == "greedy_diversity") return Criterion::greedy_diversity;
  throw ConfigError("unknown criterion \"" + name + "\"");
}

enum class Mode { max, min };

struct TraceEntry {
  Combo combo;
  double objective = 0.0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct SelectionResult {
  Criterion criterion = Criterion::diversity_max;
  std::optional<VectorClass> vclass;
  Combo combo;
  double objective = 0.0;
  // Every evaluated candidate, best first; ties ordered by canonical key.
  std::vector<TraceEntry> trace;
};

struct ScoreTable {
  std::string task;
  std::map<std::string, double> scores;
};

// Sum over unordered pairs of (1 - cosine similarity). Combos with fewer
// than two members have no pairs and score 0. The combo is canonicalized
// (sorted) first and pairs are accumulated left to right, so the value is
// bit-identical no matter how the caller ordered the codes.
inline double diversity_score(const Combo& combo, const VectorStore& store) {
  Combo sorted = combo;
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw DataError("duplicate language \"" + *dup + "\" in combination");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      total += 1.0 - cosine_similarity(store.at(sorted[i]), store.at(sorted[j]));
    }
  }
  return total;
}

namespace detail {

[[noreturn]] inline void rethrow_with_combo(const Error& e,
                                            const std::string& key) {
  const std::string msg =
      "while scoring combination \"" + key + "\": " + e.what();
  switch (e.category()) {
    case ErrorCategory::config:
      throw ConfigError(msg);
    case ErrorCategory::data:
      throw DataError(msg);
    case ErrorCategory::internal:
      break;
  }
  throw InternalError(msg);
}

inline void sort_trace_best_first(std::vector<TraceEntry>& trace, Mode mode) {
  std::sort(trace.begin(), trace.end(),
            [mode](const TraceEntry& a, const TraceEntry& b) {
              if (a.objective != b.objective) {
                return mode == Mode::max ? a.objective > b.objective
                                         : a.objective < b.objective;
              }
              return a.combo < b.combo;
            });
}

// Scores every enumerated candidate in canonical key order and keeps the
// strict optimum, so equal objectives resolve to the smallest key.
template <typename ScoreFn>
SelectionResult select_exhaustive(Criterion criterion,
                                  std::optional<VectorClass> vclass,
                                  const std::vector<std::string>& pool,
                                  std::size_t k,
                                  const std::set<std::string>& pins, Mode mode,
                                  ScoreFn&& score) {
  const std::vector<Combo> candidates = enumerate_combinations(pool, k, pins);
  SelectionResult result;
  result.criterion = criterion;
  result.vclass = vclass;
  result.trace.reserve(candidates.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double objective = 0.0;
    try {
      objective = score(candidates[i]);
    } catch (const Error& e) {
      rethrow_with_combo(e, combo_key(candidates[i]));
    }
    result.trace.push_back(TraceEntry{candidates[i], objective});
    if (i > 0) {
      const bool better = mode == Mode::max
                              ? objective > result.trace[best].objective
                              : objective < result.trace[best].objective;
      if (better) best = i;
    }
  }
  result.combo = result.trace[best].combo;
  result.objective = result.trace[best].objective;
  sort_trace_best_first(result.trace, mode);
  if (result.trace.front().combo != result.combo) {
    throw InternalError("trace ordering disagrees with the selected optimum");
  }
  return result;
}

inline void require_vectors(const std::vector<std::string>& pool,
                            const VectorStore& store) {
  for (const std::string& code : pool) {
    if (!store.contains(code)) {
      throw DataError("no vector stored for language \"" + code + "\"");
    }
  }
}

}  // namespace detail

inline SelectionResult select_diversity(const std::vector<std::string>& pool,
                                        std::size_t k, const VectorStore& store,
                                        const std::set<std::string>& pins = {},
                                        Mode mode = Mode::max) {
  detail::require_vectors(pool, store);
  return detail::select_exhaustive(
      mode == Mode::max ? Criterion::diversity_max : Criterion::diversity_min,
      store.vclass(), pool, k, pins, mode,
      [&store](const Combo& combo) { return diversity_score(combo, store); });
}

inline SelectionResult select_coverage(
    const std::vector<std::string>& pool, std::size_t k,
    const std::map<std::string, VocabSet>& vocabs,
    const std::set<std::string>& pins = {}) {
  for (const std::string& code : pool) {
    if (vocabs.find(code) == vocabs.end()) {
      throw DataError("no vocabulary loaded for language \"" + code + "\"");
    }
  }
  return detail::select_exhaustive(
      Criterion::vocab_coverage, std::nullopt, pool, k, pins, Mode::max,
      [&vocabs](const Combo& combo) { return coverage(combo, vocabs); });
}

inline SelectionResult select_pretrain_size(
    const std::vector<std::string>& pool, std::size_t k,
    const Registry& registry, const std::set<std::string>& pins = {}) {
  for (const std::string& code : pool) {
    registry.at(code);
  }
  return detail::select_exhaustive(
      Criterion::pretrain_size, std::nullopt, pool, k, pins, Mode::max,
      [&registry](const Combo& combo) {
        double total = 0.0;
        for (const std::string& code : combo) {
          total += registry.at(code).pretrain_size;
        }
        return total;
      });
}

// Greedy alternative to exhaustive diversity selection for pools where
// C(n, k) enumeration is off the table. Seeds with the pins when given,
// otherwise with the least-similar pair (or the first singleton for k = 1),
// then grows one language at a time.
inline SelectionResult greedy_diversity(const std::vector<std::string>& pool,
                                        std::size_t k, const VectorStore& store,
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
  detail::require_vectors(sorted_pool, store);

  SelectionResult result;
  result.criterion = Criterion::greedy_diversity;
  result.vclass = store.vclass();

  const auto score = [&store](const Combo& combo) {
    try {
      return diversity_score(combo, store);
    } catch (const Error& e) {
      detail::rethrow_with_combo(e, combo_key(combo));
    }
  };
  const auto evaluate = [&](const Combo& combo) {
    const double objective = score(combo);
    result.trace.push_back(TraceEntry{combo, objective});
    return objective;
  };

  Combo current(pins.begin(), pins.end());
  double current_objective = 0.0;
  if (!current.empty() || k == 0) {
    current_objective = evaluate(current);
  } else if (k == 1) {
    // No seed; the growth step below evaluates every singleton and keeps
    // the first of the all-zero tie.
  } else {
    bool seeded = false;
    for (std::size_t i = 0; i < sorted_pool.size(); ++i) {
      for (std::size_t j = i + 1; j < sorted_pool.size(); ++j) {
        const Combo pair = {sorted_pool[i], sorted_pool[j]};
        const double objective = evaluate(pair);
        if (!seeded || objective > current_objective) {
          current = pair;
          current_objective = objective;
          seeded = true;
        }
      }
    }
  }

  while (current.size() < k) {
    Combo best;
    double best_objective = 0.0;
    bool found = false;
    for (const std::string& code : sorted_pool) {
      if (std::binary_search(current.begin(), current.end(), code)) continue;
      Combo candidate = current;
      candidate.insert(
          std::lower_bound(candidate.begin(), candidate.end(), code), code);
      const double objective = evaluate(candidate);
      if (!found || objective > best_objective) {
        best = std::move(candidate);
        best_objective = objective;
        found = true;
      }
    }
    current = std::move(best);
    current_objective = best_objective;
  }

  result.combo = current;
  result.objective = current_objective;
  detail::sort_trace_best_first(result.trace, Mode::max);
  return result;
}

inline ScoreTable load_score_table(const std::string& path) {
  const json doc = load_json_file(path);
  if (!doc.is_object()) {
    throw DataError(path + ": score table must be a JSON object");
  }
  if (!doc.contains("task") || !doc["task"].is_string()) {
    throw DataError(path + ": score table needs a string \"task\" field");
  }
  if (!doc.contains("scores") || !doc["scores"].is_object()) {
    throw DataError(path + ": score table needs a \"scores\" object");
  }
  ScoreTable table;
  table.task = doc["task"].get<std::string>();
  for (const auto& [key, value] : doc["scores"].items()) {
    try {
      combo_from_key(key);
    } catch (const Error& e) {
      throw DataError(path + ": " + e.what());
    }
    if (!value.is_number()) {
      throw DataError(path + ": score for \"" + key + "\" is not a number");
    }
    table.scores.emplace(key, value.get<double>());
  }
  return table;
}

// Rank 1 is the best score; ties share the top rank of their group.
inline int rank_selection(const Combo& combo, const ScoreTable& table) {
  const std::string key = combo_key(combo);
  const auto it = table.scores.find(key);
  if (it == table.scores.end()) {
    throw DataError("combination \"" + key + "\" not present in score table");
  }
  int greater = 0;
  for (const auto& [other_key, score] : table.scores) {
    if (score > it->second) ++greater;
  }
  return 1 + greater;
}

inline json trace_entry_to_json(const TraceEntry& entry) {
  return json{{"combo", entry.combo}, {"objective", entry.objective}};
}

inline json selection_result_to_json(const SelectionResult& result,
                                     bool include_trace = false) {
  json out{
      {"criterion", to_string(result.criterion)},
      {"vclass", result.vclass ? json(to_string(*result.vclass)) : json()},
      {"combo", result.combo},
      {"objective", result.objective},
  };
  if (include_trace) {
    json trace = json::array();
    for (const TraceEntry& entry : result.trace) {
      trace.push_back(trace_entry_to_json(entry));
    }
    out["trace"] = std::move(trace);
  }
  return out;
}

}  // namespace langmix
