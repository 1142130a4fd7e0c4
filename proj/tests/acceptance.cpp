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

// Release-gate checks for the selection and mixing pipeline. Each check
// prints exactly one PASS or FAIL line; the process exits nonzero when any
// check fails. These intentionally re-derive expectations with independent
// code paths (bitmask oracles, recounts, a second CLI run) instead of
// trusting the library's own arithmetic.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "langmix/combinations.hpp"
#include "langmix/io.hpp"
#include "langmix/mixer.hpp"
#include "langmix/registry.hpp"
#include "langmix/selection.hpp"
#include "langmix/vectors.hpp"
#include "langmix/vocab.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

namespace {

using langmix::Combo;

const char* kDataDir = LANGMIX_DATA_DIR;
const char* kCliPath = LANGMIX_CLI_PATH;

const std::vector<std::string> kPool = {"ar", "de", "en", "es",
                                        "fr", "ru", "zh"};

std::string data(const std::string& name) {
  return std::string(kDataDir) + "/" + name;
}

struct Gate {
  int failures = 0;

  void report(const std::string& label, bool ok, const std::string& detail) {
    if (ok) {
      std::cout << "PASS: " << label << "\n";
    } else {
      ++failures;
      std::cout << "FAIL: " << label
                << (detail.empty() ? "" : " [" + detail + "]") << "\n";
    }
  }
};

// 01: candidate enumeration counts and speed.
void check_enumeration(Gate& gate) {
  std::string detail;
  bool ok = true;
  // Warm-up touches the code path once so the timed run measures the
  // algorithm, not first-call page faults.
  (void)langmix::enumerate_combinations(kPool, 3);
  const auto start = std::chrono::steady_clock::now();
  const auto all = langmix::enumerate_combinations(kPool, 3);
  const auto pinned = langmix::enumerate_combinations(kPool, 3, {"en"});
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  if (all.size() != 35) {
    ok = false;
    detail = "got " + std::to_string(all.size()) + " triples";
  } else if (pinned.size() != 15) {
    ok = false;
    detail = "got " + std::to_string(pinned.size()) + " pinned triples";
  } else if (ms >= 1.0) {
    ok = false;
    detail = "took " + std::to_string(ms) + " ms";
  }
  gate.report(
      "01 enumeration: 35 triples from a 7-language pool, 15 with en "
      "pinned, in under 1 ms",
      ok, detail);
}

// 02: largest-pretraining-data selection on both registry fixtures.
void check_size_fixtures(Gate& gate) {
  std::string detail;
  bool ok = true;
  try {
    const Combo xlmr =
        langmix::select_pretrain_size(
            kPool, 3, langmix::load_registry(data("registry.xlmr.tsv")))
            .combo;
    const Combo bloom =
        langmix::select_pretrain_size(
            kPool, 3, langmix::load_registry(data("registry.bloom.tsv")))
            .combo;
    if (xlmr != Combo{"de", "en", "ru"}) {
      ok = false;
      detail = "xlmr fixture picked " + langmix::combo_key(xlmr);
    } else if (bloom != Combo{"en", "fr", "zh"}) {
      ok = false;
      detail = "bloom fixture picked " + langmix::combo_key(bloom);
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  gate.report(
      "02 size criterion picks de+en+ru on the xlmr registry and en+fr+zh "
      "on the bloom registry",
      ok, detail);
}

// 03: equal-budget allocation, exact example plus a property sweep.
void check_budget(Gate& gate) {
  std::string detail;
  bool ok = true;
  const langmix::Allocation even = langmix::allocate_budget(1000, {"en", "es"});
  if (even.per_lang.at("en") != 500 || even.per_lang.at("es") != 500) {
    ok = false;
    detail = "1000 over en+es split " + std::to_string(even.per_lang.at("en")) +
             "/" + std::to_string(even.per_lang.at("es"));
  }
  std::mt19937_64 rng(2026);
  for (int trial = 0; ok && trial < 500; ++trial) {
    const std::size_t k = 1 + rng() % 10;
    const std::uint64_t total = rng() % 1000001;
    Combo combo;
    for (std::size_t i = 0; i < k; ++i) combo.push_back("l" + std::to_string(i));
    const langmix::Allocation a = langmix::allocate_budget(total, combo);
    std::uint64_t sum = 0, lo = UINT64_MAX, hi = 0;
    for (const auto& [code, n] : a.per_lang) {
      sum += n;
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    if (sum != total || hi - lo > 1) {
      ok = false;
      detail = "trial " + std::to_string(trial) + ": total " +
               std::to_string(total) + " over " + std::to_string(k) +
               " gave sum " + std::to_string(sum) + ", spread " +
               std::to_string(hi - lo);
    }
  }
  gate.report(
      "03 equal budget: 1000 over en+es is 500/500; 500 random allocations "
      "sum exactly with spread at most 1",
      ok, detail);
}

// 04 and 05 share the randomized instances, so one pass computes both.
struct OracleOutcome {
  bool equivalent = true;
  int greedy_violations = 0;
  int instances = 0;
  double seconds = 0.0;
  std::string detail;
};

OracleOutcome run_oracle_comparison() {
  OracleOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint32_t seed = 0; seed < 200; ++seed) {
    const testutil::DiversityInstance div =
        testutil::make_diversity_instance(seed);
    ++outcome.instances;
    const langmix::SelectionResult exact_max =
        langmix::select_diversity(div.pool, div.k, div.store);
    const langmix::SelectionResult exact_min = langmix::select_diversity(
        div.pool, div.k, div.store, {}, langmix::Mode::min);
    const oracle::Scored want_max = oracle::best_subset(
        div.pool, div.k, {}, true,
        [&div](const Combo& c) { return oracle::diversity(c, div.raw); });
    const oracle::Scored want_min = oracle::best_subset(
        div.pool, div.k, {}, false,
        [&div](const Combo& c) { return oracle::diversity(c, div.raw); });
    if (exact_max.combo != want_max.combo ||
        exact_max.objective != want_max.objective ||
        exact_min.combo != want_min.combo ||
        exact_min.objective != want_min.objective) {
      outcome.equivalent = false;
      outcome.detail = "diversity seed " + std::to_string(seed);
    }
    const langmix::SelectionResult greedy =
        langmix::greedy_diversity(div.pool, div.k, div.store);
    if (greedy.objective > exact_max.objective) {
      ++outcome.greedy_violations;
    }

    const testutil::CoverageInstance cov =
        testutil::make_coverage_instance(seed);
    const langmix::SelectionResult mine =
        langmix::select_coverage(cov.pool, cov.k, cov.vocabs);
    const oracle::Scored want = oracle::best_subset(
        cov.pool, cov.k, {}, true,
        [&cov](const Combo& c) { return oracle::coverage(c, cov.raw); });
    if (mine.combo != want.combo || mine.objective != want.objective) {
      outcome.equivalent = false;
      outcome.detail = "coverage seed " + std::to_string(seed);
    }
  }
  outcome.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return outcome;
}

void check_oracle_equivalence(Gate& gate, const OracleOutcome& outcome) {
  bool ok = outcome.equivalent && outcome.instances >= 200;
  std::string detail = outcome.detail;
  if (ok && outcome.seconds >= 10.0) {
    ok = false;
    detail = "took " + std::to_string(outcome.seconds) + " s";
  }
  gate.report(
      "04 exhaustive diversity (max and min) and coverage match a "
      "brute-force oracle, ties included, on 200 randomized instances in "
      "under 10 s",
      ok, detail);
}

void check_greedy_bound(Gate& gate, const OracleOutcome& outcome) {
  gate.report(
      "05 greedy diversity never exceeds the exhaustive optimum (0 "
      "violations on 200 instances)",
      outcome.greedy_violations == 0,
      std::to_string(outcome.greedy_violations) + " violations");
}

// 06: cosine symmetry, scaling invariance of the winner, and the rule that
// dimensions missing from both vectors act as if deleted.
void check_cosine_properties(Gate& gate) {
  bool ok = true;
  std::string detail;

  for (std::uint32_t seed = 0; ok && seed < 100; ++seed) {
    const testutil::DiversityInstance inst =
        testutil::make_diversity_instance(seed);
    const langmix::LanguageVector& a = inst.store.at(inst.pool[0]);
    const langmix::LanguageVector& b = inst.store.at(inst.pool[1]);
    if (langmix::cosine_similarity(a, b) != langmix::cosine_similarity(b, a)) {
      ok = false;
      detail = "symmetry broke at seed " + std::to_string(seed);
    }
  }

  for (std::uint32_t seed = 0; ok && seed < 100; ++seed) {
    // Multiples of 3 give the continuous-valued instance kind.
    const testutil::DiversityInstance inst =
        testutil::make_diversity_instance(seed * 3);
    langmix::VectorStore scaled(langmix::VectorClass::syntax,
                                inst.store.dim_names());
    for (const std::string& code : inst.pool) {
      langmix::LanguageVector v = inst.store.at(code);
      for (auto& x : v.values) {
        if (x.has_value()) *x *= 2.5;
      }
      scaled.insert(std::move(v));
    }
    const Combo base =
        langmix::select_diversity(inst.pool, inst.k, inst.store).combo;
    const Combo after =
        langmix::select_diversity(inst.pool, inst.k, scaled).combo;
    if (base != after) {
      ok = false;
      detail = "scaling changed the winner at seed " + std::to_string(seed) +
               ": " + langmix::combo_key(base) + " vs " +
               langmix::combo_key(after);
    }
  }

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> value(0.1, 1.0);
  for (int trial = 0; ok && trial < 100; ++trial) {
    // Six dimensions; dims 2 and 4 are missing from both vectors. The
    // deleted variant drops those dimensions entirely.
    const std::set<std::size_t> both_missing = {2, 4};
    langmix::LanguageVector full_a, full_b, cut_a, cut_b;
    full_a.lang = cut_a.lang = "xa";
    full_b.lang = cut_b.lang = "xb";
    full_a.vclass = full_b.vclass = cut_a.vclass = cut_b.vclass =
        langmix::VectorClass::syntax;
    for (std::size_t d = 0; d < 6; ++d) {
      const std::string dim = "d" + std::to_string(d);
      full_a.dim_names.push_back(dim);
      full_b.dim_names.push_back(dim);
      if (both_missing.count(d) != 0) {
        full_a.values.emplace_back(std::nullopt);
        full_b.values.emplace_back(std::nullopt);
        continue;
      }
      const double va = value(rng);
      const double vb = value(rng);
      full_a.values.emplace_back(va);
      full_b.values.emplace_back(vb);
      cut_a.dim_names.push_back(dim);
      cut_b.dim_names.push_back(dim);
      cut_a.values.emplace_back(va);
      cut_b.values.emplace_back(vb);
    }
    if (langmix::cosine_similarity(full_a, full_b) !=
        langmix::cosine_similarity(cut_a, cut_b)) {
      ok = false;
      detail = "shared-missing dims differ from deletion at trial " +
               std::to_string(trial);
    }
  }

  gate.report(
      "06 cosine similarity is symmetric bit-for-bit, selections survive "
      "scaling every vector by 2.5 on 100 pools, and dimensions missing "
      "from both vectors behave as deleted",
      ok, detail);
}

// 07: coverage grows monotonically and hits its exact endpoints.
void check_coverage_properties(Gate& gate) {
  bool ok = true;
  std::string detail;
  for (std::uint32_t seed = 0; ok && seed < 500; ++seed) {
    const testutil::CoverageInstance inst =
        testutil::make_coverage_instance(seed);
    if (langmix::coverage({}, inst.vocabs) != 0.0) {
      ok = false;
      detail = "empty combo nonzero at seed " + std::to_string(seed);
      break;
    }
    std::vector<std::string> order = inst.pool;
    std::mt19937 shuffle_rng(seed);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    Combo combo;
    double previous = 0.0;
    for (const std::string& code : order) {
      combo.push_back(code);
      const double grown = langmix::coverage(combo, inst.vocabs);
      if (grown < previous) {
        ok = false;
        detail = "coverage shrank at seed " + std::to_string(seed);
        break;
      }
      previous = grown;
    }
    if (ok && previous != 1.0) {
      ok = false;
      detail = "full pool below 1 at seed " + std::to_string(seed);
    }
  }
  gate.report(
      "07 coverage is monotone under combination growth on 500 instances "
      "and is exactly 0 for the empty set, 1 for the full pool",
      ok, detail);
}

// 08: distinct-script taxonomy against an independent recount.
void check_script_taxonomy(Gate& gate) {
  bool ok = true;
  std::string detail;
  try {
    const langmix::Registry registry =
        langmix::load_registry(data("registry.xlmr.tsv"));
    std::map<int, int> counted;
    std::map<int, int> recounted;
    for (const Combo& combo : langmix::enumerate_combinations(kPool, 3)) {
      const langmix::ScriptCase sc = langmix::script_case(combo, registry);
      if (!sc.case_id.has_value() || *sc.case_id != sc.distinct_scripts) {
        ok = false;
        detail = "triple " + langmix::combo_key(combo) + " missing its case";
      }
      counted[sc.distinct_scripts] += 1;
      // Recount with sort+unique instead of a set.
      std::vector<std::string> scripts;
      for (const std::string& code : combo) {
        scripts.push_back(registry.at(code).script);
      }
      std::sort(scripts.begin(), scripts.end());
      recounted[static_cast<int>(
          std::unique(scripts.begin(), scripts.end()) - scripts.begin())] += 1;
    }
    int total = 0;
    for (const auto& [distinct, n] : counted) total += n;
    if (ok && (counted != recounted || total != 35)) {
      ok = false;
      detail = "partition mismatch";
    }
    const auto case_of = [&registry](const Combo& combo) {
      return *langmix::script_case(combo, registry).case_id;
    };
    if (ok && (case_of({"de", "en", "es"}) != 1 ||
               case_of({"de", "en", "zh"}) != 2 ||
               case_of({"ar", "de", "zh"}) != 3)) {
      ok = false;
      detail = "reference triples misclassified";
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  gate.report(
      "08 script taxonomy: all 35 triples partition by distinct-script "
      "count, matching an independent recount, with de+en+es=1, "
      "de+en+zh=2, ar+de+zh=3",
      ok, detail);
}

// 09: ranking a fully scored table.
void check_ranking(Gate& gate) {
  bool ok = true;
  std::string detail;
  try {
    const langmix::ScoreTable table =
        langmix::load_score_table(data("scores/demo_scores.json"));
    if (table.scores.size() != 35) {
      ok = false;
      detail = "table has " + std::to_string(table.scores.size()) + " rows";
    }
    std::set<int> ranks;
    std::string best_key, worst_key;
    double best = 0.0, worst = 0.0;
    for (const auto& [key, score] : table.scores) {
      ranks.insert(
          langmix::rank_selection(langmix::combo_from_key(key), table));
      if (best_key.empty() || score > best) {
        best_key = key;
        best = score;
      }
      if (worst_key.empty() || score < worst) {
        worst_key = key;
        worst = score;
      }
    }
    if (ok && (ranks.size() != 35 || *ranks.begin() != 1 ||
               *ranks.rbegin() != 35)) {
      ok = false;
      detail = "ranks are not a permutation of 1..35";
    }
    if (ok &&
        langmix::rank_selection(langmix::combo_from_key(best_key), table) !=
            1) {
      ok = false;
      detail = "top scorer not at rank 1";
    }
    if (ok &&
        langmix::rank_selection(langmix::combo_from_key(worst_key), table) !=
            35) {
      ok = false;
      detail = "bottom scorer not at rank 35";
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  gate.report(
      "09 ranking the 35-entry score table yields a permutation of 1..35 "
      "with the best combination at rank 1 and the worst at rank 35",
      ok, detail);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 10: the mix command replays byte-for-byte.
void check_mix_determinism(Gate& gate) {
  bool ok = true;
  std::string detail;
  testutil::TempDir tmp;
  const auto run_once = [&](const std::string& output) {
    const std::string cmd =
        std::string("'") + kCliPath + "' mix --criterion diversity_max" +
        " --vectors " + data("vectors/syntax.json") +
        " --pool ar,de,en,es,fr,ru,zh -k 3 --total 900 --seed 17" +
        " --datasets " + data("datasets.json") + " --output " + output +
        " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  const auto first = tmp.file("first.json");
  const auto second = tmp.file("second.json");
  if (!run_once(first.string()) || !run_once(second.string())) {
    ok = false;
    detail = "mix run failed";
  } else {
    const std::string a = read_file(first);
    const std::string b = read_file(second);
    if (a.empty() || a != b) {
      ok = false;
      detail = "manifests differ between runs";
    } else {
      const langmix::json doc = langmix::json::parse(a);
      if (!doc.contains("sha256") ||
          doc["sha256"] != langmix::json::parse(b)["sha256"]) {
        ok = false;
        detail = "checksums differ";
      }
    }
  }
  gate.report(
      "10 rerunning mix with the same config and seed reproduces the "
      "manifest byte-for-byte with equal checksums",
      ok, detail);
}

}  // namespace

int main() {
  Gate gate;
  try {
    check_enumeration(gate);
    check_size_fixtures(gate);
    check_budget(gate);
    const OracleOutcome outcome = run_oracle_comparison();
    check_oracle_equivalence(gate, outcome);
    check_greedy_bound(gate, outcome);
    check_cosine_properties(gate);
    check_coverage_properties(gate);
    check_script_taxonomy(gate);
    check_ranking(gate);
    check_mix_determinism(gate);
  } catch (const std::exception& e) {
    std::cout << "FAIL: acceptance run aborted [" << e.what() << "]\n";
    return 1;
  }
  std::cout << (gate.failures == 0 ? "all checks passed"
                                   : std::to_string(gate.failures) +
                                         " check(s) failed")
            << "\n";
  return gate.failures == 0 ? 0 : 1;
}
