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

// langmix command-line tool.
//
//   langmix select           pick a source-language combination
//   langmix rank             rank selections against a score table
//   langmix classify-scripts writing-system cases per combination
//   langmix mix              selection + equal-budget manifest
//   langmix sweep            manifests across combination sizes
//
// Options may come from a JSON config file (--config); explicit flags
// override file values. Every report embeds the SHA-256 of the effective
// config. Exit codes: 0 ok, 2 config error, 3 data error, 4 internal error.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "langmix/combinations.hpp"
#include "langmix/digest.hpp"
#include "langmix/errors.hpp"
#include "langmix/io.hpp"
#include "langmix/mixer.hpp"
#include "langmix/registry.hpp"
#include "langmix/selection.hpp"
#include "langmix/vectors.hpp"
#include "langmix/vocab.hpp"

namespace {

namespace fs = std::filesystem;
using langmix::json;

struct RunConfig {
  std::string command;
  std::vector<std::string> pool;
  std::uint64_t k = 3;
  std::string criterion;
  std::optional<std::string> vclass;
  std::vector<std::string> pins;
  std::optional<std::string> mode;
  std::string registry_path;
  std::string vectors_path;
  std::string embedding_dump_path;
  std::map<std::string, std::string> vocab_paths;
  std::string scores_path;
  std::vector<std::string> selection_paths;
  std::string datasets_path;
  std::optional<std::uint64_t> total;
  std::vector<std::uint64_t> sizes;
  std::uint64_t seed = 0;
  std::string output_path;
  bool tsv = false;
  bool trace = false;
};

// Raw flag values plus their CLI11 options, so the merge step can tell
// "explicitly given" from "default".
struct Flags {
  std::string config_path;
  std::vector<std::string> pool;
  std::uint64_t k = 3;
  std::string criterion;
  std::string vclass;
  std::vector<std::string> pins;
  std::string mode;
  std::string registry;
  std::string vectors;
  std::string embedding_dump;
  std::vector<std::string> vocab;
  std::string scores;
  std::vector<std::string> selections;
  std::string datasets;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> sizes;
  std::uint64_t seed = 0;
  std::string output;
  bool tsv = false;
  bool trace = false;

  std::map<std::string, CLI::Option*> opts;

  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  f.opts["config"] = cmd->add_option("--config", f.config_path,
                                     "JSON config file; flags override it");
  f.opts["pool"] = cmd->add_option("--pool", f.pool, "candidate language codes")
                       ->delimiter(',');
  f.opts["pins"] =
      cmd->add_option("--pins", f.pins, "codes forced into the combination")
          ->delimiter(',');
  f.opts["seed"] =
      cmd->add_option("--seed", f.seed,
                      "PRNG seed (fallback: LANGMIX_SEED, then 0)");
  f.opts["output"] =
      cmd->add_option("--output", f.output, "report destination path");
  f.opts["tsv"] = cmd->add_flag("--tsv", f.tsv, "emit TSV instead of JSON");
}

void add_k_flag(CLI::App* cmd, Flags& f) {
  f.opts["k"] = cmd->add_option("-k,--k", f.k, "combination size (default 3)");
}

void add_selection_flags(CLI::App* cmd, Flags& f) {
  f.opts["criterion"] = cmd->add_option(
      "--criterion", f.criterion,
      "pretrain_size | vocab_coverage | diversity_max | diversity_min | "
      "greedy_diversity");
  f.opts["vclass"] = cmd->add_option(
      "--vclass", f.vclass,
      "expected vector class (syntax, phonology, inventory, family, geo, "
      "embedding)");
  f.opts["mode"] =
      cmd->add_option("--mode", f.mode, "max | min (must match criterion)");
  f.opts["registry"] =
      cmd->add_option("--registry", f.registry, "language registry TSV");
  f.opts["vectors"] =
      cmd->add_option("--vectors", f.vectors, "language vector JSON file");
  f.opts["embedding-dump"] = cmd->add_option(
      "--embedding-dump", f.embedding_dump,
      "sentence-embedding dump JSON (mean-pooled per language)");
  f.opts["vocab"] = cmd->add_option(
      "--vocab", f.vocab, "per-language vocabulary as code=path (repeatable)");
  f.opts["trace"] = cmd->add_flag(
      "--trace", f.trace, "include every evaluated candidate in the report");
}

std::uint64_t parse_uint64(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw langmix::ConfigError(what + " is not an unsigned integer: \"" +
                               text + "\"");
  }
  return value;
}

const std::set<std::string> kConfigKeys = {
    "pool",    "k",          "criterion", "vclass",  "pins",
    "mode",    "registry",   "vectors",   "embedding_dump",
    "vocab",   "scores",     "selections", "datasets", "total",
    "sizes",   "seed",       "output",    "tsv",     "trace"};

std::vector<std::string> config_string_list(const json& value,
                                            const std::string& key) {
  if (!value.is_array()) {
    throw langmix::ConfigError("config key \"" + key +
                               "\" must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw langmix::ConfigError("config key \"" + key +
                                 "\" must be an array of strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string config_string(const json& value, const std::string& key) {
  if (!value.is_string()) {
    throw langmix::ConfigError("config key \"" + key + "\" must be a string");
  }
  return value.get<std::string>();
}

std::uint64_t config_uint(const json& value, const std::string& key) {
  if (!value.is_number_unsigned() &&
      !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    throw langmix::ConfigError("config key \"" + key +
                               "\" must be a nonnegative integer");
  }
  return value.get<std::uint64_t>();
}

bool config_bool(const json& value, const std::string& key) {
  if (!value.is_boolean()) {
    throw langmix::ConfigError("config key \"" + key + "\" must be a boolean");
  }
  return value.get<bool>();
}

void apply_config_file(RunConfig& cfg, const std::string& path,
                       bool* seed_in_file) {
  if (!fs::exists(path)) {
    throw langmix::ConfigError("config file does not exist: " + path);
  }
  const json doc = langmix::load_json_file(path);
  if (!doc.is_object()) {
    throw langmix::ConfigError(path + ": config must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (kConfigKeys.find(key) == kConfigKeys.end()) {
      throw langmix::ConfigError(path + ": unknown config key \"" + key +
                                 "\"");
    }
    if (key == "pool") {
      cfg.pool = config_string_list(value, key);
    } else if (key == "k") {
      cfg.k = config_uint(value, key);
    } else if (key == "criterion") {
      cfg.criterion = config_string(value, key);
    } else if (key == "vclass") {
      cfg.vclass = config_string(value, key);
    } else if (key == "pins") {
      cfg.pins = config_string_list(value, key);
    } else if (key == "mode") {
      cfg.mode = config_string(value, key);
    } else if (key == "registry") {
      cfg.registry_path = config_string(value, key);
    } else if (key == "vectors") {
      cfg.vectors_path = config_string(value, key);
    } else if (key == "embedding_dump") {
      cfg.embedding_dump_path = config_string(value, key);
    } else if (key == "vocab") {
      if (!value.is_object()) {
        throw langmix::ConfigError(
            "config key \"vocab\" must map codes to paths");
      }
      for (const auto& [code, p] : value.items()) {
        cfg.vocab_paths[code] = config_string(p, "vocab." + code);
      }
    } else if (key == "scores") {
      cfg.scores_path = config_string(value, key);
    } else if (key == "selections") {
      cfg.selection_paths = config_string_list(value, key);
    } else if (key == "datasets") {
      cfg.datasets_path = config_string(value, key);
    } else if (key == "total") {
      cfg.total = config_uint(value, key);
    } else if (key == "sizes") {
      if (!value.is_array()) {
        throw langmix::ConfigError(
            "config key \"sizes\" must be an array of integers");
      }
      cfg.sizes.clear();
      for (const auto& item : value) {
        cfg.sizes.push_back(config_uint(item, "sizes"));
      }
    } else if (key == "seed") {
      cfg.seed = config_uint(value, key);
      *seed_in_file = true;
    } else if (key == "output") {
      cfg.output_path = config_string(value, key);
    } else if (key == "tsv") {
      cfg.tsv = config_bool(value, key);
    } else if (key == "trace") {
      cfg.trace = config_bool(value, key);
    }
  }
}

RunConfig merge_config(const std::string& command, const Flags& f) {
  RunConfig cfg;
  cfg.command = command;
  bool seed_set = false;
  if (f.given("config")) apply_config_file(cfg, f.config_path, &seed_set);

  if (f.given("pool")) cfg.pool = f.pool;
  if (f.given("k")) cfg.k = f.k;
  if (f.given("criterion")) cfg.criterion = f.criterion;
  if (f.given("vclass")) cfg.vclass = f.vclass;
  if (f.given("pins")) cfg.pins = f.pins;
  if (f.given("mode")) cfg.mode = f.mode;
  if (f.given("registry")) cfg.registry_path = f.registry;
  if (f.given("vectors")) cfg.vectors_path = f.vectors;
  if (f.given("embedding-dump")) cfg.embedding_dump_path = f.embedding_dump;
  if (f.given("vocab")) {
    cfg.vocab_paths.clear();
    for (const std::string& pair : f.vocab) {
      const std::size_t eq = pair.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
        throw langmix::ConfigError("--vocab expects code=path, got \"" + pair +
                                   "\"");
      }
      cfg.vocab_paths[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
  }
  if (f.given("scores")) cfg.scores_path = f.scores;
  if (f.given("selections")) cfg.selection_paths = f.selections;
  if (f.given("datasets")) cfg.datasets_path = f.datasets;
  if (f.given("total")) cfg.total = f.total;
  if (f.given("sizes")) cfg.sizes = f.sizes;
  if (f.given("seed")) {
    cfg.seed = f.seed;
    seed_set = true;
  }
  if (!seed_set) {
    if (const char* env = std::getenv("LANGMIX_SEED")) {
      cfg.seed = parse_uint64(env, "LANGMIX_SEED");
    }
  }
  if (f.given("output")) cfg.output_path = f.output;
  if (f.given("tsv") && f.tsv) cfg.tsv = true;
  if (f.given("trace") && f.trace) cfg.trace = true;
  return cfg;
}

// The digested view of a run: the inputs and parameters that determine the
// computed result. Presentation choices (output path, TSV, trace) stay out
// so the same run keeps the same digest wherever and however it is written.
json effective_config_json(const RunConfig& cfg) {
  const auto opt_str = [](const std::string& s) {
    return s.empty() ? json() : json(s);
  };
  return json{
      {"command", cfg.command},
      {"criterion", opt_str(cfg.criterion)},
      {"datasets", opt_str(cfg.datasets_path)},
      {"embedding_dump", opt_str(cfg.embedding_dump_path)},
      {"k", cfg.k},
      {"mode", cfg.mode ? json(*cfg.mode) : json()},
      {"pins", cfg.pins},
      {"pool", cfg.pool},
      {"registry", opt_str(cfg.registry_path)},
      {"scores", opt_str(cfg.scores_path)},
      {"seed", cfg.seed},
      {"selections", cfg.selection_paths},
      {"sizes", cfg.sizes},
      {"total", cfg.total ? json(*cfg.total) : json()},
      {"vclass", cfg.vclass ? json(*cfg.vclass) : json()},
      {"vectors", opt_str(cfg.vectors_path)},
      {"vocab", json(cfg.vocab_paths)},
  };
}

void require_exists(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw langmix::ConfigError(what + " is required but not set");
  }
  if (!fs::exists(path)) {
    throw langmix::ConfigError(what + " file does not exist: " + path);
  }
}

void check_mode(const RunConfig& cfg) {
  if (!cfg.mode) return;
  if (*cfg.mode != "max" && *cfg.mode != "min") {
    throw langmix::ConfigError("mode must be \"max\" or \"min\", got \"" +
                               *cfg.mode + "\"");
  }
  if (cfg.criterion.empty()) return;
  const bool criterion_min = cfg.criterion == "diversity_min";
  if ((*cfg.mode == "min") != criterion_min) {
    throw langmix::ConfigError("mode \"" + *cfg.mode +
                               "\" conflicts with criterion \"" +
                               cfg.criterion + "\"");
  }
}

struct SelectionInputs {
  std::optional<langmix::Registry> registry;
  std::optional<langmix::VectorStore> store;
  std::map<std::string, langmix::VocabSet> vocabs;
  json provenance = json::object();
};

SelectionInputs load_selection_inputs(const RunConfig& cfg,
                                      langmix::Criterion criterion) {
  SelectionInputs inputs;
  switch (criterion) {
    case langmix::Criterion::pretrain_size: {
      require_exists(cfg.registry_path, "--registry");
      inputs.registry = langmix::load_registry(cfg.registry_path);
      inputs.provenance["registry"] = cfg.registry_path;
      inputs.provenance["unit"] =
          inputs.registry->unit()
              ? json(langmix::to_string(*inputs.registry->unit()))
              : json();
      break;
    }
    case langmix::Criterion::vocab_coverage: {
      if (cfg.vocab_paths.empty()) {
        throw langmix::ConfigError(
            "criterion vocab_coverage needs --vocab code=path entries");
      }
      for (const std::string& code : cfg.pool) {
        const auto it = cfg.vocab_paths.find(code);
        if (it == cfg.vocab_paths.end()) {
          throw langmix::ConfigError("no vocabulary path for pool language \"" +
                                     code + "\"");
        }
        require_exists(it->second, "--vocab " + code);
        inputs.vocabs.emplace(code, langmix::load_vocab(it->second, code));
      }
      inputs.provenance["vocab_paths"] = json(cfg.vocab_paths);
      break;
    }
    default: {
      const bool have_vectors = !cfg.vectors_path.empty();
      const bool have_dump = !cfg.embedding_dump_path.empty();
      if (have_vectors == have_dump) {
        throw langmix::ConfigError(
            "diversity criteria need exactly one of --vectors or "
            "--embedding-dump");
      }
      if (have_dump) {
        if (cfg.vclass && *cfg.vclass != "embedding") {
          throw langmix::ConfigError(
              "--embedding-dump implies vclass embedding, got \"" +
              *cfg.vclass + "\"");
        }
        require_exists(cfg.embedding_dump_path, "--embedding-dump");
        inputs.store = langmix::load_embedding_dump(cfg.embedding_dump_path);
        inputs.provenance["embedding_dump"] = cfg.embedding_dump_path;
      } else {
        require_exists(cfg.vectors_path, "--vectors");
        langmix::VectorClass expected;
        if (cfg.vclass) {
          try {
            expected = langmix::vector_class_from_string(*cfg.vclass);
          } catch (const langmix::Error& e) {
            throw langmix::ConfigError(e.what());
          }
        } else {
          const json doc = langmix::load_json_file(cfg.vectors_path);
          if (!doc.is_object() || !doc.contains("vclass") ||
              !doc["vclass"].is_string()) {
            throw langmix::DataError(cfg.vectors_path +
                                     ": missing \"vclass\" string");
          }
          expected = langmix::vector_class_from_string(
              doc["vclass"].get<std::string>());
        }
        inputs.store = langmix::load_vectors(cfg.vectors_path, expected);
        inputs.provenance["vectors"] = cfg.vectors_path;
      }
      inputs.provenance["missing_policy"] = "shared-dims";
      break;
    }
  }
  return inputs;
}

langmix::SelectionResult select_with(const SelectionInputs& inputs,
                                     const RunConfig& cfg,
                                     langmix::Criterion criterion,
                                     std::size_t k) {
  const std::set<std::string> pins(cfg.pins.begin(), cfg.pins.end());
  switch (criterion) {
    case langmix::Criterion::pretrain_size:
      return langmix::select_pretrain_size(cfg.pool, k, *inputs.registry,
                                           pins);
    case langmix::Criterion::vocab_coverage:
      return langmix::select_coverage(cfg.pool, k, inputs.vocabs, pins);
    case langmix::Criterion::diversity_max:
      return langmix::select_diversity(cfg.pool, k, *inputs.store, pins,
                                       langmix::Mode::max);
    case langmix::Criterion::diversity_min:
      return langmix::select_diversity(cfg.pool, k, *inputs.store, pins,
                                       langmix::Mode::min);
    case langmix::Criterion::greedy_diversity:
      return langmix::greedy_diversity(cfg.pool, k, *inputs.store, pins);
  }
  throw langmix::InternalError("unhandled criterion");
}

void write_report(const RunConfig& cfg, const std::string& content) {
  if (cfg.output_path.empty()) {
    std::cout << content;
  } else {
    langmix::write_text_file(cfg.output_path, content);
  }
}

std::string scripts_display(const langmix::Combo& combo,
                            const langmix::Registry& registry,
                            std::vector<std::string>* out_list) {
  std::set<std::string> scripts;
  for (const std::string& code : combo) {
    scripts.insert(registry.at(code).script);
  }
  std::string joined;
  for (const std::string& s : scripts) {
    if (!joined.empty()) joined += '+';
    joined += s;
    if (out_list != nullptr) out_list->push_back(s);
  }
  return joined;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

int cmd_select(const RunConfig& cfg, const std::string& digest) {
  if (cfg.criterion.empty()) {
    throw langmix::ConfigError("select needs --criterion");
  }
  check_mode(cfg);
  if (cfg.pool.empty()) throw langmix::ConfigError("select needs --pool");
  if (cfg.k < 1) throw langmix::ConfigError("k must be at least 1");
  const langmix::Criterion criterion =
      langmix::criterion_from_string(cfg.criterion);
  const SelectionInputs inputs = load_selection_inputs(cfg, criterion);
  const langmix::SelectionResult result =
      select_with(inputs, cfg, criterion, cfg.k);

  if (cfg.tsv) {
    std::string out = "#config_sha256=" + digest + "\n";
    out += "#criterion=" + langmix::to_string(result.criterion) + "\n";
    if (result.vclass) {
      out += "#vclass=" + std::string(langmix::to_string(*result.vclass)) +
             "\n";
    }
    if (inputs.provenance.contains("unit") &&
        !inputs.provenance["unit"].is_null()) {
      out += "#unit=" + inputs.provenance["unit"].get<std::string>() + "\n";
    }
    out += "combo\tobjective\tselected\n";
    if (cfg.trace) {
      for (const langmix::TraceEntry& entry : result.trace) {
        out += langmix::combo_key(entry.combo) + "\t" +
               langmix::format_double(entry.objective) + "\t" +
               (entry.combo == result.combo ? "1" : "0") + "\n";
      }
    } else {
      out += langmix::combo_key(result.combo) + "\t" +
             langmix::format_double(result.objective) + "\t1\n";
    }
    write_report(cfg, out);
  } else {
    json report{{"command", "select"},
                {"config_sha256", digest},
                {"pool", cfg.pool},
                {"k", cfg.k},
                {"pins", cfg.pins}};
    report.update(langmix::selection_result_to_json(result, cfg.trace));
    report.update(inputs.provenance);
    write_report(cfg, report.dump(2) + "\n");
  }
  return 0;
}

int cmd_rank(const RunConfig& cfg, const std::string& digest) {
  require_exists(cfg.scores_path, "--scores");
  if (cfg.selection_paths.empty()) {
    throw langmix::ConfigError("rank needs at least one --selection report");
  }
  const langmix::ScoreTable table = langmix::load_score_table(cfg.scores_path);

  struct Row {
    std::string criterion;
    langmix::Combo combo;
    double score = 0.0;
    int rank = 0;
  };
  std::vector<Row> rows;
  for (const std::string& path : cfg.selection_paths) {
    require_exists(path, "--selection");
    const json doc = langmix::load_json_file(path);
    if (!doc.is_object() || !doc.contains("combo") ||
        !doc["combo"].is_array() || !doc.contains("criterion") ||
        !doc["criterion"].is_string()) {
      throw langmix::DataError(
          path + ": selection report needs \"criterion\" and \"combo\"");
    }
    Row row;
    row.criterion = doc["criterion"].get<std::string>();
    for (const auto& item : doc["combo"]) {
      if (!item.is_string()) {
        throw langmix::DataError(path + ": combo must be a string array");
      }
      row.combo.push_back(item.get<std::string>());
    }
    try {
      row.rank = langmix::rank_selection(row.combo, table);
    } catch (const langmix::Error& e) {
      throw langmix::DataError("selection \"" + row.criterion +
                               "\": " + e.what());
    }
    row.score = table.scores.at(langmix::combo_key(row.combo));
    rows.push_back(std::move(row));
  }

  // Reference rows: best and worst table entries, first key on ties.
  if (!table.scores.empty()) {
    auto best = table.scores.begin();
    auto worst = table.scores.begin();
    for (auto it = table.scores.begin(); it != table.scores.end(); ++it) {
      if (it->second > best->second) best = it;
      if (it->second < worst->second) worst = it;
    }
    rows.push_back(Row{"MAX", langmix::combo_from_key(best->first),
                       best->second,
                       langmix::rank_selection(
                           langmix::combo_from_key(best->first), table)});
    rows.push_back(Row{"MIN", langmix::combo_from_key(worst->first),
                       worst->second,
                       langmix::rank_selection(
                           langmix::combo_from_key(worst->first), table)});
  }

  if (cfg.tsv) {
    std::string out = "#config_sha256=" + digest + "\n";
    out += "#task=" + table.task + "\n";
    out += "#table_size=" + std::to_string(table.scores.size()) + "\n";
    out += "criterion\tcombo\tscore\trank\n";
    for (const Row& row : rows) {
      out += row.criterion + "\t" + langmix::combo_key(row.combo) + "\t" +
             langmix::format_double(row.score) + "\t" +
             std::to_string(row.rank) + "\n";
    }
    write_report(cfg, out);
  } else {
    json jrows = json::array();
    for (const Row& row : rows) {
      jrows.push_back(json{{"criterion", row.criterion},
                           {"combo", row.combo},
                           {"key", langmix::combo_key(row.combo)},
                           {"score", row.score},
                           {"rank", row.rank}});
    }
    const json report{{"command", "rank"},
                      {"config_sha256", digest},
                      {"task", table.task},
                      {"table_size", table.scores.size()},
                      {"scores", cfg.scores_path},
                      {"rows", std::move(jrows)}};
    write_report(cfg, report.dump(2) + "\n");
  }
  return 0;
}

int cmd_classify_scripts(const RunConfig& cfg, const std::string& digest) {
  require_exists(cfg.registry_path, "--registry");
  if (cfg.pool.empty()) {
    throw langmix::ConfigError("classify-scripts needs --pool");
  }
  if (cfg.k < 1) throw langmix::ConfigError("k must be at least 1");
  const langmix::Registry registry = langmix::load_registry(cfg.registry_path);
  const std::set<std::string> pins(cfg.pins.begin(), cfg.pins.end());
  const std::vector<langmix::Combo> combos =
      langmix::enumerate_combinations(cfg.pool, cfg.k, pins);

  std::map<int, std::size_t> counts;
  json jrows = json::array();
  std::string tsv_rows;
  for (const langmix::Combo& combo : combos) {
    const langmix::ScriptCase sc = langmix::script_case(combo, registry);
    counts[sc.distinct_scripts] += 1;
    std::vector<std::string> scripts;
    const std::string joined = scripts_display(combo, registry, &scripts);
    if (cfg.tsv) {
      tsv_rows += langmix::combo_key(combo) + "\t" + joined + "\t" +
                  std::to_string(sc.distinct_scripts) + "\t" +
                  (sc.case_id ? std::to_string(*sc.case_id) : "") + "\n";
    } else {
      jrows.push_back(json{
          {"combo", combo},
          {"key", langmix::combo_key(combo)},
          {"scripts", scripts},
          {"distinct", sc.distinct_scripts},
          {"case", sc.case_id ? json(*sc.case_id) : json()}});
    }
  }

  if (cfg.tsv) {
    std::string out = "#config_sha256=" + digest + "\n";
    out += "#total=" + std::to_string(combos.size()) + "\n";
    for (const auto& [distinct, n] : counts) {
      out += "#count_scripts" + std::to_string(distinct) + "=" +
             std::to_string(n) + "\n";
    }
    out += "combo\tscripts\tdistinct\tcase\n";
    out += tsv_rows;
    write_report(cfg, out);
  } else {
    json jcounts = json::object();
    for (const auto& [distinct, n] : counts) {
      jcounts[std::to_string(distinct)] = n;
    }
    const json report{{"command", "classify-scripts"},
                      {"config_sha256", digest},
                      {"registry", cfg.registry_path},
                      {"pool", cfg.pool},
                      {"k", cfg.k},
                      {"total", combos.size()},
                      {"counts", std::move(jcounts)},
                      {"rows", std::move(jrows)}};
    write_report(cfg, report.dump(2) + "\n");
  }
  return 0;
}

json mix_report_json(const RunConfig& cfg, const std::string& digest,
                     const langmix::SelectionResult& selection,
                     const langmix::MixManifest& manifest) {
  json report{{"command", cfg.command},
              {"config_sha256", digest},
              {"selection",
               langmix::selection_result_to_json(selection, cfg.trace)}};
  report.update(langmix::manifest_to_json(manifest));
  return report;
}

std::string mix_report_tsv(const std::string& digest,
                           const langmix::SelectionResult& selection,
                           const langmix::MixManifest& manifest) {
  std::string out = "#config_sha256=" + digest + "\n";
  out += "#combo=" + langmix::combo_key(selection.combo) + "\n";
  out += "#total=" + std::to_string(manifest.allocation.total) + "\n";
  out += "#seed=" + std::to_string(manifest.seed) + "\n";
  out += "#generator=mt19937_64/floyd\n";
  out += "#sha256=" + manifest.checksum + "\n";
  out += "lang\tdataset\tindex\n";
  for (const langmix::ManifestEntry& entry : manifest.entries) {
    out += entry.lang + "\t" + entry.dataset + "\t" +
           std::to_string(entry.index) + "\n";
  }
  return out;
}

int cmd_mix(const RunConfig& cfg, const std::string& digest,
            std::string* stage) {
  *stage = "select";
  if (cfg.criterion.empty()) {
    throw langmix::ConfigError("mix needs --criterion");
  }
  check_mode(cfg);
  if (cfg.pool.empty()) throw langmix::ConfigError("mix needs --pool");
  if (cfg.k < 1) throw langmix::ConfigError("k must be at least 1");
  if (!cfg.total) throw langmix::ConfigError("mix needs --total");
  require_exists(cfg.datasets_path, "--datasets");
  const langmix::Criterion criterion =
      langmix::criterion_from_string(cfg.criterion);
  const SelectionInputs inputs = load_selection_inputs(cfg, criterion);
  const langmix::SelectionResult selection =
      select_with(inputs, cfg, criterion, cfg.k);

  *stage = "allocate";
  const langmix::Allocation allocation =
      langmix::allocate_budget(*cfg.total, selection.combo);

  *stage = "sample";
  const std::map<std::string, langmix::DatasetInfo> datasets =
      langmix::load_datasets(cfg.datasets_path);
  const langmix::MixManifest manifest =
      langmix::build_manifest(datasets, allocation, cfg.seed);

  stage->clear();
  if (cfg.tsv) {
    write_report(cfg, mix_report_tsv(digest, selection, manifest));
  } else {
    write_report(cfg,
                 mix_report_json(cfg, digest, selection, manifest).dump(2) +
                     "\n");
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& digest) {
  if (cfg.criterion.empty()) {
    throw langmix::ConfigError("sweep needs --criterion");
  }
  check_mode(cfg);
  if (cfg.pool.empty()) throw langmix::ConfigError("sweep needs --pool");
  if (cfg.sizes.empty()) throw langmix::ConfigError("sweep needs --sizes");
  if (!cfg.total) throw langmix::ConfigError("sweep needs --total");
  if (cfg.output_path.empty()) {
    throw langmix::ConfigError("sweep needs --output (a directory)");
  }
  require_exists(cfg.datasets_path, "--datasets");
  const langmix::Criterion criterion =
      langmix::criterion_from_string(cfg.criterion);
  const SelectionInputs inputs = load_selection_inputs(cfg, criterion);
  const std::map<std::string, langmix::DatasetInfo> datasets =
      langmix::load_datasets(cfg.datasets_path);

  std::error_code ec;
  fs::create_directories(cfg.output_path, ec);
  if (ec) {
    throw langmix::DataError("cannot create output directory " +
                             cfg.output_path + ": " + ec.message());
  }

  std::vector<std::size_t> sizes(cfg.sizes.begin(), cfg.sizes.end());
  const std::vector<langmix::SweepItem> items = langmix::sweep_group_sizes(
      cfg.pool, sizes, *cfg.total,
      [&](std::size_t size) {
        return select_with(inputs, cfg, criterion, size);
      },
      datasets, cfg.seed);

  json jitems = json::array();
  std::string tsv =
      "#config_sha256=" + digest +
      "\nsize\tstatus\tstage\tcombo\tobjective\tsha256\tpath\terror\n";
  bool any_failed = false;
  for (const langmix::SweepItem& item : items) {
    if (item.ok()) {
      const std::string name =
          "manifest_size" + std::to_string(item.size) + ".json";
      const fs::path path = fs::path(cfg.output_path) / name;
      json file = mix_report_json(cfg, digest, *item.selection,
                                  *item.manifest);
      file["size"] = item.size;
      langmix::write_text_file(path, file.dump(2) + "\n");
      jitems.push_back(json{{"size", item.size},
                            {"status", "ok"},
                            {"combo", item.selection->combo},
                            {"objective", item.selection->objective},
                            {"sha256", item.manifest->checksum},
                            {"path", path.string()}});
      tsv += std::to_string(item.size) + "\tok\t\t" +
             langmix::combo_key(item.selection->combo) + "\t" +
             langmix::format_double(item.selection->objective) + "\t" +
             item.manifest->checksum + "\t" + path.string() + "\t\n";
    } else {
      any_failed = true;
      jitems.push_back(json{{"size", item.size},
                            {"status", "error"},
                            {"stage", item.stage},
                            {"error", item.error}});
      tsv += std::to_string(item.size) + "\terror\t" + item.stage +
             "\t\t\t\t\t" + item.error + "\n";
    }
  }

  const json report{{"command", "sweep"},
                    {"config_sha256", digest},
                    {"criterion", cfg.criterion},
                    {"total", *cfg.total},
                    {"seed", cfg.seed},
                    {"items", std::move(jitems)}};
  const fs::path report_path =
      fs::path(cfg.output_path) /
      (cfg.tsv ? "sweep_report.tsv" : "sweep_report.json");
  langmix::write_text_file(report_path,
                           cfg.tsv ? tsv : report.dump(2) + "\n");
  return any_failed ? 3 : 0;
}

int exit_code_for(langmix::ErrorCategory category) {
  switch (category) {
    case langmix::ErrorCategory::config:
      return 2;
    case langmix::ErrorCategory::data:
      return 3;
    case langmix::ErrorCategory::internal:
      return 4;
  }
  return 4;
}

void emit_error(const std::string& command, const std::string& stage,
                const std::string& category, const std::string& message) {
  json record{{"error",
               json{{"category", category},
                    {"command", command},
                    {"message", message}}}};
  if (!stage.empty()) record["error"]["stage"] = stage;
  std::cerr << record.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"source-language combination selection and data mixing"};
  app.require_subcommand(1);

  Flags select_flags, rank_flags, classify_flags, mix_flags, sweep_flags;

  CLI::App* select_cmd =
      app.add_subcommand("select", "pick a source-language combination");
  add_common_flags(select_cmd, select_flags);
  add_k_flag(select_cmd, select_flags);
  add_selection_flags(select_cmd, select_flags);

  CLI::App* rank_cmd =
      app.add_subcommand("rank", "rank selections against a score table");
  add_common_flags(rank_cmd, rank_flags);
  rank_flags.opts["scores"] =
      rank_cmd->add_option("--scores", rank_flags.scores, "score table JSON");
  rank_flags.opts["selections"] = rank_cmd->add_option(
      "--selection", rank_flags.selections,
      "selection report JSON from `select` (repeatable)");

  CLI::App* classify_cmd = app.add_subcommand(
      "classify-scripts", "writing-system cases per combination");
  add_common_flags(classify_cmd, classify_flags);
  add_k_flag(classify_cmd, classify_flags);
  classify_flags.opts["registry"] = classify_cmd->add_option(
      "--registry", classify_flags.registry, "language registry TSV");

  CLI::App* mix_cmd =
      app.add_subcommand("mix", "selection plus equal-budget manifest");
  add_common_flags(mix_cmd, mix_flags);
  add_k_flag(mix_cmd, mix_flags);
  add_selection_flags(mix_cmd, mix_flags);
  mix_flags.opts["datasets"] = mix_cmd->add_option(
      "--datasets", mix_flags.datasets, "dataset descriptor JSON");
  mix_flags.opts["total"] = mix_cmd->add_option(
      "--total", mix_flags.total, "total record budget to split");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "manifests across combination sizes");
  add_common_flags(sweep_cmd, sweep_flags);
  add_selection_flags(sweep_cmd, sweep_flags);
  sweep_flags.opts["datasets"] = sweep_cmd->add_option(
      "--datasets", sweep_flags.datasets, "dataset descriptor JSON");
  sweep_flags.opts["total"] = sweep_cmd->add_option(
      "--total", sweep_flags.total, "total record budget to split");
  sweep_flags.opts["sizes"] =
      sweep_cmd->add_option("--sizes", sweep_flags.sizes,
                            "combination sizes to sweep, e.g. 1,2,3")
          ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("", "", "config", e.what());
    return 2;
  }

  std::string command;
  const Flags* flags = nullptr;
  if (select_cmd->parsed()) {
    command = "select";
    flags = &select_flags;
  } else if (rank_cmd->parsed()) {
    command = "rank";
    flags = &rank_flags;
  } else if (classify_cmd->parsed()) {
    command = "classify-scripts";
    flags = &classify_flags;
  } else if (mix_cmd->parsed()) {
    command = "mix";
    flags = &mix_flags;
  } else {
    command = "sweep";
    flags = &sweep_flags;
  }

  std::string stage;
  try {
    const RunConfig cfg = merge_config(command, *flags);
    const std::string digest =
        langmix::sha256_hex(effective_config_json(cfg).dump());
    if (command == "select") return cmd_select(cfg, digest);
    if (command == "rank") return cmd_rank(cfg, digest);
    if (command == "classify-scripts") return cmd_classify_scripts(cfg, digest);
    if (command == "mix") return cmd_mix(cfg, digest, &stage);
    return cmd_sweep(cfg, digest);
  } catch (const langmix::Error& e) {
    emit_error(command, stage, langmix::to_string(e.category()), e.what());
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    emit_error(command, stage, "internal", e.what());
    return 4;
  }
}
