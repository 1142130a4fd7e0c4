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

// Language metadata: ISO codes, writing systems, pretraining-data sizes.
// Registry files are tab-separated (`code<TAB>script<TAB>pretrain_size`) with
// a `#unit=<GB|tokens>` header; `#` lines are comments. A registry is
// immutable after load and safe for concurrent reads.

#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "langmix/errors.hpp"
#include "langmix/io.hpp"
#include "langmix/text.hpp"

namespace langmix {

enum class SizeUnit { gb, tokens };

inline const char* to_string(SizeUnit u) {
  return u == SizeUnit::gb ? "GB" : "tokens";
}

struct LanguageRecord {
  std::string code;    // lowercase ISO-639, e.g. "en"
  std::string script;  // title-case ISO-15924, e.g. "Latn"
  double pretrain_size = 0.0;

  bool operator==(const LanguageRecord&) const = default;
};

namespace detail {

inline bool valid_code(std::string_view code) {
  if (code.empty()) return false;
  if (!(code[0] >= 'a' && code[0] <= 'z')) return false;
  for (const char c : code) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

inline bool valid_script(std::string_view script) {
  if (script.empty()) return false;
  for (const char c : script) {
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) return false;
  }
  return true;
}

}  // namespace detail

class Registry {
 public:
  Registry() = default;

  // Validates and normalizes every record. The unit may be absent only for an
  // empty record list.
  Registry(std::vector<LanguageRecord> records, std::optional<SizeUnit> unit)
      : unit_(unit) {
    if (!records.empty() && !unit.has_value()) {
      throw DataError("registry with records requires a #unit header");
    }
    for (LanguageRecord& r : records) {
      r.code = ascii_lower(r.code);
      r.script = ascii_title(r.script);
      if (!detail::valid_code(r.code)) {
        throw DataError("invalid language code \"" + r.code + "\"");
      }
      if (!detail::valid_script(r.script)) {
        throw DataError("invalid script \"" + r.script + "\" for language \"" +
                        r.code + "\"");
      }
      if (!(r.pretrain_size >= 0.0) || !std::isfinite(r.pretrain_size)) {
        throw DataError("negative or non-finite pretrain_size for language \"" +
                        r.code + "\"");
      }
      if (!records_.emplace(r.code, r).second) {
        throw DataError("duplicate language code \"" + r.code + "\"");
      }
    }
  }

  const std::map<std::string, LanguageRecord>& records() const {
    return records_;
  }

  std::optional<SizeUnit> unit() const { return unit_; }

  std::size_t size() const { return records_.size(); }

  bool contains(const std::string& code) const {
    return records_.count(code) != 0;
  }

  const LanguageRecord& at(const std::string& code) const {
    const auto it = records_.find(code);
    if (it == records_.end()) {
      throw DataError("unknown language code \"" + code + "\"");
    }
    return it->second;
  }

  std::vector<std::string> codes() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& [code, rec] : records_) out.push_back(code);
    return out;
  }

  bool operator==(const Registry&) const = default;

 private:
  std::map<std::string, LanguageRecord> records_;
  std::optional<SizeUnit> unit_;
};

// Writing-system diversity of one combination. case_id follows the three-way
// taxonomy for 3-language combinations (1: one shared script, 2: exactly two
// scripts, 3: all distinct) and is absent for other sizes.
struct ScriptCase {
  int distinct_scripts = 0;
  std::optional<int> case_id;

  bool operator==(const ScriptCase&) const = default;
};

namespace detail {

inline double parse_size(const std::string& field, const std::string& origin,
                         std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw DataError(origin + ":" + std::to_string(line_no) +
                    ": malformed pretrain_size \"" + field + "\"");
  }
  return v;
}

}  // namespace detail

inline Registry parse_registry(std::string_view text,
                               const std::string& origin) {
  std::optional<SizeUnit> unit;
  std::vector<LanguageRecord> records;
  const std::vector<std::string> lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string line = detail::strip_cr(lines[i]);
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view kUnitPrefix = "#unit=";
      if (line.rfind(kUnitPrefix, 0) == 0) {
        if (unit.has_value()) {
          throw DataError(origin + ":" + std::to_string(line_no) +
                          ": repeated #unit header");
        }
        const std::string value = line.substr(kUnitPrefix.size());
        if (value == "GB") {
          unit = SizeUnit::gb;
        } else if (value == "tokens") {
          unit = SizeUnit::tokens;
        } else {
          throw DataError(origin + ":" + std::to_string(line_no) +
                          ": unit must be GB or tokens, got \"" + value +
                          "\"");
        }
      }
      continue;
    }
    if (!unit.has_value()) {
      throw DataError(origin + ":" + std::to_string(line_no) +
                      ": data row before #unit header");
    }
    const std::vector<std::string> fields = detail::split_tabs(line);
    if (fields.size() != 3) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected 3 "
                      "tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    LanguageRecord rec;
    rec.code = fields[0];
    rec.script = fields[1];
    rec.pretrain_size = detail::parse_size(fields[2], origin, line_no);
    if (rec.pretrain_size < 0.0) {
      throw DataError(origin + ":" + std::to_string(line_no) +
                      ": negative pretrain_size for \"" + rec.code + "\"");
    }
    records.push_back(std::move(rec));
  }
  try {
    return Registry(std::move(records), unit);
  } catch (const DataError& e) {
    throw DataError(origin + ": " + e.what());
  }
}

inline Registry load_registry(const std::filesystem::path& path) {
  return parse_registry(read_text_file(path), path.string());
}

inline std::string serialize_registry(const Registry& registry) {
  std::string out;
  if (registry.unit().has_value()) {
    out += "#unit=";
    out += to_string(*registry.unit());
    out += '\n';
  }
  for (const auto& [code, rec] : registry.records()) {
    out += rec.code;
    out += '\t';
    out += rec.script;
    out += '\t';
    out += format_double(rec.pretrain_size);
    out += '\n';
  }
  return out;
}

inline void save_registry(const Registry& registry,
                          const std::filesystem::path& path) {
  write_text_file(path, serialize_registry(registry));
}

// Number of distinct writing systems among the combo members; permutation
// invariant, duplicates collapse.
inline ScriptCase script_case(const std::vector<std::string>& combo,
                              const Registry& registry) {
  if (combo.empty()) {
    throw DataError("script_case requires a nonempty combination");
  }
  std::set<std::string> members(combo.begin(), combo.end());
  std::set<std::string> scripts;
  for (const std::string& code : members) {
    scripts.insert(registry.at(code).script);
  }
  ScriptCase result;
  result.distinct_scripts = static_cast<int>(scripts.size());
  if (members.size() == 3) {
    result.case_id = result.distinct_scripts;
  }
  return result;
}

}  // namespace langmix
