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

// Per-language vocabulary sets and union coverage. Tokens come straight from
// the input files (one per line, `#` comments ignored); this module performs
// no tokenization. Token identity is byte equality after NFC normalization.

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "langmix/errors.hpp"
#include "langmix/io.hpp"
#include "langmix/text.hpp"

namespace langmix {

struct VocabSet {
  std::string lang;
  std::set<std::string> tokens;
};

inline VocabSet load_vocab(const std::filesystem::path& path,
                           const std::string& lang) {
  const std::string text = read_text_file(path);
  const std::string origin = path.string();
  VocabSet out;
  out.lang = ascii_lower(lang);
  const std::vector<std::string> lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = detail::strip_cr(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    if (!is_valid_utf8(line)) {
      throw DataError(origin + ":" + std::to_string(i + 1) +
                      ": invalid UTF-8");
    }
    out.tokens.insert(nfc_normalize(line));
  }
  if (out.tokens.empty()) {
    throw DataError(origin + ": empty vocabulary file");
  }
  return out;
}

// |union of combo vocabularies| / |union of pool vocabularies|, the share of
// the pool-wide token union a combination reaches. Empty combo -> 0, full
// pool -> 1, both exact.
inline double coverage(const std::vector<std::string>& combo,
                       const std::map<std::string, VocabSet>& pool_vocabs) {
  if (pool_vocabs.empty()) {
    throw DataError("coverage requires a nonempty vocabulary pool");
  }
  std::set<std::string> members(combo.begin(), combo.end());
  for (const std::string& code : members) {
    if (pool_vocabs.count(code) == 0) {
      throw DataError("unknown language code \"" + code +
                      "\" in combination");
    }
  }
  std::unordered_set<std::string_view> pool_union;
  for (const auto& [code, vocab] : pool_vocabs) {
    for (const std::string& t : vocab.tokens) pool_union.insert(t);
  }
  if (pool_union.empty()) {
    throw DataError("vocabulary pool union is empty");
  }
  if (members.empty()) return 0.0;
  std::unordered_set<std::string_view> combo_union;
  for (const std::string& code : members) {
    for (const std::string& t : pool_vocabs.at(code).tokens) {
      combo_union.insert(t);
    }
  }
  return static_cast<double>(combo_union.size()) /
         static_cast<double>(pool_union.size());
}

}  // namespace langmix
