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

// File and JSON plumbing shared by every loader. JSON parsing is strict:
// duplicate object keys are rejected instead of silently keeping the last
// value, since all our objects are keyed by language code or combination key.

#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "langmix/errors.hpp"

namespace langmix {

using json = nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw DataError("read failure: " + path.string());
  }
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DataError("cannot open file for writing: " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw DataError("write failure: " + path.string());
  }
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw InternalError("double formatting failed");
  }
  return std::string(buf, ptr);
}

namespace detail {

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) {
        lines.emplace_back(text.substr(start));
      }
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

// SAX handler that only tracks object keys; anything else is accepted.
class DuplicateKeyCheck {
 public:
  bool null() { return true; }
  bool boolean(bool) { return true; }
  bool number_integer(json::number_integer_t) { return true; }
  bool number_unsigned(json::number_unsigned_t) { return true; }
  bool number_float(json::number_float_t, const std::string&) { return true; }
  bool string(std::string&) { return true; }
  bool binary(json::binary_t&) { return true; }
  bool start_object(std::size_t) {
    keys_.emplace_back();
    return true;
  }
  bool key(std::string& k) {
    if (!keys_.back().insert(k).second) {
      duplicate_ = k;
      return false;
    }
    return true;
  }
  bool end_object() {
    keys_.pop_back();
    return true;
  }
  bool start_array(std::size_t) { return true; }
  bool end_array() { return true; }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception& ex) {
    parse_error_ = ex.what();
    return false;
  }

  const std::string& duplicate() const { return duplicate_; }
  const std::string& error() const { return parse_error_; }

 private:
  std::vector<std::unordered_set<std::string>> keys_;
  std::string duplicate_;
  std::string parse_error_;
};

}  // namespace detail

inline json parse_json_strict(std::string_view text,
                              const std::string& origin) {
  detail::DuplicateKeyCheck check;
  if (!json::sax_parse(text, &check)) {
    if (!check.duplicate().empty()) {
      throw DataError(origin + ": duplicate key \"" + check.duplicate() +
                      "\"");
    }
    throw DataError(origin + ": " + check.error());
  }
  return json::parse(text);
}

inline json load_json_file(const std::filesystem::path& path) {
  return parse_json_strict(read_text_file(path), path.string());
}

}  // namespace langmix
