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

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace langmix {

// Error taxonomy mirrored by the CLI exit codes:
// config -> 2, data -> 3, internal -> 4.
enum class ErrorCategory { config, data, internal };

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::data: return "data";
    case ErrorCategory::internal: return "internal";
  }
  return "internal";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string message)
      : std::runtime_error(std::move(message)), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// Bad flags, inconsistent run parameters, missing input files.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::string message)
      : Error(ErrorCategory::config, std::move(message)) {}
};

// Malformed or contradictory file contents, unknown language codes,
// undefined similarity restrictions, dataset shortfalls.
class DataError : public Error {
 public:
  explicit DataError(std::string message)
      : Error(ErrorCategory::data, std::move(message)) {}
};

// A violated internal invariant; always a bug.
class InternalError : public Error {
 public:
  explicit InternalError(std::string message)
      : Error(ErrorCategory::internal, std::move(message)) {}
};

}  // namespace langmix
