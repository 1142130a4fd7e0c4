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

// Typed language vectors (typological classes plus model-derived embeddings)
// and missing-value-aware cosine similarity.
//
// Missing values: similarity is computed over the restriction to dimensions
// where BOTH vectors are defined. An empty restriction or a zero-norm
// restricted vector is a hard error, never a default value.
//
// Determinism contract: accumulation runs in stored dimension order, result
// is dot/sqrt(na*nb) clamped into [-1, 1]. Tests and oracles rely on this
// evaluation order being canonical.

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "langmix/errors.hpp"
#include "langmix/io.hpp"
#include "langmix/text.hpp"

namespace langmix {

enum class VectorClass { syntax, phonology, inventory, family, geo, embedding };

inline const char* to_string(VectorClass c) {
  switch (c) {
    case VectorClass::syntax: return "syntax";
    case VectorClass::phonology: return "phonology";
    case VectorClass::inventory: return "inventory";
    case VectorClass::family: return "family";
    case VectorClass::geo: return "geo";
    case VectorClass::embedding: return "embedding";
  }
  return "embedding";
}

inline VectorClass vector_class_from_string(const std::string& s) {
  if (s == "syntax") return VectorClass::syntax;
  if (s == "phonology") return VectorClass::phonology;
  if (s == "inventory") return VectorClass::inventory;
  if (s == "family") return VectorClass::family;
  if (s == "geo") return VectorClass::geo;
  if (s == "embedding") return VectorClass::embedding;
  throw DataError("unknown vector class \"" + s + "\"");
}

// One language's feature vector; std::nullopt marks a MISSING value.
struct LanguageVector {
  std::string lang;
  VectorClass vclass = VectorClass::syntax;
  std::vector<std::string> dim_names;
  std::vector<std::optional<double>> values;

  std::size_t dimension() const { return values.size(); }

  std::size_t defined_count() const {
    std::size_t n = 0;
    for (const auto& v : values) {
      if (v.has_value()) ++n;
    }
    return n;
  }
};

namespace detail {

inline void validate_vector(const LanguageVector& v) {
  if (v.dim_names.size() != v.values.size()) {
    throw DataError("vector for \"" + v.lang +
                    "\" has mismatched dims/values lengths");
  }
  std::size_t defined = 0;
  for (const auto& x : v.values) {
    if (!x.has_value()) continue;
    ++defined;
    if (!std::isfinite(*x)) {
      throw DataError("non-finite value in vector for \"" + v.lang + "\"");
    }
  }
  if (defined == 0) {
    throw DataError("vector for \"" + v.lang + "\" has every value MISSING");
  }
  if (v.vclass == VectorClass::embedding && defined != v.values.size()) {
    throw DataError("embedding vector for \"" + v.lang +
                    "\" contains MISSING entries");
  }
}

}  // namespace detail

// All vectors in a store share one vector class and one ordered dimension
// list; one vector per language. Immutable after load.
class VectorStore {
 public:
  VectorStore(VectorClass vclass, std::vector<std::string> dim_names)
      : vclass_(vclass), dim_names_(std::move(dim_names)) {
    std::set<std::string> seen;
    for (const std::string& d : dim_names_) {
      if (d.empty()) throw DataError("empty dimension name");
      if (!seen.insert(d).second) {
        throw DataError("duplicate dimension name \"" + d + "\"");
      }
    }
  }

  void insert(LanguageVector v) {
    if (v.vclass != vclass_) {
      throw DataError("vector class mismatch for \"" + v.lang + "\"");
    }
    if (v.dim_names != dim_names_) {
      throw DataError("inconsistent dimension list for \"" + v.lang + "\"");
    }
    detail::validate_vector(v);
    const std::string code = v.lang;
    if (!vectors_.emplace(code, std::move(v)).second) {
      throw DataError("duplicate language \"" + code + "\"");
    }
  }

  VectorClass vclass() const { return vclass_; }
  const std::vector<std::string>& dim_names() const { return dim_names_; }
  std::size_t dimension() const { return dim_names_.size(); }
  std::size_t size() const { return vectors_.size(); }

  bool contains(const std::string& lang) const {
    return vectors_.count(lang) != 0;
  }

  const LanguageVector& at(const std::string& lang) const {
    const auto it = vectors_.find(lang);
    if (it == vectors_.end()) {
      throw DataError("no vector for language \"" + lang + "\"");
    }
    return it->second;
  }

  std::vector<std::string> langs() const {
    std::vector<std::string> out;
    out.reserve(vectors_.size());
    for (const auto& [lang, v] : vectors_) out.push_back(lang);
    return out;
  }

 private:
  VectorClass vclass_;
  std::vector<std::string> dim_names_;
  std::map<std::string, LanguageVector> vectors_;
};

// Cosine over the dimensions defined on both sides. Exactly symmetric; the
// clamp keeps sqrt rounding from leaking outside [-1, 1].
inline double cosine_similarity(const LanguageVector& a,
                                const LanguageVector& b) {
  if (a.vclass != b.vclass) {
    throw DataError("vector class mismatch between \"" + a.lang + "\" and \"" +
                    b.lang + "\"");
  }
  if (a.dim_names != b.dim_names) {
    throw DataError("dimension list mismatch between \"" + a.lang +
                    "\" and \"" + b.lang + "\"");
  }
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  bool shared = false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!a.values[i].has_value() || !b.values[i].has_value()) continue;
    shared = true;
    const double x = *a.values[i];
    const double y = *b.values[i];
    dot += x * y;
    norm_a += x * x;
    norm_b += y * y;
  }
  if (!shared) {
    throw DataError("no shared defined dimension between \"" + a.lang +
                    "\" and \"" + b.lang + "\"");
  }
  if (norm_a == 0.0 || norm_b == 0.0) {
    throw DataError("zero-norm restricted vector in pair (\"" + a.lang +
                    "\", \"" + b.lang + "\")");
  }
  double cos = dot / std::sqrt(norm_a * norm_b);
  if (cos > 1.0) cos = 1.0;
  if (cos < -1.0) cos = -1.0;
  return cos;
}

// Componentwise mean of sentence embeddings, the embedding-class language
// vector. Dimensions are named e0..e{d-1}.
inline LanguageVector derive_embedding_vector(
    const std::string& lang,
    const std::vector<std::vector<double>>& sentence_embeddings) {
  if (sentence_embeddings.empty()) {
    throw DataError("empty sentence-embedding list for \"" + lang + "\"");
  }
  const std::size_t dim = sentence_embeddings.front().size();
  if (dim == 0) {
    throw DataError("zero-dimensional sentence embedding for \"" + lang +
                    "\"");
  }
  for (const auto& v : sentence_embeddings) {
    if (v.size() != dim) {
      throw DataError("ragged sentence-embedding dimensions for \"" + lang +
                      "\"");
    }
  }
  LanguageVector out;
  out.lang = lang;
  out.vclass = VectorClass::embedding;
  out.dim_names.reserve(dim);
  out.values.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    double sum = 0.0;
    for (const auto& v : sentence_embeddings) sum += v[j];
    out.dim_names.push_back("e" + std::to_string(j));
    out.values.emplace_back(sum /
                            static_cast<double>(sentence_embeddings.size()));
  }
  detail::validate_vector(out);
  return out;
}

// M[i][j] = cosine(langs[i], langs[j]); symmetric by construction.
inline std::vector<std::vector<double>> similarity_matrix(
    const VectorStore& store, const std::vector<std::string>& langs) {
  const std::size_t n = langs.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double s = cosine_similarity(store.at(langs[i]), store.at(langs[j]));
      m[i][j] = s;
      m[j][i] = s;
    }
  }
  return m;
}

// Vector-store file: {"vclass": ..., "dims": [...], "vectors": {code: [...]}}
// with null encoding MISSING.
inline VectorStore load_vectors(const std::filesystem::path& path,
                                VectorClass expected) {
  const json doc = load_json_file(path);
  const std::string origin = path.string();
  if (!doc.is_object()) {
    throw DataError(origin + ": expected a JSON object");
  }
  if (!doc.contains("vclass") || !doc["vclass"].is_string()) {
    throw DataError(origin + ": missing \"vclass\" string");
  }
  const VectorClass file_class =
      vector_class_from_string(doc["vclass"].get<std::string>());
  if (file_class != expected) {
    throw DataError(origin + ": file declares vector class \"" +
                    std::string(to_string(file_class)) + "\", expected \"" +
                    std::string(to_string(expected)) + "\"");
  }
  if (!doc.contains("dims") || !doc["dims"].is_array()) {
    throw DataError(origin + ": missing \"dims\" array");
  }
  std::vector<std::string> dims;
  for (const auto& d : doc["dims"]) {
    if (!d.is_string()) {
      throw DataError(origin + ": dimension names must be strings");
    }
    dims.push_back(d.get<std::string>());
  }
  if (!doc.contains("vectors") || !doc["vectors"].is_object()) {
    throw DataError(origin + ": missing \"vectors\" object");
  }
  VectorStore store(expected, std::move(dims));
  for (const auto& [code, row] : doc["vectors"].items()) {
    if (!row.is_array()) {
      throw DataError(origin + ": vector for \"" + code +
                      "\" must be an array");
    }
    LanguageVector v;
    v.lang = ascii_lower(code);
    v.vclass = expected;
    v.dim_names = store.dim_names();
    if (row.size() != store.dimension()) {
      throw DataError(origin + ": inconsistent dimension list for \"" + code +
                      "\": got " + std::to_string(row.size()) + ", expected " +
                      std::to_string(store.dimension()));
    }
    for (const auto& x : row) {
      if (x.is_null()) {
        v.values.emplace_back(std::nullopt);
      } else if (x.is_number()) {
        v.values.emplace_back(x.get<double>());
      } else {
        throw DataError(origin + ": vector entries for \"" + code +
                        "\" must be numbers or null");
      }
    }
    try {
      store.insert(std::move(v));
    } catch (const DataError& e) {
      throw DataError(origin + ": " + e.what());
    }
  }
  return store;
}

// Embedding dump: {"<code>": [[sentence vector], ...], ...}. Each language is
// mean-pooled into one embedding-class vector; every language must share one
// dimensionality.
inline VectorStore load_embedding_dump(const std::filesystem::path& path) {
  const json doc = load_json_file(path);
  const std::string origin = path.string();
  if (!doc.is_object()) {
    throw DataError(origin + ": expected a JSON object");
  }
  std::map<std::string, LanguageVector> pooled;
  std::optional<std::size_t> dim;
  for (const auto& [code, rows] : doc.items()) {
    if (!rows.is_array()) {
      throw DataError(origin + ": embeddings for \"" + code +
                      "\" must be an array of vectors");
    }
    std::vector<std::vector<double>> sentences;
    for (const auto& row : rows) {
      if (!row.is_array()) {
        throw DataError(origin + ": embeddings for \"" + code +
                        "\" must be arrays of numbers");
      }
      std::vector<double> v;
      v.reserve(row.size());
      for (const auto& x : row) {
        if (!x.is_number()) {
          throw DataError(origin + ": embeddings for \"" + code +
                          "\" must be numeric");
        }
        v.push_back(x.get<double>());
      }
      sentences.push_back(std::move(v));
    }
    LanguageVector v;
    try {
      v = derive_embedding_vector(ascii_lower(code), sentences);
    } catch (const DataError& e) {
      throw DataError(origin + ": " + e.what());
    }
    if (dim.has_value() && v.dimension() != *dim) {
      throw DataError(origin + ": inconsistent dimension list for \"" + code +
                      "\": got " + std::to_string(v.dimension()) +
                      ", expected " + std::to_string(*dim));
    }
    dim = v.dimension();
    pooled.emplace(v.lang, std::move(v));
  }
  if (!dim.has_value()) {
    throw DataError(origin + ": embedding dump contains no languages");
  }
  std::vector<std::string> dims;
  dims.reserve(*dim);
  for (std::size_t j = 0; j < *dim; ++j) dims.push_back("e" + std::to_string(j));
  VectorStore store(VectorClass::embedding, std::move(dims));
  for (auto& [code, v] : pooled) store.insert(std::move(v));
  return store;
}

}  // namespace langmix
