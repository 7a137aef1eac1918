/*
 * Copyright 2026 The poiconflate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "poi/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "poi/text.hpp"

namespace poi {

namespace {

std::vector<double> parse_vector_line(const std::string& line,
                                      const std::string& path,
                                      std::size_t line_no, int dim,
                                      std::string* token_out) {
  std::istringstream ss(line);
  std::string token;
  if (!(ss >> token)) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": empty vector line");
  }
  std::vector<double> vec;
  vec.reserve(dim);
  double v = 0.0;
  while (ss >> v) {
    vec.push_back(v);
  }
  if (!ss.eof()) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": non-numeric vector component");
  }
  if (static_cast<int>(vec.size()) != dim) {
    throw std::runtime_error(
        path + ":" + std::to_string(line_no) + ": expected " +
        std::to_string(dim) + " components, got " + std::to_string(vec.size()));
  }
  *token_out = normalize_text(token);
  return vec;
}

void accumulate(std::vector<double>* sum, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    (*sum)[i] += v[i];
  }
}

// Mean of the character 3–6-gram vectors available for one word.
std::optional<std::vector<double>> subword_vector(const std::string& word,
                                                  const EmbeddingStore& store) {
  if (!store.has_subwords()) {
    return std::nullopt;
  }
  std::vector<double> sum(store.dim, 0.0);
  int found = 0;
  for (std::size_t n = 3; n <= 6; ++n) {
    if (word.size() < n) {
      break;
    }
    for (std::size_t i = 0; i + n <= word.size(); ++i) {
      auto it = store.subword_ngrams.find(word.substr(i, n));
      if (it != store.subword_ngrams.end()) {
        accumulate(&sum, it->second);
        ++found;
      }
    }
  }
  if (found == 0) {
    return std::nullopt;
  }
  for (double& x : sum) {
    x /= found;
  }
  return sum;
}

}  // namespace

EmbeddingStore load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open embeddings file: " + path);
  }
  std::string header;
  if (!std::getline(in, header) ||
      header.find_first_not_of(" \t\r") == std::string::npos) {
    throw std::runtime_error(path + ": missing header");
  }
  std::istringstream hs(header);
  long long count = 0;
  int dim = 0;
  if (!(hs >> count >> dim) || count < 0 || dim <= 0) {
    throw std::runtime_error(path + ":1: malformed header (want 'count dim')");
  }

  EmbeddingStore store;
  store.dim = dim;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::string token;
    std::vector<double> vec = parse_vector_line(line, path, line_no, dim,
                                                &token);
    store.vectors[token] = std::move(vec);
  }
  return store;
}

void load_subword_ngrams(const std::string& path, EmbeddingStore* store) {
  EmbeddingStore grams = load_embeddings(path);
  if (grams.dim != store->dim) {
    throw std::runtime_error(path + ": subword dimension " +
                             std::to_string(grams.dim) +
                             " != word dimension " + std::to_string(store->dim));
  }
  store->subword_ngrams = std::move(grams.vectors);
}

std::vector<std::string> decompose_label(const std::string& label) {
  const std::string norm = normalize_text(label);
  const std::vector<std::string> words = tokenize_alnum(norm);
  std::vector<std::string> out = words;
  if (words.size() > 1) {
    out.push_back(join_tokens(words));
  }
  return out;
}

std::optional<std::vector<double>> phrase_vector(const std::string& phrase,
                                                 const EmbeddingStore& store) {
  const std::vector<std::string> words = tokenize_alnum(normalize_text(phrase));
  if (words.empty() || store.dim <= 0) {
    return std::nullopt;
  }
  std::vector<double> sum(store.dim, 0.0);
  int found = 0;
  for (const std::string& w : words) {
    auto it = store.vectors.find(w);
    if (it != store.vectors.end()) {
      accumulate(&sum, it->second);
      ++found;
      continue;
    }
    if (auto sub = subword_vector(w, store)) {
      accumulate(&sum, *sub);
      ++found;
    }
  }
  if (found == 0) {
    return std::nullopt;
  }
  for (double& x : sum) {
    x /= found;
  }
  return sum;
}

double cosine_similarity(const std::vector<double>& x,
                         const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  }
  double dot = 0.0;
  double nx = 0.0;
  double ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0.0 || ny == 0.0) {
    return 0.0;
  }
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

TaxonomyMapping map_place_type(const std::string& label,
                               const std::vector<std::string>& target_labels,
                               const EmbeddingStore& store, double threshold) {
  TaxonomyMapping mapping;
  mapping.original_label = normalize_text(label);

  // Target vectors are shared across components; compute them once.
  std::vector<std::pair<std::string, std::vector<double>>> targets;
  targets.reserve(target_labels.size());
  for (const std::string& t : target_labels) {
    const std::string norm = normalize_text(t);
    if (auto vec = phrase_vector(norm, store)) {
      targets.emplace_back(norm, std::move(*vec));
    }
  }

  for (const std::string& component : decompose_label(label)) {
    const auto vec = phrase_vector(component, store);
    if (!vec.has_value()) {
      continue;
    }
    for (const auto& [target, tvec] : targets) {
      const double score = cosine_similarity(*vec, tvec);
      if (score >= threshold) {
        mapping.mapped_labels.insert(target);
        auto it = mapping.scores.find(target);
        if (it == mapping.scores.end() || score > it->second) {
          mapping.scores[target] = score;
        }
      }
    }
  }
  mapping.flagged = mapping.mapped_labels.empty();
  return mapping;
}

std::vector<std::pair<std::string, double>> suggest_labels(
    const std::string& label, const std::vector<std::string>& target_labels,
    const EmbeddingStore& store, std::size_t top_n) {
  std::vector<std::pair<std::string, double>> scored;
  for (const std::string& component : decompose_label(label)) {
    const auto vec = phrase_vector(component, store);
    if (!vec.has_value()) {
      continue;
    }
    for (const std::string& t : target_labels) {
      const std::string norm = normalize_text(t);
      if (auto tvec = phrase_vector(norm, store)) {
        const double score = cosine_similarity(*vec, *tvec);
        auto it = std::find_if(scored.begin(), scored.end(),
                               [&](const auto& p) { return p.first == norm; });
        if (it == scored.end()) {
          scored.emplace_back(norm, score);
        } else if (score > it->second) {
          it->second = score;
        }
      }
    }
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) {
      return a.second > b.second;
    }
    return a.first < b.first;
  });
  if (scored.size() > top_n) {
    scored.resize(top_n);
  }
  return scored;
}

std::vector<StandardPoi> apply_taxonomy(std::vector<StandardPoi> pois,
                                        const std::vector<std::string>& targets,
                                        const EmbeddingStore& store,
                                        const TaxonomyOptions& options) {
  for (StandardPoi& poi : pois) {
    if (options.passthrough_sources.count(poi.source) > 0) {
      continue;
    }
    std::set<std::string> mapped;
    bool any_flagged = false;
    for (const std::string& label : poi.place_types) {
      TaxonomyMapping m =
          map_place_type(label, targets, store, options.threshold);
      if (m.flagged) {
        any_flagged = true;
        poi.tags.insert(kUnmappedTypeTagPrefix + m.original_label);
      } else {
        mapped.insert(m.mapped_labels.begin(), m.mapped_labels.end());
      }
    }
    poi.place_types = std::move(mapped);
    if (any_flagged) {
      poi.requires_verification = true;
    }
  }
  return pois;
}

std::vector<std::string> load_target_taxonomy(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open taxonomy file: " + path);
  }
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    const std::string norm = normalize_text(line);
    if (norm.empty() || norm[0] == '#') {
      continue;
    }
    labels.push_back(norm);
  }
  return labels;
}

}  // namespace poi
