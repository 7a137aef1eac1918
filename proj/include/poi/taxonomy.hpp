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

#ifndef POI_TAXONOMY_HPP
#define POI_TAXONOMY_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "poi/core.hpp"

namespace poi {

/// Prefix for tags that preserve a place-type label the mapper could not
/// place in the target taxonomy; verification reads these back.
inline constexpr const char* kUnmappedTypeTagPrefix = "unmapped_type:";

/// token → dense vector store in the common pre-trained text format.
/// Immutable after loading; shared freely across threads.
struct EmbeddingStore {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
  // Optional character n-gram table backing out-of-vocabulary words.
  std::unordered_map<std::string, std::vector<double>> subword_ngrams;

  bool has_subwords() const { return !subword_ngrams.empty(); }
};

/// Parse "count dim" header plus one "token v1 .. vdim" row per line.
/// Throws std::runtime_error naming the offending line on malformed
/// rows or dimension mismatches.
EmbeddingStore load_embeddings(const std::string& path);

/// Load a subword n-gram table (same file format) into an existing store.
void load_subword_ngrams(const std::string& path, EmbeddingStore* store);

/// Result of mapping one source label onto the target taxonomy.
struct TaxonomyMapping {
  std::string original_label;
  std::set<std::string> mapped_labels;
  std::map<std::string, double> scores;  // mapped label → best cosine
  bool flagged = false;                  // true iff mapped_labels empty
};

/// "asian restaurant" → {"asian", "restaurant", "asian restaurant"}:
/// each word, then the full phrase when there is more than one word.
std::vector<std::string> decompose_label(const std::string& label);

/// Mean of the in-vocabulary word vectors; an OOV word falls back to the
/// mean of its character 3–6-gram vectors when a subword table exists.
/// Absent when nothing in the phrase can be vectorized.
std::optional<std::vector<double>> phrase_vector(const std::string& phrase,
                                                 const EmbeddingStore& store);

/// x·y / (‖x‖‖y‖); 0 when either norm is 0. Throws on dimension mismatch.
double cosine_similarity(const std::vector<double>& x,
                         const std::vector<double>& y);

/// Map one label: every decomposed component is compared against every
/// target label; targets scoring ≥ threshold are kept (all of them — a
/// label may map to multiple target types). No qualifying target means
/// flagged = true.
TaxonomyMapping map_place_type(const std::string& label,
                               const std::vector<std::string>& target_labels,
                               const EmbeddingStore& store,
                               double threshold = 0.95);

/// Top-n target labels by cosine against the label's phrase vector,
/// regardless of threshold — suggestion list for manual verification.
std::vector<std::pair<std::string, double>> suggest_labels(
    const std::string& label, const std::vector<std::string>& target_labels,
    const EmbeddingStore& store, std::size_t top_n = 5);

struct TaxonomyOptions {
  double threshold = 0.95;
  // Sources whose taxonomy already equals the target taxonomy skip
  // mapping entirely.
  std::set<std::string> passthrough_sources;
};

/// Map every POI's place types. Mapped labels replace the originals;
/// any unmappable label sets requires_verification and is preserved in
/// tags under kUnmappedTypeTagPrefix for later manual review.
std::vector<StandardPoi> apply_taxonomy(
    std::vector<StandardPoi> pois, const std::vector<std::string>& targets,
    const EmbeddingStore& store, const TaxonomyOptions& options);

/// One label per line, blank lines and '#' comments ignored.
std::vector<std::string> load_target_taxonomy(const std::string& path);

}  // namespace poi

#endif  // POI_TAXONOMY_HPP
