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

#ifndef POI_SIMILARITY_HPP
#define POI_SIMILARITY_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "poi/core.hpp"

namespace poi {

/// Uniform lat/lon grid over POI positions. Cells are sized so that a
/// radius-r query is always answered by the (2k+1)x(2k+1) cell block
/// around the query point; the final haversine filter makes results
/// exact. Immutable after construction.
class SpatialGridIndex {
 public:
  SpatialGridIndex(const std::vector<StandardPoi>& pois,
                   double cell_size_m = 100.0);

  double cell_size_m() const { return cell_size_m_; }

  /// Indices (into the construction vector) of POIs in cells within
  /// `ring` cells of p's cell — a superset of any radius query with
  /// radius ≤ ring * cell_size_m.
  std::vector<std::size_t> candidates_near(const GeoPoint& p,
                                           int ring) const;

 private:
  std::int64_t cell_key(const GeoPoint& p) const;

  double cell_size_m_;
  double lat_step_deg_;
  double lon_step_deg_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

struct NeighborOptions {
  double radius_m = 100.0;
  // When set (the default), POIs from the centroid's own source are not
  // candidates; duplicates are sought across sources.
  bool cross_source_only = true;
};

/// Exactly the POIs within radius_m (inclusive) of the centroid, itself
/// excluded, sorted by (distance, id). Returns indices into `pois`.
std::vector<std::size_t> neighbors_within(const SpatialGridIndex& index,
                                          const std::vector<StandardPoi>& pois,
                                          std::size_t centroid,
                                          const NeighborOptions& options);

/// Token-sort string similarity: lowercase, tokenize, sort tokens,
/// rejoin, then 1 - levenshtein/max-length. Both empty → 1; exactly one
/// empty → 0.
double name_similarity(const std::string& a, const std::string& b);

/// TF-IDF weights over a small corpus. TF(t,d) = count(t,d)/|d|;
/// IDF(t) = ln(|D|/df_t), no smoothing, so a token present in every
/// document carries weight 0.
struct TfIdfModel {
  std::unordered_map<std::string, int> vocabulary;  // token → dense index
  std::vector<double> idf;
  int doc_count = 0;
};

/// Fit on tokenized documents. Documents that tokenize to nothing
/// contribute to |D| but no vocabulary. Throws std::invalid_argument if
/// the corpus is empty or no document has any token.
TfIdfModel fit_tfidf(const std::vector<std::string>& corpus);

/// Sparse TF-IDF vector of one document, sorted by vocabulary index.
/// Tokens outside the model vocabulary are ignored.
std::vector<std::pair<int, double>> tfidf_vector(const TfIdfModel& model,
                                                 const std::string& doc);

/// Cosine of the two documents' TF-IDF vectors, clamped to [0,1]; either
/// vector zero → 0.
double tfidf_cosine(const TfIdfModel& model, const std::string& a,
                    const std::string& b);

/// tfidf_cosine over the canonical rendering of two addresses.
double address_similarity(const TfIdfModel& model, const AddressComponents& a,
                          const AddressComponents& b);

}  // namespace poi

#endif  // POI_SIMILARITY_HPP
