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

#ifndef POI_PERSISTENCE_HPP
#define POI_PERSISTENCE_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "poi/core.hpp"
#include "poi/matcher.hpp"
#include "poi/procurement.hpp"
#include "poi/unification.hpp"

namespace poi {

enum class DatasetFormat { kGeoJson, kNdjson };

/// ".geojson"/".json" → GeoJSON FeatureCollection, anything else →
/// newline-delimited features.
DatasetFormat format_from_path(const std::string& path);

struct LoadReport {
  std::vector<StandardPoi> pois;
  // Per-record parse problems ("line 12: non-Point geometry"); the rest
  // of the file still loads.
  std::vector<std::string> errors;
};

/// Parse a dataset written by save_dataset (or hand-built in the same
/// shape). Unified provenance fields are folded into tags-less POI
/// loading — contributing ids/sources round-trip via save_unified /
/// load_unified below. Throws std::runtime_error on file-level problems.
LoadReport load_dataset(const std::string& path, DatasetFormat format);
LoadReport load_dataset(const std::string& path);

/// Deterministic writer: records sorted by id, fixed field order,
/// coordinates rounded to 7 decimals. Writing the same dataset twice
/// yields byte-identical files.
void save_dataset(const std::vector<StandardPoi>& pois,
                  const std::string& path, DatasetFormat format);
void save_dataset(const std::vector<StandardPoi>& pois,
                  const std::string& path);

/// Unified datasets keep provenance; loading returns both the records
/// and their contributing id/source sets.
void save_unified(const std::vector<UnifiedPoi>& pois,
                  const std::string& path, DatasetFormat format);
std::vector<UnifiedPoi> load_unified(const std::string& path);

/// Raw procurement records as newline-delimited JSON.
void save_raw_records(const std::vector<RawRecord>& records,
                      const std::string& path);
std::vector<RawRecord> load_raw_records(const std::string& path,
                                        const std::string& source_id);

/// Decided pairs CSV: id_a,id_b,s_name,s_address,probability,decision.
void save_decided_pairs(const std::vector<DecidedPair>& pairs,
                        const std::string& path);

/// Labeled pairs CSV (id_a,id_b,label with label ∈ {match,non_match}).
void save_labeled_pairs(const std::vector<FeaturePair>& pairs,
                        const std::string& path);
std::map<std::pair<std::string, std::string>, bool> load_labeled_pairs(
    const std::string& path);

/// Read back either CSV flavour as pair → boolean decision. For decided
/// CSVs the `decision` column is used; for labeled CSVs, `label`.
std::map<std::pair<std::string, std::string>, bool> load_pair_decisions(
    const std::string& path);

/// Match pairs only (decision/label true), for unification input.
std::vector<std::pair<std::string, std::string>> load_match_pairs(
    const std::string& path);

/// Model round-trip as self-describing JSON with a format_version field.
void save_model(const MatchModel& model, const std::string& path);
MatchModel load_model(const std::string& path);

/// Study-area polygon from GeoJSON (Polygon geometry, Feature, or
/// FeatureCollection; first polygon's outer ring is used).
Polygon load_polygon(const std::string& path);

/// Hex-encoded SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

/// Round to 7 decimal places (~1 cm) — the serialized coordinate
/// precision.
double round_coord(double value);

}  // namespace poi

#endif  // POI_PERSISTENCE_HPP
