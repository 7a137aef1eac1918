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

#ifndef POI_PROCUREMENT_HPP
#define POI_PROCUREMENT_HPP

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poi/geo.hpp"

namespace poi {

/// One query rectangle in the recursive fetching scheme. The rectangle
/// is half-open ([south,north) x [west,east)) so sibling tiles never
/// share records; width_m/height_m track the nominal edge lengths used
/// against the minimum-dimension floor.
struct Tile {
  BoundingBox rect;  // degrees, half-open
  double width_m = 0.0;
  double height_m = 0.0;
  int depth = 0;
};

/// Behaviour of a paged source: at most page_size records per page, at
/// most max_results_per_query records per rectangle no matter how many
/// pages are requested.
struct PagedSourceConfig {
  std::string source_id;
  int page_size = 20;
  int max_results_per_query = 60;
  std::string base_url;     // HTTP adapter only
  std::string api_key_env;  // HTTP adapter only
  double requests_per_second = 0.0;  // 0 = unthrottled
  int max_retries = 3;

  static PagedSourceConfig from_file(const std::string& path);
};

/// Pre-standardisation record: the payload keeps whatever shape the
/// source emitted; normalization interprets it via a SourceProfile.
struct RawRecord {
  std::string source_id;
  std::string native_id;
  nlohmann::json payload;
};

/// One page of query results. `capped` reports whether the rectangle
/// holds more records than max_results_per_query — the signal that
/// drives subdivision.
struct QueryPage {
  std::vector<RawRecord> records;
  bool capped = false;
};

/// A source answering "records inside this rectangle, from this offset".
/// Implementations must tolerate concurrent calls.
class PagedSource {
 public:
  virtual ~PagedSource() = default;
  virtual QueryPage query(const BoundingBox& rect, int offset) = 0;
};

/// In-memory/file-backed source over newline-delimited GeoJSON features.
/// Records are matched against query rectangles with the half-open rule
/// and returned in native_id order.
class FileBackedSource : public PagedSource {
 public:
  FileBackedSource(std::vector<RawRecord> records,
                   const PagedSourceConfig& config);
  static FileBackedSource from_ndjson(const std::string& path,
                                      const PagedSourceConfig& config);

  QueryPage query(const BoundingBox& rect, int offset) override;

  const std::vector<RawRecord>& records() const { return records_; }
  const std::vector<GeoPoint>& points() const { return points_; }

 private:
  std::vector<RawRecord> records_;
  std::vector<GeoPoint> points_;
  PagedSourceConfig config_;
};

/// HTTP adapter skeleton: GET {base_url}?bbox={s},{w},{n},{e}&offset={k}
/// expecting {"features": [...], "capped": bool} back. Retries each page
/// with exponential backoff and honours a requests-per-second throttle.
/// No vendor-specific payload interpretation happens here.
class HttpPagedSource : public PagedSource {
 public:
  explicit HttpPagedSource(const PagedSourceConfig& config);
  QueryPage query(const BoundingBox& rect, int offset) override;

 private:
  PagedSourceConfig config_;
  std::string api_key_;
  long long last_request_us_ = 0;
};

/// Grid of width_m x height_m tiles covering the study area's bounding
/// box, row-major from the southwest corner, keeping only tiles whose
/// rectangle shares interior area with the polygon. Throws
/// std::invalid_argument on a degenerate polygon or non-positive sizes.
std::vector<Tile> plan_initial_grid(const Polygon& study_area, double width_m,
                                    double height_m);

struct FetchResult {
  std::vector<RawRecord> records;
  std::vector<std::string> warnings;  // truncation notices
};

/// Recursive variable-bounding-box fetch: query the tile; if the source
/// caps the result and halving both dimensions stays ≥ min_dim_m, split
/// into 4 half-size children and recurse in SW, SE, NW, NE order;
/// if halving would fall below the floor, keep the capped results and
/// record a truncation warning. Depth > 30 aborts via std::runtime_error.
FetchResult fetch_recursive(const Tile& tile, PagedSource& source,
                            const PagedSourceConfig& config,
                            double min_dim_m = 25.0);

/// Keep the first occurrence of each (source_id, native_id), preserving
/// the order of survivors.
std::vector<RawRecord> dedupe_by_id(const std::vector<RawRecord>& records);

/// Subdivide into the four half-dimension children, SW, SE, NW, NE.
/// Exposed for tests; fetch_recursive uses it internally.
std::vector<Tile> subdivide(const Tile& tile);

}  // namespace poi

#endif  // POI_PROCUREMENT_HPP
