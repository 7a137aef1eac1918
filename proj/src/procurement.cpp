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

#include "poi/procurement.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include "poi/toml.hpp"

namespace poi {

namespace {

constexpr int kMaxRecursionDepth = 30;

std::string rect_to_string(const BoundingBox& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "[%.7f,%.7f,%.7f,%.7f]", r.south, r.west,
                r.north, r.east);
  return buf;
}

// Query every page of one rectangle, stopping at the per-query cap or a
// short page. Returns the records plus whether the source reported more
// records than the cap.
QueryPage drain_tile(const BoundingBox& rect, PagedSource& source,
                     const PagedSourceConfig& config) {
  QueryPage out;
  int offset = 0;
  while (offset < config.max_results_per_query) {
    QueryPage page = source.query(rect, offset);
    out.capped = out.capped || page.capped;
    for (RawRecord& r : page.records) {
      if (static_cast<int>(out.records.size()) >=
          config.max_results_per_query) {
        break;
      }
      out.records.push_back(std::move(r));
    }
    if (static_cast<int>(page.records.size()) < config.page_size) {
      break;  // short page: rectangle exhausted
    }
    offset += config.page_size;
  }
  return out;
}

}  // namespace

PagedSourceConfig PagedSourceConfig::from_file(const std::string& path) {
  const toml::Table t = toml::parse_file(path);
  PagedSourceConfig cfg;
  cfg.source_id = t.require_string("source_id");
  cfg.page_size = static_cast<int>(t.get_int("page_size", cfg.page_size));
  cfg.max_results_per_query = static_cast<int>(
      t.get_int("max_results_per_query", cfg.max_results_per_query));
  cfg.base_url = t.get_string("base_url", "");
  cfg.api_key_env = t.get_string("api_key_env", "");
  cfg.requests_per_second =
      t.get_float("requests_per_second", cfg.requests_per_second);
  cfg.max_retries = static_cast<int>(t.get_int("max_retries", cfg.max_retries));
  if (cfg.page_size <= 0 || cfg.max_results_per_query <= 0 ||
      cfg.page_size > cfg.max_results_per_query) {
    throw std::runtime_error(path +
                             ": require 0 < page_size ≤ max_results_per_query");
  }
  return cfg;
}

FileBackedSource::FileBackedSource(std::vector<RawRecord> records,
                                   const PagedSourceConfig& config)
    : records_(std::move(records)), config_(config) {
  // Stable native_id order makes paging deterministic.
  std::sort(records_.begin(), records_.end(),
            [](const RawRecord& a, const RawRecord& b) {
              return a.native_id < b.native_id;
            });
  points_.reserve(records_.size());
  for (const RawRecord& r : records_) {
    const auto& props = r.payload.at("properties");
    points_.push_back(GeoPoint::unchecked(props.at("lat").get<double>(),
                                          props.at("lon").get<double>()));
  }
}

FileBackedSource FileBackedSource::from_ndjson(const std::string& path,
                                               const PagedSourceConfig& config) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open source data file: " + path);
  }
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    nlohmann::json feature;
    try {
      feature = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    RawRecord rec;
    rec.source_id = config.source_id;
    const auto& props = feature.at("properties");
    rec.native_id = props.at("native_id").is_string()
                        ? props.at("native_id").get<std::string>()
                        : props.at("native_id").dump();
    // Normalise lat/lon into properties so queries need not care whether
    // the file used a geometry object or bare fields.
    nlohmann::json payload = feature;
    if (!props.contains("lat") || !props.contains("lon")) {
      const auto& coords = feature.at("geometry").at("coordinates");
      payload["properties"]["lon"] = coords.at(0).get<double>();
      payload["properties"]["lat"] = coords.at(1).get<double>();
    }
    rec.payload = std::move(payload);
    records.push_back(std::move(rec));
  }
  return FileBackedSource(std::move(records), config);
}

QueryPage FileBackedSource::query(const BoundingBox& rect, int offset) {
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (rect.contains_half_open(points_[i])) {
      inside.push_back(i);
    }
  }
  QueryPage page;
  page.capped =
      static_cast<int>(inside.size()) > config_.max_results_per_query;
  const int end = std::min<int>(static_cast<int>(inside.size()),
                                offset + config_.page_size);
  for (int i = offset; i < end; ++i) {
    page.records.push_back(records_[inside[i]]);
  }
  return page;
}

HttpPagedSource::HttpPagedSource(const PagedSourceConfig& config)
    : config_(config) {
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key != nullptr) {
      api_key_ = key;
    }
  }
}

QueryPage HttpPagedSource::query(const BoundingBox& rect, int offset) {
  // Split base_url into host part and path prefix.
  std::string url = config_.base_url;
  std::string host = url;
  std::string path_prefix = "/";
  const auto scheme_end = url.find("://");
  const auto path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start != std::string::npos) {
    host = url.substr(0, path_start);
    path_prefix = url.substr(path_start);
  }

  char query[256];
  std::snprintf(query, sizeof(query), "?bbox=%.7f,%.7f,%.7f,%.7f&offset=%d",
                rect.south, rect.west, rect.north, rect.east, offset);
  std::string path = path_prefix + query;
  if (!api_key_.empty()) {
    path += "&key=" + api_key_;
  }

  if (config_.requests_per_second > 0.0) {
    const long long min_gap_us =
        static_cast<long long>(1e6 / config_.requests_per_second);
    const long long now = std::chrono::duration_cast<std::chrono::microseconds>(
                              std::chrono::steady_clock::now().time_since_epoch())
                              .count();
    if (now - last_request_us_ < min_gap_us) {
      std::this_thread::sleep_for(
          std::chrono::microseconds(min_gap_us - (now - last_request_us_)));
    }
  }

  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);

  int backoff_ms = 500;
  std::string body;
  bool ok = false;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Result res = client.Get(path);
    last_request_us_ = std::chrono::duration_cast<std::chrono::microseconds>(
                           std::chrono::steady_clock::now().time_since_epoch())
                           .count();
    if (res && res->status == 200) {
      body = res->body;
      ok = true;
      break;
    }
  }
  if (!ok) {
    throw std::runtime_error("HTTP source " + config_.source_id +
                             ": request failed after " +
                             std::to_string(config_.max_retries + 1) +
                             " attempts: " + path);
  }

  const nlohmann::json doc = nlohmann::json::parse(body);
  QueryPage page;
  page.capped = doc.value("capped", false);
  for (const auto& feature : doc.at("features")) {
    RawRecord rec;
    rec.source_id = config_.source_id;
    rec.native_id = feature.at("properties").at("native_id").is_string()
                        ? feature["properties"]["native_id"].get<std::string>()
                        : feature["properties"]["native_id"].dump();
    rec.payload = feature;
    page.records.push_back(std::move(rec));
  }
  return page;
}

std::vector<Tile> plan_initial_grid(const Polygon& study_area, double width_m,
                                    double height_m) {
  if (study_area.degenerate()) {
    throw std::invalid_argument("plan_initial_grid: degenerate study area");
  }
  if (width_m <= 0.0 || height_m <= 0.0) {
    throw std::invalid_argument("plan_initial_grid: tile sizes must be > 0");
  }
  const BoundingBox box = study_area.bounding_box();
  const double tile_h_deg = meters_to_lat_degrees(height_m);
  const double tile_w_deg = meters_to_lon_degrees(width_m, box.south);

  // Tiny epsilon so an exact multiple of the tile size does not gain a
  // spurious extra row/column from floating-point noise.
  const auto count = [](double span, double step) {
    return std::max(1, static_cast<int>(std::ceil(span / step - 1e-9)));
  };
  const int rows = count(box.north - box.south, tile_h_deg);
  const int cols = count(box.east - box.west, tile_w_deg);

  std::vector<Tile> tiles;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Tile t;
      t.rect.south = box.south + r * tile_h_deg;
      t.rect.north = t.rect.south + tile_h_deg;
      t.rect.west = box.west + c * tile_w_deg;
      t.rect.east = t.rect.west + tile_w_deg;
      t.width_m = width_m;
      t.height_m = height_m;
      t.depth = 0;
      if (rect_intersects_polygon(t.rect, study_area)) {
        tiles.push_back(t);
      }
    }
  }
  return tiles;
}

std::vector<Tile> subdivide(const Tile& tile) {
  const double mid_lat = (tile.rect.south + tile.rect.north) / 2.0;
  const double mid_lon = (tile.rect.west + tile.rect.east) / 2.0;
  // Splitting the degree rectangle at its midpoints keeps the four
  // half-open children an exact partition of the parent.
  Tile sw{{tile.rect.south, tile.rect.west, mid_lat, mid_lon},
          tile.width_m / 2.0,
          tile.height_m / 2.0,
          tile.depth + 1};
  Tile se{{tile.rect.south, mid_lon, mid_lat, tile.rect.east},
          tile.width_m / 2.0,
          tile.height_m / 2.0,
          tile.depth + 1};
  Tile nw{{mid_lat, tile.rect.west, tile.rect.north, mid_lon},
          tile.width_m / 2.0,
          tile.height_m / 2.0,
          tile.depth + 1};
  Tile ne{{mid_lat, mid_lon, tile.rect.north, tile.rect.east},
          tile.width_m / 2.0,
          tile.height_m / 2.0,
          tile.depth + 1};
  return {sw, se, nw, ne};
}

FetchResult fetch_recursive(const Tile& tile, PagedSource& source,
                            const PagedSourceConfig& config,
                            double min_dim_m) {
  if (tile.depth > kMaxRecursionDepth) {
    throw std::runtime_error("fetch_recursive: recursion depth exceeded at " +
                             rect_to_string(tile.rect));
  }
  QueryPage result;
  try {
    result = drain_tile(tile.rect, source, config);
  } catch (const std::exception& e) {
    throw std::runtime_error("fetch failed for tile " +
                             rect_to_string(tile.rect) + ": " + e.what());
  }

  FetchResult out;
  if (!result.capped) {
    out.records = std::move(result.records);
    return out;
  }

  const bool can_split =
      tile.width_m / 2.0 >= min_dim_m && tile.height_m / 2.0 >= min_dim_m;
  if (!can_split) {
    out.records = std::move(result.records);
    out.warnings.push_back(
        "truncated tile " + rect_to_string(tile.rect) + " (" +
        std::to_string(tile.width_m) + "m x " + std::to_string(tile.height_m) +
        "m): result capped but children would fall below the " +
        std::to_string(min_dim_m) + "m floor");
    return out;
  }

  for (const Tile& child : subdivide(tile)) {
    FetchResult sub = fetch_recursive(child, source, config, min_dim_m);
    out.records.insert(out.records.end(),
                       std::make_move_iterator(sub.records.begin()),
                       std::make_move_iterator(sub.records.end()));
    out.warnings.insert(out.warnings.end(),
                        std::make_move_iterator(sub.warnings.begin()),
                        std::make_move_iterator(sub.warnings.end()));
  }
  return out;
}

std::vector<RawRecord> dedupe_by_id(const std::vector<RawRecord>& records) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<RawRecord> out;
  out.reserve(records.size());
  for (const RawRecord& r : records) {
    if (seen.emplace(r.source_id, r.native_id).second) {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace poi
