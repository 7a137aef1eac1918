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

#include "poi/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "poi/normalization.hpp"
#include "poi/text.hpp"

namespace poi {

namespace {

// Meters per degree used for sizing index cells. Slightly below the true
// spherical value (~111,195 m on our radius) so cells are a little
// larger than nominal in real meters — the superset guarantee must err
// toward bigger cells, never smaller.
constexpr double kIndexMetersPerDegree = 111000.0;

constexpr double kPi = 3.14159265358979323846;

}  // namespace

SpatialGridIndex::SpatialGridIndex(const std::vector<StandardPoi>& pois,
                                   double cell_size_m)
    : cell_size_m_(cell_size_m) {
  double max_abs_lat = 0.0;
  for (const StandardPoi& p : pois) {
    max_abs_lat = std::max(max_abs_lat, std::abs(p.point.lat()));
  }
  lat_step_deg_ = cell_size_m / kIndexMetersPerDegree;
  // Longitude degrees shrink with latitude; size columns for the worst
  // latitude present so every cell spans ≥ cell_size_m meters.
  const double cos_lat =
      std::max(std::cos(max_abs_lat * kPi / 180.0), 1e-2);
  lon_step_deg_ = cell_size_m / (kIndexMetersPerDegree * cos_lat);

  for (std::size_t i = 0; i < pois.size(); ++i) {
    cells_[cell_key(pois[i].point)].push_back(i);
  }
}

std::int64_t SpatialGridIndex::cell_key(const GeoPoint& p) const {
  const auto row =
      static_cast<std::int64_t>(std::floor((p.lat() + 90.0) / lat_step_deg_));
  const auto col =
      static_cast<std::int64_t>(std::floor((p.lon() + 180.0) / lon_step_deg_));
  return (row << 32) | (col & 0xFFFFFFFFLL);
}

std::vector<std::size_t> SpatialGridIndex::candidates_near(const GeoPoint& p,
                                                           int ring) const {
  const auto row =
      static_cast<std::int64_t>(std::floor((p.lat() + 90.0) / lat_step_deg_));
  const auto col =
      static_cast<std::int64_t>(std::floor((p.lon() + 180.0) / lon_step_deg_));
  std::vector<std::size_t> out;
  for (std::int64_t dr = -ring; dr <= ring; ++dr) {
    for (std::int64_t dc = -ring; dc <= ring; ++dc) {
      const std::int64_t key = ((row + dr) << 32) | ((col + dc) & 0xFFFFFFFFLL);
      auto it = cells_.find(key);
      if (it != cells_.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  }
  return out;
}

std::vector<std::size_t> neighbors_within(const SpatialGridIndex& index,
                                          const std::vector<StandardPoi>& pois,
                                          std::size_t centroid,
                                          const NeighborOptions& options) {
  const StandardPoi& center = pois[centroid];
  const int ring = std::max(
      1, static_cast<int>(
             std::ceil(options.radius_m / index.cell_size_m() - 1e-12)));

  struct Hit {
    double distance;
    std::size_t idx;
  };
  std::vector<Hit> hits;
  for (std::size_t i : index.candidates_near(center.point, ring)) {
    if (i == centroid) {
      continue;
    }
    if (options.cross_source_only && pois[i].source == center.source) {
      continue;
    }
    const double d = haversine_m(center.point, pois[i].point);
    if (d <= options.radius_m) {
      hits.push_back({d, i});
    }
  }
  std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (a.distance != b.distance) {
      return a.distance < b.distance;
    }
    return pois[a.idx].id < pois[b.idx].id;
  });
  std::vector<std::size_t> out;
  out.reserve(hits.size());
  for (const Hit& h : hits) {
    out.push_back(h.idx);
  }
  return out;
}

double name_similarity(const std::string& a, const std::string& b) {
  std::vector<std::string> ta = tokenize_alnum(normalize_text(a));
  std::vector<std::string> tb = tokenize_alnum(normalize_text(b));
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  const std::string sa = join_tokens(ta);
  const std::string sb = join_tokens(tb);
  if (sa.empty() && sb.empty()) {
    return 1.0;
  }
  if (sa.empty() || sb.empty()) {
    return 0.0;
  }
  const std::size_t dist = levenshtein(sa, sb);
  const std::size_t max_len = std::max(sa.size(), sb.size());
  return 1.0 - static_cast<double>(dist) / static_cast<double>(max_len);
}

TfIdfModel fit_tfidf(const std::vector<std::string>& corpus) {
  if (corpus.empty()) {
    throw std::invalid_argument("fit_tfidf: empty corpus");
  }
  TfIdfModel model;
  model.doc_count = static_cast<int>(corpus.size());

  std::vector<int> df;
  bool any_token = false;
  for (const std::string& doc : corpus) {
    std::vector<std::string> tokens = tokenize_alnum(doc);
    if (!tokens.empty()) {
      any_token = true;
    }
    // Count each distinct token once per document.
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const std::string& t : tokens) {
      auto [it, inserted] =
          model.vocabulary.emplace(t, static_cast<int>(df.size()));
      if (inserted) {
        df.push_back(1);
      } else {
        ++df[it->second];
      }
    }
  }
  if (!any_token) {
    throw std::invalid_argument("fit_tfidf: every document is empty");
  }
  model.idf.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) {
    model.idf[i] =
        std::log(static_cast<double>(model.doc_count) / df[i]);
  }
  return model;
}

std::vector<std::pair<int, double>> tfidf_vector(const TfIdfModel& model,
                                                 const std::string& doc) {
  const std::vector<std::string> tokens = tokenize_alnum(doc);
  if (tokens.empty()) {
    return {};
  }
  std::unordered_map<int, int> counts;
  for (const std::string& t : tokens) {
    auto it = model.vocabulary.find(t);
    if (it != model.vocabulary.end()) {
      ++counts[it->second];
    }
  }
  std::vector<std::pair<int, double>> vec;
  vec.reserve(counts.size());
  const double len = static_cast<double>(tokens.size());
  for (const auto& [idx, count] : counts) {
    const double weight = (count / len) * model.idf[idx];
    if (weight != 0.0) {
      vec.emplace_back(idx, weight);
    }
  }
  std::sort(vec.begin(), vec.end());
  return vec;
}

double tfidf_cosine(const TfIdfModel& model, const std::string& a,
                    const std::string& b) {
  const auto va = tfidf_vector(model, a);
  const auto vb = tfidf_vector(model, b);
  if (va.empty() || vb.empty()) {
    return 0.0;
  }
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < va.size() && j < vb.size()) {
    if (va[i].first == vb[j].first) {
      dot += va[i].second * vb[j].second;
      ++i;
      ++j;
    } else if (va[i].first < vb[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  for (const auto& [idx, w] : va) {
    (void)idx;
    norm_a += w * w;
  }
  for (const auto& [idx, w] : vb) {
    (void)idx;
    norm_b += w * w;
  }
  if (norm_a == 0.0 || norm_b == 0.0) {
    return 0.0;
  }
  const double cos = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
  return std::clamp(cos, 0.0, 1.0);
}

double address_similarity(const TfIdfModel& model, const AddressComponents& a,
                          const AddressComponents& b) {
  return tfidf_cosine(model, canonical_address_string(a),
                      canonical_address_string(b));
}

}  // namespace poi
