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

#ifndef POI_EVALUATION_HPP
#define POI_EVALUATION_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "poi/core.hpp"
#include "poi/matcher.hpp"

namespace poi {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
};

/// Standard counting with "match" as the positive class. Throws
/// std::invalid_argument on length mismatch or empty input.
ConfusionCounts confusion_counts(const std::vector<bool>& predictions,
                                 const std::vector<bool>& labels);

/// (tp+tn)/total. Throws std::invalid_argument when total is 0.
double overall_accuracy(const ConfusionCounts& c);

/// Mean of per-class recall. Throws std::invalid_argument unless both
/// classes appear in the labels.
double balanced_accuracy(const std::vector<bool>& predictions,
                         const std::vector<bool>& labels);

// ---------------------------------------------------------------------
// Coverage reporting.

/// Attributes whose presence is counted, in report column order.
const std::vector<std::string>& coverage_attributes();

struct CoverageRow {
  std::string source;  // source id, or "unified"
  int total = 0;
  std::map<std::string, int> present;  // attribute → count
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
};

/// Per-source presence counts; an attribute counts as present when
/// non-empty after normalization. The unified dataset (when given) is
/// reported as one extra row.
CoverageReport coverage_report(
    const std::map<std::string, std::vector<StandardPoi>>& by_source,
    const std::vector<StandardPoi>* unified);

/// Percentage string with 1 decimal place ("75.6").
std::string coverage_percent(int present, int total);

/// CSV (source,attribute columns) and aligned text renderings.
std::string coverage_to_csv(const CoverageReport& report);
std::string coverage_to_text(const CoverageReport& report);

// ---------------------------------------------------------------------
// Synthetic fixture generation.

/// Knobs for the synthetic corpus. Defaults are calibrated so that at
/// ~1,200 POIs roughly 2–3% of the labeled candidate pairs are matches.
struct FixtureConfig {
  std::uint64_t seed = 42;
  int n_pois = 1227;
  int n_sources = 5;
  double duplicate_rate = 0.14;  // open interval (0,1)

  double spacing_m = 47.0;   // street-grid pitch
  double jitter_m = 25.0;    // max coordinate perturbation per duplicate
  double label_radius_m = 100.0;

  double p_name_typo = 0.35;       // one-character edit in a name token
  double p_name_drop_token = 0.15; // drop one name token
  double p_name_token_swap = 0.5;  // reorder two name tokens
  double p_addr_abbrev = 0.5;      // "street" → "st" etc.
  double p_addr_drop_field = 0.3;  // drop postal code or block number
  double p_chain_name = 0.06;      // place reuses a nearby place's name
  double p_drop_place_type = 0.05;
  double p_extra_tag = 0.5;

  double origin_lat = 1.29;
  double origin_lon = 103.85;
};

struct Fixture {
  std::vector<StandardPoi> pois;
  // All cross-source pairs within label_radius_m, canonical orientation,
  // label = true iff both records describe the same underlying place.
  std::vector<FeaturePair> labeled_pairs;
};

/// Deterministic given the config. Throws std::invalid_argument when
/// duplicate_rate is outside (0,1) or sizes are non-positive.
Fixture generate_fixture(const FixtureConfig& config);

}  // namespace poi

#endif  // POI_EVALUATION_HPP
