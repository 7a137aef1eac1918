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

#include "poi/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "poi/normalization.hpp"
#include "poi/rng.hpp"
#include "poi/similarity.hpp"
#include "poi/text.hpp"

namespace poi {

ConfusionCounts confusion_counts(const std::vector<bool>& predictions,
                                 const std::vector<bool>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("confusion_counts: length mismatch");
  }
  if (predictions.empty()) {
    throw std::invalid_argument("confusion_counts: empty input");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      (predictions[i] ? c.tp : c.fn) += 1;
    } else {
      (predictions[i] ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double overall_accuracy(const ConfusionCounts& c) {
  if (c.total() <= 0) {
    throw std::invalid_argument("overall_accuracy: zero total");
  }
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double balanced_accuracy(const std::vector<bool>& predictions,
                         const std::vector<bool>& labels) {
  const ConfusionCounts c = confusion_counts(predictions, labels);
  if (c.tp + c.fn == 0 || c.tn + c.fp == 0) {
    throw std::invalid_argument("balanced_accuracy: labels are single-class");
  }
  const double recall_pos =
      static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double recall_neg =
      static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  return (recall_pos + recall_neg) / 2.0;
}

const std::vector<std::string>& coverage_attributes() {
  static const std::vector<std::string> kAttributes = {
      "coordinates", "address", "name", "place_type", "tags"};
  return kAttributes;
}

namespace {

bool attribute_present(const StandardPoi& poi, const std::string& attribute) {
  if (attribute == "coordinates") {
    return poi.point.in_range();
  }
  if (attribute == "address") {
    return poi.has_address() &&
           !canonical_address_string(*poi.address).empty();
  }
  if (attribute == "name") {
    return poi.has_name();
  }
  if (attribute == "place_type") {
    return !poi.place_types.empty();
  }
  if (attribute == "tags") {
    return !poi.tags.empty();
  }
  return false;
}

CoverageRow make_row(const std::string& source,
                     const std::vector<StandardPoi>& pois) {
  CoverageRow row;
  row.source = source;
  row.total = static_cast<int>(pois.size());
  for (const std::string& attr : coverage_attributes()) {
    int count = 0;
    for (const StandardPoi& poi : pois) {
      if (attribute_present(poi, attr)) {
        ++count;
      }
    }
    row.present[attr] = count;
  }
  return row;
}

}  // namespace

CoverageReport coverage_report(
    const std::map<std::string, std::vector<StandardPoi>>& by_source,
    const std::vector<StandardPoi>* unified) {
  CoverageReport report;
  for (const auto& [source, pois] : by_source) {
    report.rows.push_back(make_row(source, pois));
  }
  if (unified != nullptr) {
    report.rows.push_back(make_row("unified", *unified));
  }
  return report;
}

std::string coverage_percent(int present, int total) {
  const double pct =
      total > 0 ? 100.0 * static_cast<double>(present) / total : 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", pct);
  return buf;
}

std::string coverage_to_csv(const CoverageReport& report) {
  std::ostringstream out;
  out << "source,total";
  for (const std::string& attr : coverage_attributes()) {
    out << "," << attr << "_count," << attr << "_pct";
  }
  out << "\n";
  for (const CoverageRow& row : report.rows) {
    out << row.source << "," << row.total;
    for (const std::string& attr : coverage_attributes()) {
      const int count = row.present.count(attr) > 0 ? row.present.at(attr) : 0;
      out << "," << count << "," << coverage_percent(count, row.total);
    }
    out << "\n";
  }
  return out.str();
}

std::string coverage_to_text(const CoverageReport& report) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %8s", "source", "total");
  out << buf;
  for (const std::string& attr : coverage_attributes()) {
    std::snprintf(buf, sizeof(buf), " %18s", attr.c_str());
    out << buf;
  }
  out << "\n";
  for (const CoverageRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-12s %8d", row.source.c_str(),
                  row.total);
    out << buf;
    for (const std::string& attr : coverage_attributes()) {
      const int count = row.present.count(attr) > 0 ? row.present.at(attr) : 0;
      const std::string cell = std::to_string(count) + " (" +
                               coverage_percent(count, row.total) + "%)";
      std::snprintf(buf, sizeof(buf), " %18s", cell.c_str());
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------
// Fixture generation.

namespace {

const std::vector<std::string>& adjectives() {
  static const std::vector<std::string> kWords = {
      "golden",  "jade",    "sunrise", "harbour", "lucky",   "grand",
      "silver",  "emerald", "coastal", "garden",  "royal",   "summit",
      "amber",   "crystal", "velvet",  "bamboo",  "lotus",   "pearl",
      "crimson", "azure",   "maple",   "orchid",  "saffron", "ivory"};
  return kWords;
}

const std::vector<std::string>& nouns() {
  static const std::vector<std::string> kWords = {
      "dragon",  "phoenix", "tiger",   "sparrow", "anchor",  "lantern",
      "compass", "harvest", "meadow",  "willow",  "falcon",  "breeze",
      "ember",   "horizon", "lagoon",  "canopy",  "monsoon", "pagoda",
      "mariner", "trellis", "granite", "sable",   "zinnia",  "quill"};
  return kWords;
}

const std::vector<std::string>& place_kinds() {
  static const std::vector<std::string> kWords = {
      "cafe",     "restaurant", "bakery", "clinic", "pharmacy", "salon",
      "mart",     "bookstore",  "gym",    "studio", "bar",      "hotel"};
  return kWords;
}

const std::vector<std::string>& street_bases() {
  static const std::vector<std::string> kWords = {
      "tampines", "simei",   "bedok",    "clementi", "yishun",  "kallang",
      "punggol",  "sengkang", "hougang", "bishan",   "queenstown",
      "woodlands", "serangoon", "jurong", "novena",  "marsiling"};
  return kWords;
}

// One underlying real-world place; every emitted record of the place
// carries the same place index.
struct PlaceSeed {
  int index = 0;
  GeoPoint point;
  std::string name;
  std::string block;
  std::string street;
  std::string postal;
  std::string kind;
};

GeoPoint offset_point(const GeoPoint& base, double north_m, double east_m) {
  const double lat = base.lat() + meters_to_lat_degrees(north_m);
  const double lon = base.lon() + meters_to_lon_degrees(east_m, base.lat());
  return GeoPoint::unchecked(lat, lon);
}

// Clamp to the serialized coordinate precision so distances — and with
// them the labeled pair set — are identical whether the fixture is used
// in memory or round-tripped through a dataset file.
GeoPoint snap_to_grid(const GeoPoint& p) {
  return GeoPoint::unchecked(std::round(p.lat() * 1e7) / 1e7,
                             std::round(p.lon() * 1e7) / 1e7);
}

std::string mutate_token(const std::string& token, Rng* rng) {
  if (token.empty()) {
    return token;
  }
  std::string out = token;
  const std::size_t pos = rng->bounded(out.size());
  if (out.size() > 3 && rng->uniform01() < 0.5) {
    out.erase(pos, 1);  // deletion
  } else {
    out[pos] = static_cast<char>('a' + rng->bounded(26));  // substitution
  }
  return out;
}

std::string perturb_name(const std::string& name, const FixtureConfig& cfg,
                         Rng* rng) {
  std::vector<std::string> tokens = split_ws(name);
  if (tokens.size() > 1 && rng->uniform01() < cfg.p_name_drop_token) {
    tokens.erase(tokens.begin() + rng->bounded(tokens.size()));
  }
  if (rng->uniform01() < cfg.p_name_typo && !tokens.empty()) {
    const std::size_t i = rng->bounded(tokens.size());
    tokens[i] = mutate_token(tokens[i], rng);
  }
  if (tokens.size() > 1 && rng->uniform01() < cfg.p_name_token_swap) {
    const std::size_t i = rng->bounded(tokens.size());
    const std::size_t j = rng->bounded(tokens.size());
    std::swap(tokens[i], tokens[j]);
  }
  return join_tokens(tokens);
}

std::string abbreviate_street(const std::string& street, Rng* rng) {
  std::vector<std::string> tokens = split_ws(street);
  for (std::string& t : tokens) {
    if (t == "street") {
      t = "st";
    } else if (t == "avenue") {
      t = "ave";
    } else if (t == "road") {
      t = "rd";
    } else if (t == "drive" && rng->uniform01() < 0.5) {
      t = "dr";
    }
  }
  return join_tokens(tokens);
}

}  // namespace

Fixture generate_fixture(const FixtureConfig& cfg) {
  if (cfg.duplicate_rate <= 0.0 || cfg.duplicate_rate >= 1.0) {
    throw std::invalid_argument(
        "generate_fixture: duplicate_rate must be in (0,1)");
  }
  if (cfg.n_pois <= 0 || cfg.n_sources < 2) {
    throw std::invalid_argument(
        "generate_fixture: need n_pois > 0 and n_sources ≥ 2");
  }

  Rng rng(derive_seed(cfg.seed, "fixture"));
  Fixture fixture;
  fixture.pois.reserve(cfg.n_pois);

  const auto& adj = adjectives();
  const auto& noun = nouns();
  const auto& kinds = place_kinds();
  const auto& streets = street_bases();
  const int combos =
      static_cast<int>(adj.size() * noun.size() * kinds.size());

  // Streets run east-west: row j is one street; buildings i sit along
  // it at the grid pitch.
  const int side = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(cfg.n_pois)))) + 2;

  std::vector<PlaceSeed> recent_places;  // for chain-name reuse
  int place_index = 0;
  int emitted = 0;

  while (emitted < cfg.n_pois) {
    const int i = place_index % side;  // column along the street
    const int j = place_index / side;  // street row
    PlaceSeed place;
    place.index = place_index;

    const double jitter_n = rng.uniform(-0.3, 0.3) * cfg.spacing_m;
    const double jitter_e = rng.uniform(-0.3, 0.3) * cfg.spacing_m;
    place.point = offset_point(
        GeoPoint::unchecked(cfg.origin_lat, cfg.origin_lon),
        j * cfg.spacing_m + jitter_n, i * cfg.spacing_m + jitter_e);

    const std::string street_base = streets[j % streets.size()];
    place.street =
        street_base + " street " + std::to_string(j / streets.size() + 1);
    place.block = std::to_string(100 + i);
    char postal[8];
    std::snprintf(postal, sizeof(postal), "%06d",
                  (520000 + place_index * 7) % 1000000);
    place.postal = postal;

    // Name: a combination unique within any local window (the 83x83
    // tiling is injective there), except that some places reuse the name
    // of an adjacent place — chain outlets, the hard non-matches that a
    // pure name comparison cannot tell apart.
    const int c = (i % 83) * 83 + (j % 83);
    const int cc = c % combos;
    place.kind = kinds[cc % kinds.size()];
    place.name = adj[cc / (noun.size() * kinds.size())] + " " +
                 noun[(cc / kinds.size()) % noun.size()] + " " + place.kind;
    if (!recent_places.empty() && rng.uniform01() < cfg.p_chain_name) {
      // Borrow from a neighbouring cell (previous column or the cell one
      // street row down) so the twin pair lands inside the label radius.
      const int offsets[3] = {1, side, side + 1};
      const int d = offsets[rng.bounded(3)];
      if (static_cast<int>(recent_places.size()) >= d) {
        place.name = recent_places[recent_places.size() - d].name;
      }
    }

    // Number of records for this place: geometric chain capped at the
    // source count (copies live on distinct sources so duplicates are
    // cross-source, matching the matcher's default candidate rule).
    int copies = 1;
    while (copies < cfg.n_sources &&
           rng.uniform01() < cfg.duplicate_rate) {
      ++copies;
    }
    copies = std::min(copies, cfg.n_pois - emitted);

    std::vector<std::size_t> source_pick =
        rng.sample_without_replacement(cfg.n_sources, copies);

    for (int copy = 0; copy < copies; ++copy) {
      StandardPoi poi;
      poi.source = "s" + std::to_string(source_pick[copy] + 1);
      poi.id = poi.source + ":p" + std::to_string(place.index) + "_" +
               std::to_string(copy);

      std::string name = place.name;
      std::string street = place.street;
      std::string block = place.block;
      std::string postal_code = place.postal;
      GeoPoint point = place.point;

      if (copy > 0) {
        const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double dist = rng.uniform(0.0, cfg.jitter_m);
        point = offset_point(point, dist * std::cos(angle),
                             dist * std::sin(angle));
        name = perturb_name(name, cfg, &rng);
        if (rng.uniform01() < cfg.p_addr_abbrev) {
          street = abbreviate_street(street, &rng);
        }
        if (rng.uniform01() < cfg.p_addr_drop_field) {
          if (rng.uniform01() < 0.5) {
            postal_code.clear();
          } else {
            block.clear();
          }
        }
      }

      poi.point = snap_to_grid(point);
      poi.name = normalize_text(name);

      AddressComponents address;
      address.block_number = block;
      address.street_name = street;
      address.postal_code = postal_code;
      address.country = "singapore";
      address.raw = canonical_address_string(address);
      poi.address = address;

      if (rng.uniform01() >= cfg.p_drop_place_type) {
        poi.place_types.insert(place.kind);
      }
      if (rng.uniform01() < cfg.p_extra_tag) {
        poi.tags.insert("district:d" + std::to_string(j / 10));
      }

      Date date{2020, 1, 1};
      const int day_offset = static_cast<int>(rng.bounded(364));
      date.month = 1 + day_offset / 31;
      date.day = 1 + day_offset % 28;
      poi.extraction_date = date;

      fixture.pois.push_back(std::move(poi));
      ++emitted;
    }

    recent_places.push_back(place);
    ++place_index;
  }

  // Exhaustive cross-source labels within the candidate radius, using
  // the same spatial index the matcher uses.
  const SpatialGridIndex index(fixture.pois,
                               std::max(cfg.label_radius_m, 1.0));
  const auto place_of = [](const StandardPoi& poi) {
    // id shape: <source>:p<place>_<copy>
    const std::size_t p = poi.id.find(":p");
    const std::size_t underscore = poi.id.rfind('_');
    return poi.id.substr(p + 2, underscore - (p + 2));
  };
  NeighborOptions nopt;
  nopt.radius_m = cfg.label_radius_m;
  nopt.cross_source_only = true;
  for (std::size_t i = 0; i < fixture.pois.size(); ++i) {
    for (std::size_t n : neighbors_within(index, fixture.pois, i, nopt)) {
      if (fixture.pois[i].id < fixture.pois[n].id) {
        FeaturePair pair;
        pair.id_a = fixture.pois[i].id;
        pair.id_b = fixture.pois[n].id;
        pair.label = place_of(fixture.pois[i]) == place_of(fixture.pois[n]);
        fixture.labeled_pairs.push_back(std::move(pair));
      }
    }
  }
  std::sort(fixture.labeled_pairs.begin(), fixture.labeled_pairs.end(),
            [](const FeaturePair& a, const FeaturePair& b) {
              if (a.id_a != b.id_a) {
                return a.id_a < b.id_a;
              }
              return a.id_b < b.id_b;
            });
  return fixture;
}

}  // namespace poi
