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

#ifndef POI_CORE_HPP
#define POI_CORE_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "poi/geo.hpp"

namespace poi {

/// ISO-8601 calendar date (day resolution; extraction timestamps do not
/// need finer granularity).
struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  static std::optional<Date> parse(const std::string& iso);
  std::string to_string() const;
  bool valid() const;

  friend bool operator==(const Date& a, const Date& b) {
    return a.year == b.year && a.month == b.month && a.day == b.day;
  }
  friend bool operator<(const Date& a, const Date& b) {
    if (a.year != b.year) return a.year < b.year;
    if (a.month != b.month) return a.month < b.month;
    return a.day < b.day;
  }
  friend bool operator<=(const Date& a, const Date& b) {
    return a == b || a < b;
  }
};

/// Segmented postal address. Empty string means "component absent"; raw
/// always preserves the original free-form text.
struct AddressComponents {
  std::string block_number;
  std::string street_name;
  std::string unit;
  std::string postal_code;
  std::string state;
  std::string country;
  std::string raw;

  bool any_component_set() const {
    return !block_number.empty() || !street_name.empty() || !unit.empty() ||
           !postal_code.empty() || !state.empty() || !country.empty();
  }
  bool empty() const { return !any_component_set() && raw.empty(); }

  friend bool operator==(const AddressComponents& a,
                         const AddressComponents& b) {
    return a.block_number == b.block_number && a.street_name == b.street_name &&
           a.unit == b.unit && a.postal_code == b.postal_code &&
           a.state == b.state && a.country == b.country && a.raw == b.raw;
  }
};

/// The canonical, source-independent POI record every stage exchanges.
/// Instances are treated as immutable once built; stages that change a
/// record produce a copy.
struct StandardPoi {
  std::string id;      // "<source>:<native-id>", globally unique
  std::string source;  // source identifier, lowercased
  GeoPoint point;
  std::optional<BoundingBox> bound;
  std::string name;  // empty = missing
  std::optional<AddressComponents> address;
  std::set<std::string> place_types;  // lowercased, deduplicated by set
  std::set<std::string> tags;         // free-form "key:value" strings
  Date extraction_date;
  bool requires_verification = false;

  bool has_name() const { return !name.empty(); }
  bool has_address() const {
    return address.has_value() && !address->empty();
  }
};

/// Source authority order, most authoritative first. Sources absent from
/// the list rank after every listed one, ordered lexicographically so the
/// total order stays deterministic.
struct SourceRanking {
  std::vector<std::string> ordered_sources;
};

/// Rank of `source` under `ranking`; 0 = most authoritative. Unlisted
/// sources get len(list) + their lexicographic position among all
/// unlisted sources seen in `universe` (pass the dataset's source set).
int source_rank(const std::string& source, const SourceRanking& ranking,
                const std::set<std::string>& universe);

/// Convenience overload when only listed-vs-single-unlisted matters:
/// unlisted sources all get rank len(list) (stable only if at most one
/// unlisted source is in play, so prefer the universe overload).
int source_rank(const std::string& source, const SourceRanking& ranking);

/// All invariant violations for one record; empty means well-formed.
/// Never throws — callers decide whether violations are fatal.
std::vector<std::string> validate_poi(const StandardPoi& poi);

}  // namespace poi

#endif  // POI_CORE_HPP
