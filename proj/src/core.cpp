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

#include "poi/core.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "poi/text.hpp"

namespace poi {

namespace {

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static const int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) {
    return 0;
  }
  if (month == 2 && is_leap(year)) {
    return 29;
  }
  return table[month - 1];
}

bool has_outer_whitespace(const std::string& s) {
  if (s.empty()) {
    return false;
  }
  return std::isspace(static_cast<unsigned char>(s.front())) ||
         std::isspace(static_cast<unsigned char>(s.back()));
}

bool is_lowercased(const std::string& s) {
  // ASCII check only; non-ASCII text is normalized upstream by
  // normalize_text and not re-verified byte-by-byte here.
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return c < 0x80 && std::isupper(c);
  });
}

}  // namespace

std::optional<Date> Date::parse(const std::string& iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    return std::nullopt;
  }
  const std::string y = iso.substr(0, 4);
  const std::string m = iso.substr(5, 2);
  const std::string d = iso.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) {
    return std::nullopt;
  }
  Date date;
  date.year = std::stoi(y);
  date.month = std::stoi(m);
  date.day = std::stoi(d);
  if (!date.valid()) {
    return std::nullopt;
  }
  return date;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

bool Date::valid() const {
  return year >= 0 && year <= 9999 && month >= 1 && month <= 12 && day >= 1 &&
         day <= days_in_month(year, month);
}

int source_rank(const std::string& source, const SourceRanking& ranking,
                const std::set<std::string>& universe) {
  const auto& list = ranking.ordered_sources;
  const auto it = std::find(list.begin(), list.end(), source);
  if (it != list.end()) {
    return static_cast<int>(it - list.begin());
  }
  // Unlisted sources follow every listed one, in lexicographic order
  // among themselves so ranks stay a deterministic total order.
  int offset = 0;
  for (const std::string& other : universe) {
    if (std::find(list.begin(), list.end(), other) != list.end()) {
      continue;
    }
    if (other < source) {
      ++offset;
    }
  }
  return static_cast<int>(list.size()) + offset;
}

int source_rank(const std::string& source, const SourceRanking& ranking) {
  return source_rank(source, ranking, {source});
}

std::vector<std::string> validate_poi(const StandardPoi& poi) {
  std::vector<std::string> violations;

  if (poi.id.empty()) {
    violations.push_back("id empty");
  } else if (poi.id.find(':') == std::string::npos) {
    violations.push_back("id not source-prefixed (expected <source>:<id>)");
  }
  if (poi.source.empty()) {
    violations.push_back("source empty");
  } else if (!poi.id.empty() &&
             poi.id.rfind(poi.source + ":", 0) != 0) {
    violations.push_back("id prefix does not match source");
  }

  if (!poi.point.in_range()) {
    violations.push_back("point.lat/lon out of range");
  }
  if (poi.bound.has_value()) {
    if (!poi.bound->valid()) {
      violations.push_back("bound invalid (south>north or west>east)");
    } else if (!poi.bound->contains(poi.point)) {
      violations.push_back("point outside bound");
    }
  }

  for (const std::string& pt : poi.place_types) {
    if (pt.empty()) {
      violations.push_back("place_types contains empty label");
      break;
    }
  }
  for (const std::string& pt : poi.place_types) {
    if (!is_lowercased(pt) || has_outer_whitespace(pt)) {
      violations.push_back("place_types entry not normalized: '" + pt + "'");
    }
  }
  if (!is_lowercased(poi.name)) {
    violations.push_back("name not lowercased");
  }

  if (poi.address.has_value()) {
    const AddressComponents& a = *poi.address;
    if (a.any_component_set() && a.raw.empty()) {
      violations.push_back("address.raw empty while components set");
    }
    const std::string* fields[] = {&a.block_number, &a.street_name, &a.unit,
                                   &a.postal_code, &a.state, &a.country};
    for (const std::string* f : fields) {
      if (has_outer_whitespace(*f) || !is_lowercased(*f)) {
        violations.push_back("address component not normalized: '" + *f + "'");
        break;
      }
    }
  }

  if (!poi.extraction_date.valid()) {
    violations.push_back("extraction_date invalid");
  }
  return violations;
}

}  // namespace poi
