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

#ifndef POI_NORMALIZATION_HPP
#define POI_NORMALIZATION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poi/core.hpp"
#include "poi/procurement.hpp"

namespace poi {

/// Vocabulary driving the rule-based address parser. Tokens must be
/// lowercase single words.
struct AddressVocabulary {
  std::vector<std::string> states;
  std::vector<std::string> countries;

  static AddressVocabulary defaults();
  /// TOML file with `states = [...]` and `countries = [...]`.
  static AddressVocabulary from_file(const std::string& path);
};

/// Deterministic rule-based segmentation of a free-form address. Never
/// fails: text that matches no rule lands in street_name; raw always
/// preserves the input verbatim.
AddressComponents parse_address(const std::string& raw,
                                const AddressVocabulary& vocab =
                                    AddressVocabulary::defaults());

/// Render components back to one line in the fixed order block → street
/// → unit (with '#' restored) → state → country, postal code last.
/// parse_address(canonical_address_string(parse_address(x))) equals
/// parse_address(x).
std::string canonical_address_string(const AddressComponents& components);

/// How to pull canonical fields out of one source's raw payloads.
/// Paths are dot-separated JSON object traversals ("properties.name").
struct SourceProfile {
  std::string source_id;
  std::map<std::string, std::string> field_paths;
  std::string place_type_delimiter;  // empty = place_type field is an array

  /// TOML: top-level source_id / place_type_delimiter, [field_paths]
  /// section with one path per canonical field. native_id, lat and lon
  /// paths are mandatory.
  static SourceProfile from_file(const std::string& path);
  void validate() const;  // throws std::runtime_error on missing paths
};

struct StandardizeResult {
  std::vector<StandardPoi> pois;
  // One entry per skipped record: "<source>:<native-or-index>: reason".
  std::vector<std::string> errors;
};

/// Convert one raw record. Returns nullopt and sets *error when a
/// mandatory field (native_id, lat, lon) is missing or unusable.
std::optional<StandardPoi> standardize(const RawRecord& record,
                                       const SourceProfile& profile,
                                       const Date& extraction_date,
                                       const AddressVocabulary& vocab,
                                       std::string* error);

/// Convert a batch; skipped records are collected, never fatal.
/// |result.pois| + |result.errors| == |records|.
StandardizeResult standardize_all(const std::vector<RawRecord>& records,
                                  const SourceProfile& profile,
                                  const Date& extraction_date,
                                  const AddressVocabulary& vocab =
                                      AddressVocabulary::defaults());

}  // namespace poi

#endif  // POI_NORMALIZATION_HPP
