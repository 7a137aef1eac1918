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

#include "poi/normalization.hpp"

#include <algorithm>
#include <cctype>

#include "poi/text.hpp"
#include "poi/toml.hpp"

namespace poi {

namespace {

// A block number is a short house/building number, optionally with one
// trailing letter ("201", "10a") — not a 6-digit postal code.
bool looks_like_block_number(const std::string& token) {
  if (token.empty() || token.size() > 5) {
    return false;
  }
  std::size_t digits = 0;
  while (digits < token.size() &&
         std::isdigit(static_cast<unsigned char>(token[digits]))) {
    ++digits;
  }
  if (digits == 0 || digits > 4) {
    return false;
  }
  if (digits == token.size()) {
    return true;
  }
  return digits + 1 == token.size() &&
         std::isalpha(static_cast<unsigned char>(token.back()));
}

bool looks_like_postal_code(const std::string& token) {
  return token.size() == 6 && all_digits(token);
}

bool in_vocab(const std::vector<std::string>& vocab, const std::string& token) {
  return std::find(vocab.begin(), vocab.end(), token) != vocab.end();
}

// Follow a dot-separated path through nested JSON objects.
const nlohmann::json* walk_path(const nlohmann::json& doc,
                                const std::string& path) {
  const nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) {
      return nullptr;
    }
    node = &(*node)[key];
    if (dot == std::string::npos) {
      return node;
    }
    start = dot + 1;
  }
  return nullptr;
}

std::optional<std::string> extract_string(const nlohmann::json& doc,
                                          const std::string& path) {
  const nlohmann::json* node = walk_path(doc, path);
  if (node == nullptr || node->is_null()) {
    return std::nullopt;
  }
  if (node->is_string()) {
    return node->get<std::string>();
  }
  return node->dump();
}

std::optional<double> extract_number(const nlohmann::json& doc,
                                     const std::string& path) {
  const nlohmann::json* node = walk_path(doc, path);
  if (node == nullptr) {
    return std::nullopt;
  }
  if (node->is_number()) {
    return node->get<double>();
  }
  if (node->is_string()) {
    try {
      std::size_t used = 0;
      const double v = std::stod(node->get<std::string>(), &used);
      if (used == node->get<std::string>().size()) {
        return v;
      }
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace

AddressVocabulary AddressVocabulary::defaults() {
  AddressVocabulary v;
  v.countries = {"singapore", "malaysia", "indonesia", "thailand", "vietnam"};
  v.states = {"johor", "selangor", "penang", "sabah", "sarawak"};
  return v;
}

AddressVocabulary AddressVocabulary::from_file(const std::string& path) {
  const toml::Table t = toml::parse_file(path);
  AddressVocabulary v;
  for (const toml::Value& item : t.require_array("countries")) {
    v.countries.push_back(normalize_text(item.as_string()));
  }
  if (t.contains("states")) {
    for (const toml::Value& item : t.require_array("states")) {
      v.states.push_back(normalize_text(item.as_string()));
    }
  }
  return v;
}

AddressComponents parse_address(const std::string& raw,
                                const AddressVocabulary& vocab) {
  AddressComponents out;
  out.raw = raw;
  std::vector<std::string> tokens = split_ws(normalize_text(raw));
  // Strip decorative punctuation stuck to token edges (commas from
  // "street 21, singapore"), keeping '#' prefixes that mark unit tokens.
  for (std::string& t : tokens) {
    std::size_t begin = 0;
    std::size_t end = t.size();
    while (begin < end && (t[begin] == ',' || t[begin] == ';')) {
      ++begin;
    }
    while (end > begin &&
           (t[end - 1] == ',' || t[end - 1] == ';' || t[end - 1] == '.')) {
      --end;
    }
    t = t.substr(begin, end - begin);
  }
  tokens.erase(std::remove_if(tokens.begin(), tokens.end(),
                              [](const std::string& t) { return t.empty(); }),
               tokens.end());
  if (tokens.empty()) {
    return out;
  }

  // Trailing structure: ... [state] [country] [postal], in any of the
  // common orders (postal may come after the country).
  if (looks_like_postal_code(tokens.back())) {
    out.postal_code = tokens.back();
    tokens.pop_back();
  }
  if (!tokens.empty() && in_vocab(vocab.countries, tokens.back())) {
    out.country = tokens.back();
    tokens.pop_back();
  }
  if (!tokens.empty() && out.postal_code.empty() &&
      looks_like_postal_code(tokens.back())) {
    out.postal_code = tokens.back();
    tokens.pop_back();
  }
  if (!tokens.empty() && in_vocab(vocab.states, tokens.back())) {
    out.state = tokens.back();
    tokens.pop_back();
  }

  // Leading block number: "blk 201" / "block 201" / bare "201".
  if (!tokens.empty() && (tokens[0] == "blk" || tokens[0] == "block")) {
    if (tokens.size() >= 2 && looks_like_block_number(tokens[1])) {
      out.block_number = tokens[1];
      tokens.erase(tokens.begin(), tokens.begin() + 2);
    } else {
      tokens.erase(tokens.begin());
    }
  } else if (!tokens.empty() && looks_like_block_number(tokens[0])) {
    out.block_number = tokens[0];
    tokens.erase(tokens.begin());
  }

  // Unit designator: first '#'-prefixed token anywhere ("#01-23").
  for (auto it = tokens.begin(); it != tokens.end(); ++it) {
    if (it->size() > 1 && (*it)[0] == '#') {
      out.unit = it->substr(1);
      tokens.erase(it);
      break;
    }
  }

  out.street_name = join_tokens(tokens);
  return out;
}

std::string canonical_address_string(const AddressComponents& c) {
  std::vector<std::string> parts;
  if (!c.block_number.empty()) {
    parts.push_back(c.block_number);
  }
  if (!c.street_name.empty()) {
    parts.push_back(c.street_name);
  }
  if (!c.unit.empty()) {
    parts.push_back("#" + c.unit);
  }
  if (!c.state.empty()) {
    parts.push_back(c.state);
  }
  if (!c.country.empty()) {
    parts.push_back(c.country);
  }
  if (!c.postal_code.empty()) {
    parts.push_back(c.postal_code);
  }
  return join_tokens(parts);
}

SourceProfile SourceProfile::from_file(const std::string& path) {
  const toml::Table t = toml::parse_file(path);
  SourceProfile profile;
  profile.source_id = normalize_text(t.require_string("source_id"));
  profile.place_type_delimiter = t.get_string("place_type_delimiter", "");
  for (const auto& [key, value] : t.values()) {
    constexpr const char* kPrefix = "field_paths.";
    if (key.rfind(kPrefix, 0) == 0 && value.is_string()) {
      profile.field_paths[key.substr(std::string(kPrefix).size())] =
          value.as_string();
    }
  }
  profile.validate();
  return profile;
}

void SourceProfile::validate() const {
  for (const char* mandatory : {"native_id", "lat", "lon"}) {
    if (field_paths.find(mandatory) == field_paths.end()) {
      throw std::runtime_error("profile " + source_id +
                               ": missing mandatory field path '" +
                               std::string(mandatory) + "'");
    }
  }
}

std::optional<StandardPoi> standardize(const RawRecord& record,
                                       const SourceProfile& profile,
                                       const Date& extraction_date,
                                       const AddressVocabulary& vocab,
                                       std::string* error) {
  const auto path_of = [&](const char* field) -> std::string {
    auto it = profile.field_paths.find(field);
    return it == profile.field_paths.end() ? std::string() : it->second;
  };
  const auto fail = [&](const std::string& why) {
    if (error != nullptr) {
      *error = record.source_id + ":" +
               (record.native_id.empty() ? "<unknown>" : record.native_id) +
               ": " + why;
    }
    return std::nullopt;
  };

  const auto native_id = extract_string(record.payload, path_of("native_id"));
  if (!native_id.has_value() || native_id->empty()) {
    return fail("missing native_id");
  }
  const auto lat = extract_number(record.payload, path_of("lat"));
  if (!lat.has_value()) {
    return fail("missing lat");
  }
  const auto lon = extract_number(record.payload, path_of("lon"));
  if (!lon.has_value()) {
    return fail("missing lon");
  }
  const GeoPoint point = GeoPoint::unchecked(*lat, *lon);
  if (!point.in_range()) {
    return fail("lat/lon out of range");
  }

  StandardPoi poi;
  poi.source = profile.source_id;
  poi.id = profile.source_id + ":" + *native_id;
  poi.point = point;
  poi.extraction_date = extraction_date;
  poi.requires_verification = false;

  if (const std::string p = path_of("name"); !p.empty()) {
    if (const auto name = extract_string(record.payload, p)) {
      poi.name = normalize_text(*name);
    }
  }
  if (const std::string p = path_of("address"); !p.empty()) {
    if (const auto address = extract_string(record.payload, p)) {
      if (!address->empty()) {
        poi.address = parse_address(*address, vocab);
      }
    }
  }
  if (const std::string p = path_of("date"); !p.empty()) {
    if (const auto date_text = extract_string(record.payload, p)) {
      if (const auto parsed = Date::parse(*date_text)) {
        poi.extraction_date = *parsed;
      }
    }
  }
  if (const std::string p = path_of("place_type"); !p.empty()) {
    const nlohmann::json* node = walk_path(record.payload, p);
    if (node != nullptr) {
      if (node->is_array()) {
        for (const auto& item : *node) {
          if (item.is_string()) {
            const std::string label = normalize_text(item.get<std::string>());
            if (!label.empty()) {
              poi.place_types.insert(label);
            }
          }
        }
      } else if (node->is_string()) {
        const std::string text = node->get<std::string>();
        std::vector<std::string> labels;
        if (profile.place_type_delimiter.empty()) {
          labels.push_back(text);
        } else {
          std::size_t start = 0;
          while (start <= text.size()) {
            const std::size_t pos =
                text.find(profile.place_type_delimiter, start);
            labels.push_back(text.substr(
                start, pos == std::string::npos ? std::string::npos
                                                : pos - start));
            if (pos == std::string::npos) {
              break;
            }
            start = pos + profile.place_type_delimiter.size();
          }
        }
        for (const std::string& label : labels) {
          const std::string norm = normalize_text(label);
          if (!norm.empty()) {
            poi.place_types.insert(norm);
          }
        }
      }
    }
  }
  return poi;
}

StandardizeResult standardize_all(const std::vector<RawRecord>& records,
                                  const SourceProfile& profile,
                                  const Date& extraction_date,
                                  const AddressVocabulary& vocab) {
  StandardizeResult result;
  for (const RawRecord& record : records) {
    std::string error;
    if (auto poi = standardize(record, profile, extraction_date, vocab,
                               &error)) {
      result.pois.push_back(std::move(*poi));
    } else {
      result.errors.push_back(std::move(error));
    }
  }
  return result;
}

}  // namespace poi
