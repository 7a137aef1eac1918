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

#include "poi/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace poi {
namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  return in;
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path parent =
      std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------
// StandardPoi <-> GeoJSON feature

ordered_json address_to_json(const AddressComponents& a) {
  ordered_json j = ordered_json::object();
  if (!a.block_number.empty()) j["block_number"] = a.block_number;
  if (!a.street_name.empty()) j["street_name"] = a.street_name;
  if (!a.unit.empty()) j["unit"] = a.unit;
  if (!a.postal_code.empty()) j["postal_code"] = a.postal_code;
  if (!a.state.empty()) j["state"] = a.state;
  if (!a.country.empty()) j["country"] = a.country;
  if (!a.raw.empty()) j["raw"] = a.raw;
  return j;
}

AddressComponents address_from_json(const ordered_json& j) {
  AddressComponents a;
  a.block_number = j.value("block_number", "");
  a.street_name = j.value("street_name", "");
  a.unit = j.value("unit", "");
  a.postal_code = j.value("postal_code", "");
  a.state = j.value("state", "");
  a.country = j.value("country", "");
  a.raw = j.value("raw", "");
  return a;
}

ordered_json poi_to_feature(const StandardPoi& poi) {
  ordered_json f;
  f["type"] = "Feature";
  f["geometry"] = {{"type", "Point"},
                   {"coordinates", ordered_json::array(
                                       {round_coord(poi.point.lon()),
                                        round_coord(poi.point.lat())})}};
  ordered_json& p = f["properties"];
  p = ordered_json::object();
  p["id"] = poi.id;
  p["source"] = poi.source;
  if (poi.has_name()) {
    p["name"] = poi.name;
  }
  if (poi.address.has_value()) {
    p["address"] = address_to_json(*poi.address);
  }
  p["place_types"] = ordered_json(poi.place_types);  // set: already sorted
  p["tags"] = ordered_json(poi.tags);
  p["extraction_date"] = poi.extraction_date.to_string();
  p["requires_verification"] = poi.requires_verification;
  if (poi.bound.has_value()) {
    p["bound"] = ordered_json::array(
        {round_coord(poi.bound->south), round_coord(poi.bound->west),
         round_coord(poi.bound->north), round_coord(poi.bound->east)});
  }
  return f;
}

StandardPoi poi_from_feature(const ordered_json& f) {
  if (f.value("type", "") != "Feature") {
    throw std::runtime_error("not a GeoJSON Feature");
  }
  const auto& geom = f.at("geometry");
  if (geom.value("type", "") != "Point") {
    throw std::runtime_error("non-Point geometry");
  }
  const auto& coords = geom.at("coordinates");
  if (!coords.is_array() || coords.size() < 2) {
    throw std::runtime_error("malformed coordinates");
  }
  const auto& p = f.at("properties");

  StandardPoi poi;
  poi.id = p.at("id").get<std::string>();
  poi.source = p.at("source").get<std::string>();
  poi.point = GeoPoint(coords.at(1).get<double>(), coords.at(0).get<double>());
  poi.name = p.value("name", "");
  if (p.contains("address") && p["address"].is_object()) {
    poi.address = address_from_json(p["address"]);
  }
  if (p.contains("place_types")) {
    for (const auto& t : p["place_types"]) {
      poi.place_types.insert(t.get<std::string>());
    }
  }
  if (p.contains("tags")) {
    for (const auto& t : p["tags"]) {
      poi.tags.insert(t.get<std::string>());
    }
  }
  if (p.contains("extraction_date")) {
    const std::string iso = p["extraction_date"].get<std::string>();
    const auto date = Date::parse(iso);
    if (!date.has_value()) {
      throw std::runtime_error("bad extraction_date: " + iso);
    }
    poi.extraction_date = *date;
  }
  poi.requires_verification = p.value("requires_verification", false);
  if (p.contains("bound")) {
    const auto& b = p["bound"];
    if (!b.is_array() || b.size() != 4) {
      throw std::runtime_error("bound must be [south,west,north,east]");
    }
    poi.bound = BoundingBox{b.at(0).get<double>(), b.at(1).get<double>(),
                            b.at(2).get<double>(), b.at(3).get<double>()};
  }
  return poi;
}

// Writes features (already serialized one per element) in the requested
// container format.
void write_features(const std::vector<ordered_json>& features,
                    const std::string& path, DatasetFormat format) {
  std::ofstream out = open_out(path);
  if (format == DatasetFormat::kGeoJson) {
    ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = features;
    out << doc.dump(2) << '\n';
  } else {
    for (const auto& f : features) {
      out << f.dump() << '\n';
    }
  }
  finish_write(out, path);
}

// Reads features from either container format, handing each to `consume`
// together with a location label for error messages.
template <typename Consume>
void read_features(const std::string& path, DatasetFormat format,
                   Consume&& consume) {
  std::ifstream in = open_in(path);
  if (format == DatasetFormat::kGeoJson) {
    ordered_json doc;
    try {
      doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
    const ordered_json* features = nullptr;
    if (doc.value("type", "") == "FeatureCollection" &&
        doc.contains("features")) {
      features = &doc["features"];
    } else if (doc.value("type", "") == "Feature") {
      consume(doc, "feature 0");
      return;
    } else {
      throw std::runtime_error(path +
                               ": expected a FeatureCollection or Feature");
    }
    std::size_t i = 0;
    for (const auto& f : *features) {
      consume(f, "feature " + std::to_string(i));
      ++i;
    }
  } else {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      ordered_json f;
      try {
        f = ordered_json::parse(line);
      } catch (const std::exception& e) {
        consume(ordered_json(), "line " + std::to_string(line_no) +
                                    " (unparseable: " + std::string(e.what()) +
                                    ")");
        continue;
      }
      consume(f, "line " + std::to_string(line_no));
    }
  }
}

std::vector<const StandardPoi*> sorted_by_id(
    const std::vector<StandardPoi>& pois) {
  std::vector<const StandardPoi*> order;
  order.reserve(pois.size());
  for (const StandardPoi& p : pois) {
    order.push_back(&p);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const StandardPoi* a, const StandardPoi* b) {
                     return a->id < b->id;
                   });
  return order;
}

// ---------------------------------------------------------------------
// CSV helpers

void check_csv_safe(const std::string& id) {
  if (id.find_first_of(",\r\n\"") != std::string::npos) {
    throw std::runtime_error("id not CSV-safe: " + id);
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_decision(const std::string& text, const std::string& where) {
  if (text == "match" || text == "1" || text == "true") return true;
  if (text == "non_match" || text == "0" || text == "false") return false;
  throw std::runtime_error(where + ": bad decision value '" + text + "'");
}

// Shared reader for the two pair CSV flavours: 3 columns = labeled pairs
// (last column is the label), 6 columns = decided pairs (last column is
// the decision).
std::map<std::pair<std::string, std::string>, bool> load_pairs_csv(
    const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::pair<std::string, std::string>, bool> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != 3 && fields.size() != 6) {
      throw std::runtime_error(where + ": expected 3 or 6 columns, got " +
                               std::to_string(fields.size()));
    }
    if (line_no == 1 && fields[0] == "id_a") {
      continue;  // header
    }
    std::pair<std::string, std::string> key(fields[0], fields[1]);
    if (key.second < key.first) {
      std::swap(key.first, key.second);
    }
    const bool value = parse_decision(fields.back(), where);
    const auto [it, inserted] = out.emplace(key, value);
    if (!inserted && it->second != value) {
      throw std::runtime_error(where + ": conflicting duplicate for pair " +
                               key.first + " / " + key.second);
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// Model JSON

constexpr int kModelFormatVersion = 1;

ordered_json tree_to_json(const DecisionTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const TreeNode& n : tree.nodes) {
    nodes.push_back(ordered_json::array(
        {n.feature, n.threshold, n.value, n.left, n.right}));
  }
  ordered_json j;
  j["nodes"] = std::move(nodes);
  return j;
}

DecisionTree tree_from_json(const ordered_json& j) {
  DecisionTree tree;
  for (const auto& row : j.at("nodes")) {
    if (!row.is_array() || row.size() != 5) {
      throw std::runtime_error("malformed tree node");
    }
    TreeNode n;
    n.feature = row.at(0).get<int>();
    n.threshold = row.at(1).get<double>();
    n.value = row.at(2).get<double>();
    n.left = row.at(3).get<int>();
    n.right = row.at(4).get<int>();
    tree.nodes.push_back(n);
  }
  return tree;
}

}  // namespace

double round_coord(double value) {
  return std::round(value * 1e7) / 1e7;
}

DatasetFormat format_from_path(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".geojson" || ext == ".json") {
    return DatasetFormat::kGeoJson;
  }
  return DatasetFormat::kNdjson;
}

void save_dataset(const std::vector<StandardPoi>& pois,
                  const std::string& path, DatasetFormat format) {
  std::vector<ordered_json> features;
  features.reserve(pois.size());
  for (const StandardPoi* p : sorted_by_id(pois)) {
    features.push_back(poi_to_feature(*p));
  }
  write_features(features, path, format);
}

void save_dataset(const std::vector<StandardPoi>& pois,
                  const std::string& path) {
  save_dataset(pois, path, format_from_path(path));
}

LoadReport load_dataset(const std::string& path, DatasetFormat format) {
  LoadReport report;
  read_features(path, format,
                [&](const ordered_json& f, const std::string& where) {
                  if (f.is_null()) {
                    report.errors.push_back(where);
                    return;
                  }
                  try {
                    report.pois.push_back(poi_from_feature(f));
                  } catch (const std::exception& e) {
                    report.errors.push_back(where + ": " + e.what());
                  }
                });
  return report;
}

LoadReport load_dataset(const std::string& path) {
  return load_dataset(path, format_from_path(path));
}

void save_unified(const std::vector<UnifiedPoi>& pois,
                  const std::string& path, DatasetFormat format) {
  std::vector<const UnifiedPoi*> order;
  order.reserve(pois.size());
  for (const UnifiedPoi& p : pois) {
    order.push_back(&p);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const UnifiedPoi* a, const UnifiedPoi* b) {
                     return a->poi.id < b->poi.id;
                   });
  std::vector<ordered_json> features;
  features.reserve(pois.size());
  for (const UnifiedPoi* u : order) {
    ordered_json f = poi_to_feature(u->poi);
    f["properties"]["contributing_ids"] = ordered_json(u->contributing_ids);
    f["properties"]["contributing_sources"] =
        ordered_json(u->contributing_sources);
    features.push_back(std::move(f));
  }
  write_features(features, path, format);
}

std::vector<UnifiedPoi> load_unified(const std::string& path) {
  std::vector<UnifiedPoi> out;
  std::vector<std::string> errors;
  read_features(path, format_from_path(path),
                [&](const ordered_json& f, const std::string& where) {
                  if (f.is_null()) {
                    errors.push_back(where);
                    return;
                  }
                  try {
                    UnifiedPoi u;
                    u.poi = poi_from_feature(f);
                    const auto& p = f.at("properties");
                    if (p.contains("contributing_ids")) {
                      for (const auto& v : p["contributing_ids"]) {
                        u.contributing_ids.insert(v.get<std::string>());
                      }
                    } else {
                      u.contributing_ids.insert(u.poi.id);
                    }
                    if (p.contains("contributing_sources")) {
                      for (const auto& v : p["contributing_sources"]) {
                        u.contributing_sources.insert(v.get<std::string>());
                      }
                    } else {
                      u.contributing_sources.insert(u.poi.source);
                    }
                    out.push_back(std::move(u));
                  } catch (const std::exception& e) {
                    errors.push_back(where + ": " + e.what());
                  }
                });
  if (!errors.empty()) {
    throw std::runtime_error(path + ": " + std::to_string(errors.size()) +
                             " bad record(s), first: " + errors.front());
  }
  return out;
}

void save_raw_records(const std::vector<RawRecord>& records,
                      const std::string& path) {
  std::ofstream out = open_out(path);
  for (const RawRecord& r : records) {
    nlohmann::json payload = r.payload;
    // Make sure the line is self-describing for load_raw_records.
    if (!payload.contains("properties") ||
        !payload["properties"].contains("native_id")) {
      payload["properties"]["native_id"] = r.native_id;
    }
    out << payload.dump() << '\n';
  }
  finish_write(out, path);
}

std::vector<RawRecord> load_raw_records(const std::string& path,
                                        const std::string& source_id) {
  std::ifstream in = open_in(path);
  std::vector<RawRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    nlohmann::json payload;
    try {
      payload = nlohmann::json::parse(line);
      RawRecord rec;
      rec.source_id = source_id;
      const auto& nid = payload.at("properties").at("native_id");
      rec.native_id = nid.is_string() ? nid.get<std::string>() : nid.dump();
      rec.payload = std::move(payload);
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return out;
}

void save_decided_pairs(const std::vector<DecidedPair>& pairs,
                        const std::string& path) {
  std::ofstream out = open_out(path);
  out << "id_a,id_b,s_name,s_address,probability,decision\n";
  for (const DecidedPair& p : pairs) {
    check_csv_safe(p.features.id_a);
    check_csv_safe(p.features.id_b);
    out << p.features.id_a << ',' << p.features.id_b << ','
        << fmt6(p.features.s_name) << ',' << fmt6(p.features.s_address) << ','
        << fmt6(p.probability) << ','
        << (p.is_match ? "match" : "non_match") << '\n';
  }
  finish_write(out, path);
}

void save_labeled_pairs(const std::vector<FeaturePair>& pairs,
                        const std::string& path) {
  std::ofstream out = open_out(path);
  out << "id_a,id_b,label\n";
  for (const FeaturePair& p : pairs) {
    if (!p.label.has_value()) {
      throw std::runtime_error("unlabeled pair cannot be saved as labeled: " +
                               p.id_a + " / " + p.id_b);
    }
    check_csv_safe(p.id_a);
    check_csv_safe(p.id_b);
    out << p.id_a << ',' << p.id_b << ','
        << (*p.label ? "match" : "non_match") << '\n';
  }
  finish_write(out, path);
}

std::map<std::pair<std::string, std::string>, bool> load_labeled_pairs(
    const std::string& path) {
  return load_pairs_csv(path);
}

std::map<std::pair<std::string, std::string>, bool> load_pair_decisions(
    const std::string& path) {
  return load_pairs_csv(path);
}

std::vector<std::pair<std::string, std::string>> load_match_pairs(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, is_match] : load_pairs_csv(path)) {
    if (is_match) {
      out.push_back(key);
    }
  }
  return out;
}

void save_model(const MatchModel& model, const std::string& path) {
  ordered_json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["type"] = "poi-match-model";
  doc["algorithm"] = to_string(model.algorithm);
  doc["backend"] = to_string(model.backend);
  doc["rebalanced"] = model.rebalanced;
  doc["k"] = model.sub_models.size();
  doc["seed"] = model.seed;
  doc["decision_threshold"] = model.decision_threshold;
  doc["hyperparams"] = {{"n_trees", model.hyperparams.n_trees},
                        {"max_depth", model.hyperparams.max_depth},
                        {"learning_rate", model.hyperparams.learning_rate}};
  ordered_json subs = ordered_json::array();
  for (const SubModel& sub : model.sub_models) {
    ordered_json s;
    s["f0"] = sub.f0;
    s["learning_rate"] = sub.learning_rate;
    ordered_json trees = ordered_json::array();
    for (const DecisionTree& tree : sub.trees) {
      trees.push_back(tree_to_json(tree));
    }
    s["trees"] = std::move(trees);
    subs.push_back(std::move(s));
  }
  doc["sub_models"] = std::move(subs);

  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
  finish_write(out, path);
}

MatchModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  const int version = doc.value("format_version", -1);
  if (version != kModelFormatVersion) {
    throw std::runtime_error(path + ": unsupported model format_version " +
                             std::to_string(version));
  }
  MatchModel model;
  model.algorithm = algorithm_from_string(doc.at("algorithm"));
  model.backend = feature_backend_from_string(doc.at("backend"));
  model.rebalanced = doc.value("rebalanced", true);
  model.seed = doc.value("seed", std::uint64_t{0});
  model.decision_threshold = doc.value("decision_threshold", 0.5);
  if (doc.contains("hyperparams")) {
    const auto& hp = doc["hyperparams"];
    model.hyperparams.n_trees = hp.value("n_trees", 50);
    model.hyperparams.max_depth = hp.value("max_depth", 2);
    model.hyperparams.learning_rate = hp.value("learning_rate", 0.1);
  }
  for (const auto& s : doc.at("sub_models")) {
    SubModel sub;
    sub.f0 = s.value("f0", 0.0);
    sub.learning_rate = s.value("learning_rate", 0.1);
    for (const auto& t : s.at("trees")) {
      sub.trees.push_back(tree_from_json(t));
    }
    model.sub_models.push_back(std::move(sub));
  }
  return model;
}

Polygon load_polygon(const std::string& path) {
  std::ifstream in = open_in(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  const nlohmann::json* geom = nullptr;
  const std::string type = doc.value("type", "");
  if (type == "Polygon" || type == "MultiPolygon") {
    geom = &doc;
  } else if (type == "Feature") {
    geom = &doc.at("geometry");
  } else if (type == "FeatureCollection") {
    for (const auto& f : doc.at("features")) {
      const std::string gt = f.at("geometry").value("type", "");
      if (gt == "Polygon" || gt == "MultiPolygon") {
        geom = &f.at("geometry");
        break;
      }
    }
  }
  if (geom == nullptr) {
    throw std::runtime_error(path + ": no Polygon geometry found");
  }
  const std::string gt = geom->value("type", "");
  // Outer ring of the (first) polygon; holes are not supported.
  const nlohmann::json& ring = gt == "MultiPolygon"
                                   ? geom->at("coordinates").at(0).at(0)
                                   : geom->at("coordinates").at(0);
  std::vector<GeoPoint> points;
  for (const auto& c : ring) {
    points.emplace_back(c.at(1).get<double>(), c.at(0).get<double>());
  }
  return Polygon(std::move(points));
}

std::string sha256_file(const std::string& path) {
  std::ifstream in = open_in(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr ||
      EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 init failed");
  }
  char buf[65536];
  while (in.good()) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0 &&
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw std::runtime_error("sha256 update failed");
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 final failed");
  }
  EVP_MD_CTX_free(ctx);
  std::string hex;
  hex.reserve(2 * len);
  static const char* kHex = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

}  // namespace poi
