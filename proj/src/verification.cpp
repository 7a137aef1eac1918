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

#include "poi/verification.hpp"

#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "poi/taxonomy.hpp"
#include "poi/text.hpp"

namespace poi {

namespace {

std::string now_utc_iso() {
  const std::time_t t = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

bool has_unmapped_tag(const StandardPoi& poi) {
  const std::string prefix = kUnmappedTypeTagPrefix;
  for (const std::string& tag : poi.tags) {
    if (tag.rfind(prefix, 0) == 0) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(current);
  return out;
}

}  // namespace

std::vector<FlaggedPoi> list_flagged(const std::vector<StandardPoi>& dataset) {
  std::vector<FlaggedPoi> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const StandardPoi& poi = dataset[i];
    if (!poi.requires_verification) {
      continue;
    }
    FlaggedPoi flagged;
    flagged.index = i;
    flagged.id = poi.id;
    if (has_unmapped_tag(poi)) {
      flagged.reasons.push_back(kReasonUnmappedTaxonomy);
    }
    if (poi.place_types.empty()) {
      flagged.reasons.push_back(kReasonMissingPlaceType);
    }
    out.push_back(std::move(flagged));
  }
  return out;
}

void resolve_flag(std::vector<StandardPoi>* dataset,
                  const Resolution& resolution,
                  const std::string& operator_name,
                  std::vector<AuditEntry>* audit) {
  StandardPoi* target = nullptr;
  for (StandardPoi& poi : *dataset) {
    if (poi.id == resolution.poi_id) {
      target = &poi;
      break;
    }
  }
  if (target == nullptr) {
    throw std::invalid_argument("resolve_flag: unknown poi id " +
                                resolution.poi_id);
  }
  if (!target->requires_verification) {
    throw std::invalid_argument("resolve_flag: poi not flagged: " +
                                resolution.poi_id);
  }

  AuditEntry entry;
  entry.timestamp = now_utc_iso();
  entry.operator_name = operator_name;
  entry.poi_id = resolution.poi_id;

  if (resolution.action == Resolution::Action::kAssignTypes) {
    entry.action = "assign_types";
    for (const std::string& label : resolution.labels) {
      const std::string norm = normalize_text(label);
      if (!norm.empty()) {
        target->place_types.insert(norm);
        entry.labels.push_back(norm);
      }
    }
  } else {
    entry.action = "dismiss";
  }
  target->requires_verification = false;

  if (audit != nullptr) {
    audit->push_back(std::move(entry));
  }
}

std::vector<StandardPoi> apply_resolutions(
    std::vector<StandardPoi> dataset, const std::vector<Resolution>& resolutions,
    const std::string& operator_name, std::vector<AuditEntry>* audit) {
  for (const Resolution& r : resolutions) {
    resolve_flag(&dataset, r, operator_name, audit);
  }
  return dataset;
}

std::vector<Resolution> resolutions_from_audit(
    const std::vector<AuditEntry>& audit) {
  std::vector<Resolution> out;
  out.reserve(audit.size());
  for (const AuditEntry& entry : audit) {
    Resolution r;
    r.poi_id = entry.poi_id;
    if (entry.action == "assign_types") {
      r.action = Resolution::Action::kAssignTypes;
      r.labels.insert(entry.labels.begin(), entry.labels.end());
    } else {
      r.action = Resolution::Action::kDismiss;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Resolution> load_resolutions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open resolutions file: " + path);
  }
  std::vector<Resolution> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line_no == 1 && line.rfind("poi_id,", 0) == 0) {
      continue;  // header
    }
    const std::vector<std::string> cols = split_on(line, ',');
    if (cols.size() < 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected poi_id,action[,labels]");
    }
    Resolution r;
    r.poi_id = cols[0];
    if (cols[1] == "assign_types") {
      r.action = Resolution::Action::kAssignTypes;
      if (cols.size() < 3 || cols[2].empty()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": assign_types needs labels");
      }
      for (const std::string& label : split_on(cols[2], '|')) {
        if (!label.empty()) {
          r.labels.insert(normalize_text(label));
        }
      }
    } else if (cols[1] == "dismiss") {
      r.action = Resolution::Action::kDismiss;
    } else {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": unknown action '" + cols[1] + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void append_audit_log(const std::string& path,
                      const std::vector<AuditEntry>& entries) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw std::runtime_error("cannot open audit log for append: " + path);
  }
  for (const AuditEntry& e : entries) {
    nlohmann::ordered_json j;
    j["timestamp"] = e.timestamp;
    j["operator"] = e.operator_name;
    j["poi_id"] = e.poi_id;
    j["action"] = e.action;
    j["labels"] = e.labels;
    out << j.dump() << "\n";
  }
}

std::vector<AuditEntry> load_audit_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open audit log: " + path);
  }
  std::vector<AuditEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    AuditEntry entry;
    entry.timestamp = j.value("timestamp", "");
    entry.operator_name = j.value("operator", "");
    entry.poi_id = j.at("poi_id").get<std::string>();
    entry.action = j.at("action").get<std::string>();
    if (j.contains("labels")) {
      for (const auto& label : j["labels"]) {
        entry.labels.push_back(label.get<std::string>());
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace poi
