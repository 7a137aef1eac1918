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

#ifndef POI_VERIFICATION_HPP
#define POI_VERIFICATION_HPP

#include <set>
#include <string>
#include <vector>

#include "poi/core.hpp"

namespace poi {

/// Reason codes attached to flagged POIs.
inline constexpr const char* kReasonUnmappedTaxonomy = "unmapped_taxonomy";
inline constexpr const char* kReasonMissingPlaceType = "missing_place_type";

struct FlaggedPoi {
  std::size_t index = 0;  // into the dataset vector
  std::string id;
  std::vector<std::string> reasons;
};

/// Every POI with requires_verification set, with reasons derived from
/// its state: unmapped_taxonomy when unmapped-type tags are present,
/// missing_place_type when place_types is empty.
std::vector<FlaggedPoi> list_flagged(const std::vector<StandardPoi>& dataset);

struct Resolution {
  enum class Action { kAssignTypes, kDismiss };
  std::string poi_id;
  Action action = Action::kDismiss;
  std::set<std::string> labels;  // assign_types only
};

struct AuditEntry {
  std::string timestamp;  // ISO-8601, UTC
  std::string operator_name;
  std::string poi_id;
  std::string action;  // "assign_types" | "dismiss"
  std::vector<std::string> labels;
};

/// Apply one resolution in place: assign_types extends place_types with
/// the labels and clears the flag; dismiss clears the flag only. Appends
/// the corresponding audit entry. Throws std::invalid_argument for an
/// unknown or unflagged id.
void resolve_flag(std::vector<StandardPoi>* dataset,
                  const Resolution& resolution,
                  const std::string& operator_name,
                  std::vector<AuditEntry>* audit);

/// Apply a batch in order. Replaying the audit entries produced here
/// over the original dataset reproduces the resolved dataset exactly.
std::vector<StandardPoi> apply_resolutions(
    std::vector<StandardPoi> dataset, const std::vector<Resolution>& resolutions,
    const std::string& operator_name, std::vector<AuditEntry>* audit);

/// Rebuild resolutions from persisted audit entries (for replay).
std::vector<Resolution> resolutions_from_audit(
    const std::vector<AuditEntry>& audit);

/// CSV `poi_id,action,labels` (labels pipe-separated, only for
/// assign_types). Throws on malformed rows with line numbers.
std::vector<Resolution> load_resolutions_csv(const std::string& path);

/// Append-only newline-delimited JSON audit log.
void append_audit_log(const std::string& path,
                      const std::vector<AuditEntry>& entries);
std::vector<AuditEntry> load_audit_log(const std::string& path);

}  // namespace poi

#endif  // POI_VERIFICATION_HPP
