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

#ifndef POI_UNIFICATION_HPP
#define POI_UNIFICATION_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "poi/core.hpp"

namespace poi {

/// Tag prefix recording a contributing record's coordinates on a merged
/// POI, so no member location is lost even though the merged record has
/// a single geometric point.
inline constexpr const char* kMemberLocationTagPrefix = "src_location:";

/// One connected component of decided match pairs (singletons included).
struct MatchCluster {
  std::vector<std::string> member_ids;  // sorted ascending
};

/// Merged output record: a StandardPoi plus full provenance.
struct UnifiedPoi {
  StandardPoi poi;
  std::set<std::string> contributing_ids;
  std::set<std::string> contributing_sources;
};

/// Connected components over the match pairs, plus singleton clusters
/// for every unmatched POI. Clusters are ordered by smallest member id.
/// Throws std::invalid_argument when a pair references an unknown id.
std::vector<MatchCluster> cluster_matches(
    const std::vector<std::pair<std::string, std::string>>& match_pairs,
    const std::vector<StandardPoi>& pois);

/// Merge one cluster:
///   location  = mean of members from the best-ranked source present;
///   bound     = union of member bounds, expanded to every member point
///               (multi-member clusters only; singletons keep theirs);
///   name/address = longest among best-ranked members, ties broken
///               lexicographically — never taken from a lower rank;
///   place_types, tags, ids, sources = union over all members;
///   extraction_date = latest; requires_verification = any member's OR
///               merged place_types empty.
UnifiedPoi merge_cluster(const MatchCluster& cluster,
                         const std::vector<StandardPoi>& pois,
                         const SourceRanking& ranking);

/// Cluster + merge the whole dataset; output sorted by id.
/// |output| = |pois| - Σ(|cluster| - 1).
std::vector<UnifiedPoi> unify_dataset(
    const std::vector<StandardPoi>& pois,
    const std::vector<std::pair<std::string, std::string>>& match_pairs,
    const SourceRanking& ranking);

}  // namespace poi

#endif  // POI_UNIFICATION_HPP
