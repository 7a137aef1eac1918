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

#include "poi/unification.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "poi/normalization.hpp"

namespace poi {

namespace {

// Plain union-find with path compression.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

std::string format_coord_tag(const std::string& id, const GeoPoint& p) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s%s:%.7f,%.7f", kMemberLocationTagPrefix,
                id.c_str(), p.lat(), p.lon());
  return buf;
}

// Dataset-wide lookup shared across all merge_cluster calls so unifying
// n records stays O(n log n) instead of O(clusters * n).
struct MergeContext {
  std::map<std::string, const StandardPoi*> by_id;
  std::set<std::string> universe_sources;

  explicit MergeContext(const std::vector<StandardPoi>& pois) {
    for (const StandardPoi& p : pois) {
      by_id[p.id] = &p;
      universe_sources.insert(p.source);
    }
  }
};

UnifiedPoi merge_cluster_impl(const MatchCluster& cluster,
                              const MergeContext& context,
                              const SourceRanking& ranking);

}  // namespace

std::vector<MatchCluster> cluster_matches(
    const std::vector<std::pair<std::string, std::string>>& match_pairs,
    const std::vector<StandardPoi>& pois) {
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    index_of[pois[i].id] = i;
  }
  DisjointSets sets(pois.size());
  for (const auto& [a, b] : match_pairs) {
    const auto ia = index_of.find(a);
    const auto ib = index_of.find(b);
    if (ia == index_of.end() || ib == index_of.end()) {
      throw std::invalid_argument("cluster_matches: pair references unknown id " +
                                  (ia == index_of.end() ? a : b));
    }
    sets.unite(ia->second, ib->second);
  }

  std::map<std::size_t, std::vector<std::string>> groups;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    groups[sets.find(i)].push_back(pois[i].id);
  }
  std::vector<MatchCluster> clusters;
  clusters.reserve(groups.size());
  for (auto& [root, ids] : groups) {
    (void)root;
    std::sort(ids.begin(), ids.end());
    clusters.push_back(MatchCluster{std::move(ids)});
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const MatchCluster& a, const MatchCluster& b) {
              return a.member_ids.front() < b.member_ids.front();
            });
  return clusters;
}

UnifiedPoi merge_cluster(const MatchCluster& cluster,
                         const std::vector<StandardPoi>& pois,
                         const SourceRanking& ranking) {
  return merge_cluster_impl(cluster, MergeContext(pois), ranking);
}

namespace {

UnifiedPoi merge_cluster_impl(const MatchCluster& cluster,
                              const MergeContext& context,
                              const SourceRanking& ranking) {
  if (cluster.member_ids.empty()) {
    throw std::invalid_argument("merge_cluster: empty cluster");
  }
  const std::set<std::string>& universe_sources = context.universe_sources;
  std::vector<const StandardPoi*> members;
  for (const std::string& id : cluster.member_ids) {
    const auto it = context.by_id.find(id);
    if (it == context.by_id.end()) {
      throw std::invalid_argument("merge_cluster: unknown member id " + id);
    }
    members.push_back(it->second);
  }

  // Singleton merge is the identity plus provenance.
  if (members.size() == 1) {
    UnifiedPoi out;
    out.poi = *members[0];
    out.contributing_ids.insert(members[0]->id);
    out.contributing_sources.insert(members[0]->source);
    // A merged record lacking place types needs human eyes.
    if (out.poi.place_types.empty()) {
      out.poi.requires_verification = true;
    }
    return out;
  }

  int best_rank = std::numeric_limits<int>::max();
  for (const StandardPoi* m : members) {
    best_rank =
        std::min(best_rank, source_rank(m->source, ranking, universe_sources));
  }
  std::vector<const StandardPoi*> best_members;
  for (const StandardPoi* m : members) {
    if (source_rank(m->source, ranking, universe_sources) == best_rank) {
      best_members.push_back(m);
    }
  }

  UnifiedPoi out;
  StandardPoi& merged = out.poi;

  // Identifier: union of all member ids, joined in sorted order.
  std::string joined;
  for (const std::string& id : cluster.member_ids) {
    if (!joined.empty()) {
      joined += "+";
    }
    joined += id;
  }
  merged.id = joined;
  merged.source = best_members.front()->source;

  // Location: centroid of the most authoritative members.
  double lat_sum = 0.0;
  double lon_sum = 0.0;
  for (const StandardPoi* m : best_members) {
    lat_sum += m->point.lat();
    lon_sum += m->point.lon();
  }
  merged.point = GeoPoint::unchecked(lat_sum / best_members.size(),
                                     lon_sum / best_members.size());

  // Bound: the most conservative rectangle — union of member bounds,
  // widened so every member point (and the centroid) is inside.
  BoundingBox bound{members[0]->point.lat(), members[0]->point.lon(),
                    members[0]->point.lat(), members[0]->point.lon()};
  for (const StandardPoi* m : members) {
    bound.expand_to(m->point);
    if (m->bound.has_value()) {
      bound.expand_to(*m->bound);
    }
  }
  bound.expand_to(merged.point);
  merged.bound = bound;

  // Name and address: longest string among best-ranked members only;
  // equal lengths break lexicographically.
  const auto pick_longest = [](const std::vector<std::string>& candidates) {
    std::string winner;
    for (const std::string& c : candidates) {
      if (c.size() > winner.size() || (c.size() == winner.size() && !c.empty() &&
                                       c < winner)) {
        winner = c;
      }
    }
    return winner;
  };
  std::vector<std::string> names;
  for (const StandardPoi* m : best_members) {
    names.push_back(m->name);
  }
  merged.name = pick_longest(names);

  std::string best_address_string;
  for (const StandardPoi* m : best_members) {
    if (!m->address.has_value()) {
      continue;
    }
    const std::string rendered = canonical_address_string(*m->address);
    if (rendered.size() > best_address_string.size() ||
        (rendered.size() == best_address_string.size() && !rendered.empty() &&
         rendered < best_address_string)) {
      best_address_string = rendered;
      merged.address = *m->address;
    }
  }

  // Union rules: semantic labels, tags, provenance.
  for (const StandardPoi* m : members) {
    merged.place_types.insert(m->place_types.begin(), m->place_types.end());
    merged.tags.insert(m->tags.begin(), m->tags.end());
    out.contributing_ids.insert(m->id);
    out.contributing_sources.insert(m->source);
    merged.tags.insert(format_coord_tag(m->id, m->point));
  }

  merged.extraction_date = members[0]->extraction_date;
  for (const StandardPoi* m : members) {
    if (merged.extraction_date < m->extraction_date) {
      merged.extraction_date = m->extraction_date;
    }
  }

  merged.requires_verification = false;
  for (const StandardPoi* m : members) {
    merged.requires_verification |= m->requires_verification;
  }
  if (merged.place_types.empty()) {
    merged.requires_verification = true;
  }
  return out;
}

}  // namespace

std::vector<UnifiedPoi> unify_dataset(
    const std::vector<StandardPoi>& pois,
    const std::vector<std::pair<std::string, std::string>>& match_pairs,
    const SourceRanking& ranking) {
  const std::vector<MatchCluster> clusters = cluster_matches(match_pairs, pois);
  const MergeContext context(pois);
  std::vector<UnifiedPoi> out;
  out.reserve(clusters.size());
  for (const MatchCluster& cluster : clusters) {
    out.push_back(merge_cluster_impl(cluster, context, ranking));
  }
  std::sort(out.begin(), out.end(), [](const UnifiedPoi& a, const UnifiedPoi& b) {
    return a.poi.id < b.poi.id;
  });
  return out;
}

}  // namespace poi
