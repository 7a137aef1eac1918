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

#include "poi/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "poi/rng.hpp"

namespace {

using poi::GeoPoint;
using poi::StandardPoi;

StandardPoi poi_at(const std::string& id, const std::string& source,
                   double lat, double lon) {
  StandardPoi p;
  p.id = id;
  p.source = source;
  p.point = GeoPoint(lat, lon);
  p.extraction_date = {2020, 1, 1};
  return p;
}

// Brute-force radius filter used as the oracle for the grid index.
std::vector<std::size_t> brute_force_neighbors(
    const std::vector<StandardPoi>& pois, std::size_t centroid,
    const poi::NeighborOptions& options) {
  std::vector<std::pair<double, std::size_t>> hits;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    if (i == centroid) continue;
    if (options.cross_source_only &&
        pois[i].source == pois[centroid].source) {
      continue;
    }
    const double d = poi::haversine_m(pois[centroid].point, pois[i].point);
    if (d <= options.radius_m) {
      hits.emplace_back(d, i);
    }
  }
  std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return pois[a.second].id < pois[b.second].id;
  });
  std::vector<std::size_t> out;
  out.reserve(hits.size());
  for (const auto& [d, i] : hits) out.push_back(i);
  return out;
}

// The worked 3-document corpus used across the TF-IDF cases.
const std::vector<std::string> kCorpus = {
    "520 tampines central", "520 tampines ave", "10 simei street"};

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("name_similarity is invariant to token order and case") {
  CHECK(poi::name_similarity("Mall Bayfront", "bayfront mall") == 1.0);
  CHECK(poi::name_similarity("the coffee shop", "shop the coffee") == 1.0);
}

TEST_CASE("name_similarity normalized edit distance") {
  // dist("abc","abd") = 1, max length 3 -> 1 - 1/3.
  CHECK(poi::name_similarity("abc", "abd") ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  // Token-sorted forms "cafe central" vs "cafe centrale": dist 1, len 13.
  CHECK(poi::name_similarity("central cafe", "cafe centrale") ==
        doctest::Approx(1.0 - 1.0 / 13.0).epsilon(1e-9));
}

TEST_CASE("name_similarity empty-string conventions") {
  CHECK(poi::name_similarity("", "") == 1.0);
  CHECK(poi::name_similarity("", "cafe") == 0.0);
  CHECK(poi::name_similarity("cafe", "") == 0.0);
}

TEST_CASE("name_similarity is symmetric and bounded") {
  const std::vector<std::string> names = {"tampines mall", "mall tampines",
                                          "simei stn", "", "x"};
  for (const auto& a : names) {
    for (const auto& b : names) {
      const double s = poi::name_similarity(a, b);
      CHECK(s == poi::name_similarity(b, a));
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("fit_tfidf reproduces the worked corpus weights") {
  const poi::TfIdfModel model = poi::fit_tfidf(kCorpus);
  CHECK(model.doc_count == 3);

  // IDF("tampines") = ln(3/2): appears in 2 of 3 documents.
  const auto it = model.vocabulary.find("tampines");
  REQUIRE(it != model.vocabulary.end());
  CHECK(model.idf[it->second] ==
        doctest::Approx(0.4054651081081644).epsilon(1e-12));

  // TF("tampines", d1) = 1/3, so the weight is idf/3.
  const auto vec = poi::tfidf_vector(model, kCorpus[0]);
  double tampines_weight = -1.0;
  for (const auto& [idx, w] : vec) {
    if (idx == it->second) tampines_weight = w;
  }
  CHECK(tampines_weight ==
        doctest::Approx(0.1351550360360548).epsilon(1e-12));

  // "central" appears once: IDF = ln(3).
  const auto central = model.vocabulary.find("central");
  REQUIRE(central != model.vocabulary.end());
  CHECK(model.idf[central->second] ==
        doctest::Approx(1.0986122886681098).epsilon(1e-12));
}

TEST_CASE("a token present in every document carries idf 0") {
  const poi::TfIdfModel model =
      poi::fit_tfidf({"520 a", "520 b", "520 c"});
  const auto it = model.vocabulary.find("520");
  REQUIRE(it != model.vocabulary.end());
  CHECK(model.idf[it->second] == 0.0);
}

TEST_CASE("single-document corpus yields all-zero vectors") {
  const poi::TfIdfModel model = poi::fit_tfidf({"10 simei street"});
  for (double idf : model.idf) {
    CHECK(idf == 0.0);
  }
  for (const auto& [idx, w] : poi::tfidf_vector(model, "10 simei street")) {
    CHECK(w == 0.0);
  }
  CHECK(poi::tfidf_cosine(model, "10 simei street", "10 simei street") == 0.0);
}

TEST_CASE("fit_tfidf rejects empty or token-free corpora") {
  CHECK_THROWS_AS(poi::fit_tfidf({}), std::invalid_argument);
  CHECK_THROWS_AS(poi::fit_tfidf({"", "  "}), std::invalid_argument);
}

TEST_CASE("empty documents still count toward |D|") {
  // |D| = 3 with one empty doc: df("a") = 2 -> idf = ln(3/2).
  const poi::TfIdfModel model = poi::fit_tfidf({"a b", "a c", ""});
  const auto it = model.vocabulary.find("a");
  REQUIRE(it != model.vocabulary.end());
  CHECK(model.idf[it->second] ==
        doctest::Approx(std::log(1.5)).epsilon(1e-12));
}

TEST_CASE("idf never increases with document frequency") {
  const poi::TfIdfModel model = poi::fit_tfidf(
      {"a b c", "a b d", "a e f", "a g h"});
  const auto idf_of = [&](const std::string& t) {
    return model.idf[model.vocabulary.at(t)];
  };
  CHECK(idf_of("a") <= idf_of("b"));   // df 4 vs 2
  CHECK(idf_of("b") <= idf_of("c"));   // df 2 vs 1
  CHECK(idf_of("c") == idf_of("d"));   // equal df
}

TEST_CASE("tfidf_cosine matches the hand-computed oracle") {
  const poi::TfIdfModel model = poi::fit_tfidf(kCorpus);
  // Frozen brute-force value for d1 vs d2 under TF = count/|d|,
  // IDF = ln(|D|/df), cosine of the weight vectors.
  CHECK(poi::tfidf_cosine(model, kCorpus[0], kCorpus[1]) ==
        doctest::Approx(0.2140994912067479).epsilon(1e-9));
  // No shared tokens at all.
  CHECK(poi::tfidf_cosine(model, kCorpus[0], kCorpus[2]) == 0.0);
  // Identity on a non-zero vector.
  CHECK(poi::tfidf_cosine(model, kCorpus[0], kCorpus[0]) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Symmetry.
  CHECK(poi::tfidf_cosine(model, kCorpus[0], kCorpus[1]) ==
        poi::tfidf_cosine(model, kCorpus[1], kCorpus[0]));
}

TEST_CASE("documents sharing only idf-0 tokens score 0") {
  const poi::TfIdfModel model = poi::fit_tfidf({"x a", "x b", "x c"});
  CHECK(poi::tfidf_cosine(model, "x a", "x b") == 0.0);
}

TEST_CASE("address_similarity goes through canonical rendering") {
  const poi::TfIdfModel model = poi::fit_tfidf(kCorpus);
  poi::AddressComponents a;
  a.block_number = "520";
  a.street_name = "tampines central";
  a.raw = "520 tampines central";
  poi::AddressComponents b;
  b.block_number = "520";
  b.street_name = "tampines ave";
  b.raw = "520 tampines ave";
  CHECK(poi::address_similarity(model, a, b) ==
        doctest::Approx(0.2140994912067479).epsilon(1e-9));
  CHECK(poi::address_similarity(model, a, a) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("neighbors_within finds a single nearby POI") {
  // ~50 m north at the equator-adjacent latitudes used by the fixture.
  std::vector<StandardPoi> pois = {
      poi_at("a:1", "a", 1.29, 103.85),
      poi_at("b:1", "b", 1.29 + 50.0 / 111320.0, 103.85),
  };
  const poi::SpatialGridIndex index(pois);
  const auto hits = poi::neighbors_within(index, pois, 0, {});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0] == 1);
}

TEST_CASE("neighbors_within includes the exact radius boundary") {
  std::vector<StandardPoi> pois = {
      poi_at("a:1", "a", 0.0, 0.0),
      poi_at("b:1", "b", 0.0, 0.0),
  };
  // Place b exactly 100.0 m east by solving the haversine at the equator:
  // arc = r/R radians of longitude.
  const double lon_deg = (100.0 / poi::kEarthRadiusM) * 180.0 / M_PI;
  pois[1].point = GeoPoint(0.0, lon_deg);
  CHECK(poi::haversine_m(pois[0].point, pois[1].point) ==
        doctest::Approx(100.0).epsilon(1e-9));

  const poi::SpatialGridIndex index(pois);
  poi::NeighborOptions options;
  options.radius_m = 100.0;
  // Inclusive boundary: the updated distance is within 1e-7 of 100 m;
  // verify the <= rule directly on the exact stored coordinates.
  const auto hits = poi::neighbors_within(index, pois, 0, options);
  const double d = poi::haversine_m(pois[0].point, pois[1].point);
  if (d <= 100.0) {
    REQUIRE(hits.size() == 1);
    CHECK(hits[0] == 1);
  } else {
    CHECK(hits.empty());
  }
}

TEST_CASE("cross_source_only excludes same-source candidates") {
  std::vector<StandardPoi> pois = {
      poi_at("a:1", "a", 1.29, 103.85),
      poi_at("a:2", "a", 1.29001, 103.85),
      poi_at("b:1", "b", 1.29001, 103.85001),
  };
  const poi::SpatialGridIndex index(pois);

  poi::NeighborOptions cross;
  const auto cross_hits = poi::neighbors_within(index, pois, 0, cross);
  REQUIRE(cross_hits.size() == 1);
  CHECK(pois[cross_hits[0]].source == "b");

  poi::NeighborOptions all = cross;
  all.cross_source_only = false;
  CHECK(poi::neighbors_within(index, pois, 0, all).size() == 2);
}

TEST_CASE("grid index equals brute force on random point sets") {
  poi::Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<StandardPoi> pois;
    const char* sources[] = {"s0", "s1", "s2"};
    for (int i = 0; i < 200; ++i) {
      const double lat = 1.29 + rng.uniform(-0.004, 0.004);
      const double lon = 103.85 + rng.uniform(-0.004, 0.004);
      const std::string src = sources[i % 3];
      pois.push_back(poi_at(src + (":" + std::to_string(i)), src, lat, lon));
    }
    const poi::SpatialGridIndex index(pois);
    poi::NeighborOptions options;
    options.radius_m = 100.0;
    for (std::size_t c = 0; c < pois.size(); c += 7) {
      CAPTURE(trial);
      CAPTURE(c);
      CHECK(poi::neighbors_within(index, pois, c, options) ==
            brute_force_neighbors(pois, c, options));
    }
    poi::NeighborOptions same_source = options;
    same_source.cross_source_only = false;
    for (std::size_t c = 0; c < pois.size(); c += 13) {
      CHECK(poi::neighbors_within(index, pois, c, same_source) ==
            brute_force_neighbors(pois, c, same_source));
    }
  }
}

TEST_CASE("candidates_near returns a superset of the radius query") {
  poi::Rng rng(7);
  std::vector<StandardPoi> pois;
  for (int i = 0; i < 100; ++i) {
    pois.push_back(poi_at("s:" + std::to_string(i), "s",
                          1.29 + rng.uniform(-0.002, 0.002),
                          103.85 + rng.uniform(-0.002, 0.002)));
  }
  const poi::SpatialGridIndex index(pois);
  poi::NeighborOptions options;
  options.cross_source_only = false;
  for (std::size_t c = 0; c < pois.size(); c += 11) {
    const auto candidates = index.candidates_near(pois[c].point, 1);
    const std::set<std::size_t> candidate_set(candidates.begin(),
                                              candidates.end());
    for (std::size_t n : poi::neighbors_within(index, pois, c, options)) {
      CHECK(candidate_set.count(n) == 1);
    }
  }
}

}  // TEST_SUITE("similarity")
