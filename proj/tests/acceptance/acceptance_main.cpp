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

// Acceptance gate for the conflation engine. Eight release criteria, one
// pass/fail line each; the process exits non-zero if any criterion fails.
//
//  1. throughput        — match + unify over a 12,106-POI corpus < 180 s
//  2. accuracy ladder   — tuned ensemble beats every tuned WSA baseline
//  3. rebalancing       — hybrid sampling never hurts, usually helps
//  4. oracle parity     — TF-IDF / Levenshtein / grid index vs brute force
//  5. procurement       — recursive fetch is complete unless it warns
//  6. unification       — count identity, idempotence, merge-rule fixture
//  7. metric sanity     — imbalance-proof metrics and coverage rendering
//  8. taxonomy gating   — 0.95 cosine floor and auditable verification

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "poi/core.hpp"
#include "poi/evaluation.hpp"
#include "poi/geo.hpp"
#include "poi/matcher.hpp"
#include "poi/normalization.hpp"
#include "poi/persistence.hpp"
#include "poi/procurement.hpp"
#include "poi/rng.hpp"
#include "poi/similarity.hpp"
#include "poi/taxonomy.hpp"
#include "poi/text.hpp"
#include "poi/unification.hpp"
#include "poi/verification.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Scratch directory cleaned up on scope exit.
struct TempTree {
  explicit TempTree(const std::string& name)
      : root(fs::temp_directory_path() / name) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TempTree() { fs::remove_all(root); }
  fs::path root;
};

std::map<std::pair<std::string, std::string>, bool> label_map(
    const std::vector<poi::FeaturePair>& labeled) {
  std::map<std::pair<std::string, std::string>, bool> out;
  for (const auto& p : labeled) {
    out[{p.id_a, p.id_b}] = *p.label;
  }
  return out;
}

double balanced_on(const std::vector<poi::FeaturePair>& pairs,
                   const std::function<bool(const poi::FeaturePair&)>& pred) {
  std::vector<bool> y_pred;
  std::vector<bool> y_true;
  y_pred.reserve(pairs.size());
  y_true.reserve(pairs.size());
  for (const auto& p : pairs) {
    y_pred.push_back(pred(p));
    y_true.push_back(*p.label);
  }
  return poi::balanced_accuracy(y_pred, y_true);
}

// ---------------------------------------------------------------------
// 1. Throughput: decide and merge a 12,106-record corpus in under three
// minutes. The classifier is trained beforehand on the small labeled
// corpus (training is a one-off cost; the bound covers inference).

Outcome criterion_throughput() {
  poi::FixtureConfig small;
  small.seed = 42;
  poi::Fixture train_fx = poi::generate_fixture(small);

  poi::MatchOptions mo;
  mo.backend = poi::FeatureBackend::kHybrid;
  mo.num_threads = 0;

  const auto train_features = poi::featurize_all(train_fx.pois, mo);
  const auto train_labeled =
      poi::join_labels(train_features, label_map(train_fx.labeled_pairs));

  poi::TrainOptions to;
  to.algorithm = poi::Algorithm::kBagging;
  to.backend = poi::FeatureBackend::kHybrid;
  to.k = 10;
  to.rebalance = true;
  to.hyperparams = {50, 3, 0.1};
  to.seed = 42;
  const poi::MatchModel model = poi::train_model(train_labeled, to);

  poi::FixtureConfig big;
  big.seed = 42;
  big.n_pois = 12106;
  big.n_sources = 5;
  big.duplicate_rate = 0.28;
  const poi::Fixture fx = poi::generate_fixture(big);

  const poi::SourceRanking ranking{{"s1", "s2", "s3", "s4", "s5"}};

  const auto t0 = Clock::now();
  const std::vector<poi::DecidedPair> decided =
      poi::match_all(fx.pois, &model, mo);
  std::vector<std::pair<std::string, std::string>> matches;
  for (const auto& d : decided) {
    if (d.is_match) {
      matches.emplace_back(d.features.id_a, d.features.id_b);
    }
  }
  const std::vector<poi::UnifiedPoi> unified =
      poi::unify_dataset(fx.pois, matches, ranking);
  const double elapsed = seconds_since(t0);

  std::size_t contributing = 0;
  for (const auto& u : unified) {
    contributing += u.contributing_ids.size();
  }
  const bool conserved = contributing == fx.pois.size();
  const bool ok = elapsed < 180.0 && conserved && !unified.empty();
  return {ok, fmt("%zu POIs -> %zu pairs decided, %zu matches, %zu places "
                  "in %.1f s (limit 180 s)%s",
                  fx.pois.size(), decided.size(), matches.size(),
                  unified.size(), elapsed,
                  conserved ? "" : " [record conservation violated]")};
}

// ---------------------------------------------------------------------
// 2 + 3. Accuracy ladder and rebalancing effect, evaluated together on
// five seeded corpora: for every feature backend a WSA baseline is tuned
// on the training split over a fixed grid, then the bagged ensemble is
// trained with and without hybrid rebalancing and scored on the test
// split (balanced accuracy throughout).

struct LadderStats {
  // [backend][seed]
  double wsa[3][5] = {};
  double rebal[3][5] = {};
  double raw[3][5] = {};
  double seed_seconds[5] = {};
};

const char* kBackendNames[3] = {"string", "tfidf", "hybrid"};
const poi::FeatureBackend kBackends[3] = {poi::FeatureBackend::kString,
                                          poi::FeatureBackend::kTfidf,
                                          poi::FeatureBackend::kHybrid};

LadderStats run_ladder() {
  LadderStats stats;
  for (int s = 0; s < 5; ++s) {
    const std::uint64_t seed = static_cast<std::uint64_t>(s) + 1;
    const auto t0 = Clock::now();

    poi::FixtureConfig fc;
    fc.seed = seed;
    const poi::Fixture fx = poi::generate_fixture(fc);
    const auto labels = label_map(fx.labeled_pairs);

    for (int b = 0; b < 3; ++b) {
      poi::MatchOptions mo;
      mo.backend = kBackends[b];
      mo.num_threads = 1;
      const auto computed = poi::featurize_all(fx.pois, mo);
      const auto labeled = poi::join_labels(computed, labels);
      const poi::LabeledSplit split =
          poi::stratified_split(labeled, 0.75, seed);

      // WSA tuned on the training split: alpha, beta in {0, .05, .., 1},
      // V in {.05, .., .95}, first best kept.
      poi::WsaParams best{};
      double best_train = -1.0;
      for (int ai = 0; ai <= 20; ++ai) {
        for (int bi = 0; bi <= 20; ++bi) {
          for (int vi = 1; vi <= 19; ++vi) {
            const poi::WsaParams p{ai * 0.05, bi * 0.05, vi * 0.05};
            const double acc = balanced_on(
                split.train,
                [&](const poi::FeaturePair& fp) {
                  return poi::wsa_classify(fp, p);
                });
            if (acc > best_train) {
              best_train = acc;
              best = p;
            }
          }
        }
      }
      stats.wsa[b][s] = balanced_on(
          split.test,
          [&](const poi::FeaturePair& fp) { return poi::wsa_classify(fp, best); });

      poi::TrainOptions to;
      to.algorithm = poi::Algorithm::kBagging;
      to.backend = kBackends[b];
      to.k = 10;
      to.rebalance = true;
      to.hyperparams = {50, 3, 0.1};
      to.seed = seed;
      const poi::MatchModel rebal = poi::train_model(split.train, to);
      stats.rebal[b][s] = balanced_on(
          split.test, [&](const poi::FeaturePair& fp) {
            return poi::predict_match(rebal, fp).second;
          });

      to.rebalance = false;
      to.k = 1;
      const poi::MatchModel raw = poi::train_model(split.train, to);
      stats.raw[b][s] = balanced_on(
          split.test, [&](const poi::FeaturePair& fp) {
            return poi::predict_match(raw, fp).second;
          });
    }
    stats.seed_seconds[s] = seconds_since(t0);
  }
  return stats;
}

Outcome criterion_ladder(const LadderStats& stats) {
  int wins = 0;
  double mean_hybrid = 0.0;
  double max_seconds = 0.0;
  for (int s = 0; s < 5; ++s) {
    const double proposed = stats.rebal[2][s];  // hybrid + rebalancing
    bool beat_all = true;
    for (int b = 0; b < 3; ++b) {
      beat_all = beat_all && proposed >= stats.wsa[b][s];
    }
    wins += beat_all ? 1 : 0;
    mean_hybrid += proposed / 5.0;
    max_seconds = std::max(max_seconds, stats.seed_seconds[s]);
  }
  const bool ok = wins >= 4 && mean_hybrid >= 0.95 && max_seconds < 60.0;
  return {ok,
          fmt("ensemble >= all WSA baselines in %d/5 seeds, mean balanced "
              "accuracy %.4f (floor 0.95), slowest seed %.1f s (limit 60 s)",
              wins, mean_hybrid, max_seconds)};
}

Outcome criterion_rebalancing(const LadderStats& stats) {
  bool ok = true;
  std::string detail;
  for (int b = 0; b < 3; ++b) {
    double mean_rebal = 0.0;
    double mean_raw = 0.0;
    int improved = 0;
    for (int s = 0; s < 5; ++s) {
      mean_rebal += stats.rebal[b][s] / 5.0;
      mean_raw += stats.raw[b][s] / 5.0;
      improved += stats.rebal[b][s] > stats.raw[b][s] ? 1 : 0;
    }
    const double delta = mean_rebal - mean_raw;
    const bool backend_ok = delta >= -0.005 && improved >= 3;
    ok = ok && backend_ok;
    if (b > 0) {
      detail += "; ";
    }
    detail += fmt("%s mean %+.4f, improved %d/5", kBackendNames[b], delta,
                  improved);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------
// 4. Oracle parity: the production TF-IDF, Levenshtein, and spatial-grid
// implementations agree with independent brute-force references.

// Whitespace-token TF-IDF computed the long way: tf = count/len,
// idf = ln(N/df), cosine over the dense token space.
struct BruteTfidf {
  explicit BruteTfidf(const std::vector<std::string>& corpus)
      : corpus_(corpus) {
    for (const auto& doc : corpus) {
      std::set<std::string> seen;
      for (const auto& tok : poi::split_ws(doc)) {
        seen.insert(tok);
      }
      for (const auto& tok : seen) {
        ++df_[tok];
      }
    }
  }

  double weight(const std::string& token, const std::string& doc) const {
    const auto toks = poi::split_ws(doc);
    if (toks.empty()) {
      return 0.0;
    }
    std::size_t count = 0;
    for (const auto& t : toks) {
      count += t == token ? 1 : 0;
    }
    const auto it = df_.find(token);
    if (it == df_.end()) {
      return 0.0;
    }
    const double tf =
        static_cast<double>(count) / static_cast<double>(toks.size());
    const double idf = std::log(static_cast<double>(corpus_.size()) /
                                static_cast<double>(it->second));
    return tf * idf;
  }

  std::map<std::string, double> vec(const std::string& doc) const {
    std::map<std::string, double> out;
    for (const auto& [token, df] : df_) {
      (void)df;
      const double w = weight(token, doc);
      if (w != 0.0) {
        out[token] = w;
      }
    }
    return out;
  }

  double cosine(const std::string& a, const std::string& b) const {
    const auto va = vec(a);
    const auto vb = vec(b);
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [t, w] : va) {
      na += w * w;
      const auto it = vb.find(t);
      if (it != vb.end()) {
        dot += w * it->second;
      }
    }
    for (const auto& [t, w] : vb) {
      nb += w * w;
    }
    if (na == 0.0 || nb == 0.0) {
      return 0.0;
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
  }

  std::vector<std::string> corpus_;
  std::map<std::string, std::size_t> df_;
};

std::size_t lev_oracle(const std::string& a, const std::string& b,
                       std::size_t i, std::size_t j) {
  if (i == a.size()) {
    return b.size() - j;
  }
  if (j == b.size()) {
    return a.size() - i;
  }
  const std::size_t sub =
      lev_oracle(a, b, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
  const std::size_t del = lev_oracle(a, b, i + 1, j) + 1;
  const std::size_t ins = lev_oracle(a, b, i, j + 1) + 1;
  return std::min({sub, del, ins});
}

Outcome criterion_oracles() {
  std::size_t tfidf_checks = 0;
  std::size_t lev_checks = 0;
  std::size_t grid_checks = 0;

  // --- TF-IDF vs brute force on every corpus of at most 20 documents.
  const std::vector<std::string> vocab = {
      "520", "tampines", "central", "ave",   "avenue", "simei", "street",
      "st",  "block",    "north",   "bedok", "marina", "bay",   "10"};
  std::vector<std::vector<std::string>> corpora;
  corpora.push_back(
      {"520 tampines central", "520 tampines ave", "10 simei street"});
  corpora.push_back({"ave ave ave", "ave", ""});  // repeats + empty doc
  poi::Rng rng(poi::derive_seed(4242, "acceptance-tfidf"));
  for (int c = 0; c < 20; ++c) {
    const std::size_t n_docs = 2 + rng.bounded(19);
    std::vector<std::string> corpus;
    for (std::size_t d = 0; d < n_docs; ++d) {
      const std::size_t n_tokens = 1 + rng.bounded(6);
      std::vector<std::string> toks;
      for (std::size_t t = 0; t < n_tokens; ++t) {
        toks.push_back(vocab[rng.bounded(vocab.size())]);
      }
      corpus.push_back(poi::join_tokens(toks));
    }
    corpora.push_back(std::move(corpus));
  }

  for (const auto& corpus : corpora) {
    const poi::TfIdfModel model = poi::fit_tfidf(corpus);
    const BruteTfidf brute(corpus);
    std::vector<std::string> index_to_token(model.vocabulary.size());
    for (const auto& [token, index] : model.vocabulary) {
      index_to_token[static_cast<std::size_t>(index)] = token;
    }
    for (const auto& doc : corpus) {
      for (const auto& [index, w] : poi::tfidf_vector(model, doc)) {
        const double expect =
            brute.weight(index_to_token[static_cast<std::size_t>(index)], doc);
        if (std::fabs(w - expect) > 1e-9) {
          return {false, fmt("tf-idf weight mismatch: %.12f vs %.12f", w,
                             expect)};
        }
        ++tfidf_checks;
      }
    }
    for (const auto& a : corpus) {
      for (const auto& b : corpus) {
        const double got = poi::tfidf_cosine(model, a, b);
        const double expect = brute.cosine(a, b);
        if (std::fabs(got - expect) > 1e-9) {
          return {false, fmt("tf-idf cosine mismatch: %.12f vs %.12f", got,
                             expect)};
        }
        ++tfidf_checks;
      }
    }
  }
  {
    // Pinned value so library and oracle cannot drift in tandem.
    const poi::TfIdfModel model = poi::fit_tfidf(corpora[0]);
    const double got = poi::tfidf_cosine(model, corpora[0][0], corpora[0][1]);
    if (std::fabs(got - 0.2140994912067479) > 1e-9) {
      return {false, fmt("pinned tf-idf cosine drifted: %.16f", got)};
    }
  }

  // --- Levenshtein DP vs the exponential recursive definition.
  std::vector<std::string> words = {
      "",     "a",    "b",      "ab",     "ba",   "abc",  "acb",    "kitten",
      "sitting", "flaw", "lawn", "gumbo", "gambol", "aaaa", "aaab", "abcabc"};
  poi::Rng lev_rng(poi::derive_seed(4242, "acceptance-lev"));
  for (int i = 0; i < 40; ++i) {
    std::string w;
    const std::size_t len = lev_rng.bounded(9);
    for (std::size_t c = 0; c < len; ++c) {
      w += static_cast<char>('a' + lev_rng.bounded(3));
    }
    words.push_back(std::move(w));
  }
  for (const auto& a : words) {
    for (const auto& b : words) {
      if (a.size() > 8 || b.size() > 8) {
        continue;
      }
      if (poi::levenshtein(a, b) != lev_oracle(a, b, 0, 0)) {
        return {false,
                fmt("levenshtein mismatch on \"%s\" vs \"%s\"", a.c_str(),
                    b.c_str())};
      }
      ++lev_checks;
    }
  }

  // --- Grid-index radius queries vs O(n^2) scans on 50 random sets.
  for (int set_i = 0; set_i < 50; ++set_i) {
    poi::Rng grid_rng(
        poi::derive_seed(4242, "acceptance-grid-" + std::to_string(set_i)));
    const double radius = set_i % 3 == 0 ? 50.0 : (set_i % 3 == 1 ? 100.0
                                                                  : 150.0);
    std::vector<poi::StandardPoi> pois(200);
    for (std::size_t i = 0; i < pois.size(); ++i) {
      pois[i].id = fmt("p%03zu", i);
      pois[i].source = "g";
      pois[i].point = poi::GeoPoint(grid_rng.uniform(1.28, 1.31),
                                    grid_rng.uniform(103.84, 103.87));
    }
    const poi::SpatialGridIndex index(pois);
    poi::NeighborOptions options;
    options.radius_m = radius;
    options.cross_source_only = false;
    for (std::size_t i = 0; i < pois.size(); ++i) {
      const auto got = poi::neighbors_within(index, pois, i, options);
      std::vector<std::pair<double, std::size_t>> brute;
      for (std::size_t j = 0; j < pois.size(); ++j) {
        if (j == i) {
          continue;
        }
        const double d = poi::haversine_m(pois[i].point, pois[j].point);
        if (d <= radius) {
          brute.emplace_back(d, j);
        }
      }
      std::sort(brute.begin(), brute.end(),
                [&](const auto& x, const auto& y) {
                  if (x.first != y.first) {
                    return x.first < y.first;
                  }
                  return pois[x.second].id < pois[y.second].id;
                });
      bool equal = got.size() == brute.size();
      for (std::size_t k = 0; equal && k < got.size(); ++k) {
        equal = got[k] == brute[k].second;
      }
      if (!equal) {
        return {false, fmt("grid query mismatch (set %d, centroid %zu)",
                           set_i, i)};
      }
      ++grid_checks;
    }
  }

  return {true, fmt("tf-idf %zu checks, levenshtein %zu pairs, grid %zu "
                    "queries — all within tolerance",
                    tfidf_checks, lev_checks, grid_checks)};
}

// ---------------------------------------------------------------------
// 5. Procurement completeness over 100 seeded synthetic sources: the
// recursive fetch (cap 60 records per rectangle, 25 m floor) recovers
// the exact ground truth unless it emitted a truncation warning, and it
// warns only for the sources seeded with an over-dense cell.

Outcome criterion_procurement() {
  TempTree tree("poiconflate-acceptance-procure");
  const std::vector<poi::GeoPoint> ring = {
      poi::GeoPoint(1.290, 103.850), poi::GeoPoint(1.290, 103.859),
      poi::GeoPoint(1.299, 103.859), poi::GeoPoint(1.299, 103.850),
      poi::GeoPoint(1.290, 103.850)};
  const poi::Polygon area(ring);
  const std::vector<poi::Tile> tiles = poi::plan_initial_grid(area, 250, 250);

  poi::PagedSourceConfig cfg;
  cfg.source_id = "synthetic";
  cfg.page_size = 20;
  cfg.max_results_per_query = 60;

  int dense_sources = 0;
  int clean_sources = 0;
  for (int s = 1; s <= 100; ++s) {
    poi::Rng rng(poi::derive_seed(4242, "acceptance-proc-" + std::to_string(s)));
    std::vector<poi::RawRecord> truth;
    const std::size_t n = 40 + rng.bounded(200);
    const auto add = [&](double lat, double lon) {
      poi::RawRecord rec;
      rec.source_id = cfg.source_id;
      rec.native_id = "r" + std::to_string(truth.size());
      rec.payload["properties"]["native_id"] = rec.native_id;
      rec.payload["properties"]["lat"] = lat;
      rec.payload["properties"]["lon"] = lon;
      truth.push_back(std::move(rec));
    };
    for (std::size_t i = 0; i < n; ++i) {
      add(rng.uniform(1.290, 1.299), rng.uniform(103.850, 103.859));
    }
    const bool dense = s % 3 == 0;
    if (dense) {
      // 70 coincident records: no subdivision can split them below the
      // cap, so the fetch must bottom out at the floor and warn.
      const double lat = rng.uniform(1.2905, 1.2985);
      const double lon = rng.uniform(103.8505, 103.8585);
      for (int i = 0; i < 70; ++i) {
        add(lat, lon);
      }
      ++dense_sources;
    } else {
      ++clean_sources;
    }

    const std::string path =
        (tree.root / ("src-" + std::to_string(s) + ".ndjson")).string();
    poi::save_raw_records(truth, path);
    poi::FileBackedSource source =
        poi::FileBackedSource::from_ndjson(path, cfg);

    std::vector<poi::RawRecord> fetched;
    std::size_t warnings = 0;
    for (const poi::Tile& tile : tiles) {
      poi::FetchResult r = poi::fetch_recursive(tile, source, cfg, 25.0);
      fetched.insert(fetched.end(),
                     std::make_move_iterator(r.records.begin()),
                     std::make_move_iterator(r.records.end()));
      warnings += r.warnings.size();
    }
    fetched = poi::dedupe_by_id(fetched);

    std::set<std::string> truth_ids;
    for (const auto& r : truth) {
      truth_ids.insert(r.native_id);
    }
    std::set<std::string> fetched_ids;
    for (const auto& r : fetched) {
      fetched_ids.insert(r.native_id);
    }
    if (fetched_ids.size() != fetched.size()) {
      return {false, fmt("source %d: duplicate records after dedupe", s)};
    }
    if (warnings == 0) {
      if (fetched_ids != truth_ids) {
        return {false,
                fmt("source %d: silent incompleteness (%zu of %zu records)",
                    s, fetched_ids.size(), truth_ids.size())};
      }
      if (dense) {
        return {false, fmt("source %d: over-dense cell fetched silently", s)};
      }
    } else {
      if (!dense) {
        return {false, fmt("source %d: spurious truncation warning", s)};
      }
      for (const auto& id : fetched_ids) {
        if (truth_ids.count(id) == 0) {
          return {false, fmt("source %d: fabricated record %s", s, id.c_str())};
        }
      }
    }
  }
  return {true, fmt("%d clean sources complete, %d dense sources warned, "
                    "0 silent losses",
                    clean_sources, dense_sources)};
}

// ---------------------------------------------------------------------
// 6. Unification identities and the twelve-case merge-rule fixture.

poi::StandardPoi upoi(const std::string& id, double lat, double lon) {
  poi::StandardPoi p;
  p.id = id;
  p.source = id.substr(0, id.find(':'));
  p.point = poi::GeoPoint(lat, lon);
  p.extraction_date = {2020, 1, 1};
  p.place_types.insert("place");
  return p;
}

const poi::UnifiedPoi* find_unified(const std::vector<poi::UnifiedPoi>& all,
                                    const std::string& id) {
  for (const auto& u : all) {
    if (u.poi.id == id) {
      return &u;
    }
  }
  return nullptr;
}

Outcome criterion_unification() {
  const poi::SourceRanking ranking{
      {"onemap", "sla", "google", "here", "osm"}};
  std::vector<poi::StandardPoi> pois;
  std::vector<std::pair<std::string, std::string>> pairs;
  const auto cluster = [&](const std::vector<poi::StandardPoi>& members) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      pois.push_back(members[i]);
      if (i > 0) {
        pairs.emplace_back(members[i - 1].id, members[i].id);
      }
    }
  };

  // 1. location: mean of the best-ranked source's members only.
  {
    auto a = upoi("onemap:c01a", 1.10, 103.10);
    auto b = upoi("onemap:c01b", 1.20, 103.20);
    auto c = upoi("osm:c01c", 1.90, 103.90);
    cluster({a, b, c});
  }
  // 2. bound: union of member bounds expanded to every member point.
  {
    auto a = upoi("onemap:c02a", 1.30, 103.30);
    a.bound = poi::BoundingBox{1.29, 103.29, 1.31, 103.31};
    auto b = upoi("osm:c02b", 1.35, 103.35);
    cluster({a, b});
  }
  // 3. name: longest among the best-ranked members.
  {
    auto a = upoi("onemap:c03a", 1.40, 103.40);
    a.name = "kopi corner tampines";
    auto b = upoi("onemap:c03b", 1.40, 103.40);
    b.name = "kopi";
    cluster({a, b});
  }
  // 4. authority dominance: a one-letter top-ranked name beats a longer
  // name from a lower-ranked source.
  {
    auto a = upoi("onemap:c04a", 1.41, 103.41);
    a.name = "x";
    auto b = upoi("osm:c04b", 1.41, 103.41);
    b.name = "xxxx";
    cluster({a, b});
  }
  // 5. equal-length name tie broken lexicographically.
  {
    auto a = upoi("onemap:c05a", 1.42, 103.42);
    a.name = "bb";
    auto b = upoi("onemap:c05b", 1.42, 103.42);
    b.name = "ab";
    cluster({a, b});
  }
  // 6. address: longest canonical form among best-ranked members only.
  {
    auto a = upoi("onemap:c06a", 1.43, 103.43);
    poi::AddressComponents ac;
    ac.block_number = "520";
    ac.street_name = "tampines central";
    a.address = ac;
    auto b = upoi("onemap:c06b", 1.43, 103.43);
    poi::AddressComponents bc;
    bc.street_name = "ave";
    b.address = bc;
    auto c = upoi("osm:c06c", 1.43, 103.43);
    poi::AddressComponents cc;
    cc.block_number = "999999";
    cc.street_name = "a very long competitor street name indeed";
    cc.postal_code = "529536";
    c.address = cc;
    cluster({a, b, c});
  }
  // 7. place types: union.
  {
    auto a = upoi("onemap:c07a", 1.44, 103.44);
    a.place_types = {"cafe"};
    auto b = upoi("osm:c07b", 1.44, 103.44);
    b.place_types = {"restaurant"};
    cluster({a, b});
  }
  // 8. tags: union plus per-member location provenance.
  {
    auto a = upoi("onemap:c08a", 1.45, 103.45);
    a.tags = {"halal"};
    auto b = upoi("osm:c08b", 1.45, 103.45);
    b.tags = {"wheelchair"};
    cluster({a, b});
  }
  // 9. ids and sources: unions; merged id joins members with '+'.
  {
    cluster({upoi("onemap:c09a", 1.46, 103.46), upoi("osm:c09b", 1.46, 103.46)});
  }
  // 10. extraction date: latest member wins.
  {
    auto a = upoi("onemap:c10a", 1.47, 103.47);
    a.extraction_date = {2019, 1, 1};
    auto b = upoi("osm:c10b", 1.47, 103.47);
    b.extraction_date = {2021, 3, 4};
    cluster({a, b});
  }
  // 11. requires_verification: OR over members.
  {
    auto a = upoi("onemap:c11a", 1.48, 103.48);
    auto b = upoi("osm:c11b", 1.48, 103.48);
    b.requires_verification = true;
    cluster({a, b});
  }
  // 12. a merge that ends with no place types is flagged for review.
  {
    auto a = upoi("onemap:c12a", 1.49, 103.49);
    a.place_types.clear();
    auto b = upoi("osm:c12b", 1.49, 103.49);
    b.place_types.clear();
    cluster({a, b});
  }
  // Unmatched singletons for the count identity.
  pois.push_back(upoi("google:lone1", 1.50, 103.50));
  pois.push_back(upoi("here:lone2", 1.51, 103.51));
  pois.push_back(upoi("osm:lone3", 1.52, 103.52));

  const std::size_t merges = pairs.size();  // every pair shrinks |output| by 1
  const auto unified = poi::unify_dataset(pois, pairs, ranking);
  if (unified.size() != pois.size() - merges) {
    return {false, fmt("count identity violated: %zu places from %zu records "
                       "and %zu merges",
                       unified.size(), pois.size(), merges)};
  }

  const auto fail = [](const std::string& what) {
    return Outcome{false, "merge rule broken: " + what};
  };
  const auto* c01 = find_unified(unified, "onemap:c01a+onemap:c01b+osm:c01c");
  if (c01 == nullptr ||
      std::fabs(c01->poi.point.lat() - 1.15) > 1e-9 ||
      std::fabs(c01->poi.point.lon() - 103.15) > 1e-9) {
    return fail("location is not the best-ranked members' centroid");
  }
  const auto* c02 = find_unified(unified, "onemap:c02a+osm:c02b");
  if (c02 == nullptr || !c02->poi.bound.has_value() ||
      std::fabs(c02->poi.bound->south - 1.29) > 1e-9 ||
      std::fabs(c02->poi.bound->west - 103.29) > 1e-9 ||
      std::fabs(c02->poi.bound->north - 1.35) > 1e-9 ||
      std::fabs(c02->poi.bound->east - 103.35) > 1e-9) {
    return fail("bound does not cover every member");
  }
  const auto* c03 = find_unified(unified, "onemap:c03a+onemap:c03b");
  if (c03 == nullptr || c03->poi.name != "kopi corner tampines") {
    return fail("name is not the longest best-ranked name");
  }
  const auto* c04 = find_unified(unified, "onemap:c04a+osm:c04b");
  if (c04 == nullptr || c04->poi.name != "x") {
    return fail("lower-ranked source outvoted the authority on name");
  }
  const auto* c05 = find_unified(unified, "onemap:c05a+onemap:c05b");
  if (c05 == nullptr || c05->poi.name != "ab") {
    return fail("equal-length name tie not broken lexicographically");
  }
  const auto* c06 =
      find_unified(unified, "onemap:c06a+onemap:c06b+osm:c06c");
  if (c06 == nullptr || !c06->poi.address.has_value() ||
      poi::canonical_address_string(*c06->poi.address) !=
          "520 tampines central") {
    return fail("address is not the longest best-ranked canonical form");
  }
  const auto* c07 = find_unified(unified, "onemap:c07a+osm:c07b");
  if (c07 == nullptr ||
      c07->poi.place_types != std::set<std::string>{"cafe", "restaurant"}) {
    return fail("place types are not the union");
  }
  const auto* c08 = find_unified(unified, "onemap:c08a+osm:c08b");
  if (c08 == nullptr || c08->poi.tags.count("halal") == 0 ||
      c08->poi.tags.count("wheelchair") == 0) {
    return fail("tags are not the union");
  }
  bool prov_a = false;
  bool prov_b = false;
  if (c08 != nullptr) {
    for (const auto& tag : c08->poi.tags) {
      prov_a = prov_a || tag.rfind("src_location:onemap:c08a:", 0) == 0;
      prov_b = prov_b || tag.rfind("src_location:osm:c08b:", 0) == 0;
    }
  }
  if (!prov_a || !prov_b) {
    return fail("member locations lost in the merge");
  }
  const auto* c09 = find_unified(unified, "onemap:c09a+osm:c09b");
  if (c09 == nullptr ||
      c09->contributing_ids !=
          std::set<std::string>{"onemap:c09a", "osm:c09b"} ||
      c09->contributing_sources != std::set<std::string>{"onemap", "osm"}) {
    return fail("id/source provenance is not the union");
  }
  const auto* c10 = find_unified(unified, "onemap:c10a+osm:c10b");
  if (c10 == nullptr || c10->poi.extraction_date.to_string() != "2021-03-04") {
    return fail("extraction date is not the latest");
  }
  const auto* c11 = find_unified(unified, "onemap:c11a+osm:c11b");
  if (c11 == nullptr || !c11->poi.requires_verification) {
    return fail("verification flag did not propagate");
  }
  const auto* c12 = find_unified(unified, "onemap:c12a+osm:c12b");
  if (c12 == nullptr || !c12->poi.requires_verification) {
    return fail("type-less merge not flagged for review");
  }

  // Idempotence: unify of the unified output is a byte-identical no-op.
  TempTree tree("poiconflate-acceptance-unify");
  std::vector<poi::StandardPoi> once;
  for (const auto& u : unified) {
    once.push_back(u.poi);
  }
  const auto twice_unified = poi::unify_dataset(once, {}, ranking);
  std::vector<poi::StandardPoi> twice;
  for (const auto& u : twice_unified) {
    twice.push_back(u.poi);
  }
  const std::string p1 = (tree.root / "once.ndjson").string();
  const std::string p2 = (tree.root / "twice.ndjson").string();
  poi::save_dataset(once, p1);
  poi::save_dataset(twice, p2);
  if (poi::sha256_file(p1) != poi::sha256_file(p2)) {
    return {false, "unify applied twice is not a fixed point"};
  }

  return {true, fmt("count identity (%zu = %zu - %zu), 12 merge rules, "
                    "idempotent re-unify",
                    unified.size(), pois.size(), merges)};
}

// ---------------------------------------------------------------------
// 7. Metric sanity on a heavily imbalanced label set, plus exact
// coverage-report percentage rendering.

Outcome criterion_metrics() {
  std::vector<bool> y_true(8698, false);
  std::fill_n(y_true.begin(), 200, true);
  const std::vector<bool> y_pred(8698, false);

  const poi::ConfusionCounts c = poi::confusion_counts(y_pred, y_true);
  const double overall = poi::overall_accuracy(c);
  const double balanced = poi::balanced_accuracy(y_pred, y_true);
  if (std::fabs(overall - 0.977) > 0.001 ||
      std::fabs(overall - 8498.0 / 8698.0) > 1e-12) {
    return {false, fmt("overall accuracy %.6f, expected ~0.977", overall)};
  }
  if (balanced != 0.5) {
    return {false, fmt("balanced accuracy %.6f, expected exactly 0.5",
                       balanced)};
  }

  // 385 records with coordinates, 291 of them with an address.
  std::map<std::string, std::vector<poi::StandardPoi>> by_source;
  for (int i = 0; i < 385; ++i) {
    poi::StandardPoi p;
    p.id = "osm:" + std::to_string(i);
    p.source = "osm";
    p.point = poi::GeoPoint(1.3 + i * 1e-5, 103.8);
    if (i < 291) {
      poi::AddressComponents ac;
      ac.street_name = "jalan " + std::to_string(i);
      p.address = ac;
    }
    by_source["osm"].push_back(std::move(p));
  }
  const poi::CoverageReport report = poi::coverage_report(by_source, nullptr);
  const poi::CoverageRow* osm = nullptr;
  for (const auto& row : report.rows) {
    if (row.source == "osm") {
      osm = &row;
    }
  }
  if (osm == nullptr || osm->total != 385) {
    return {false, "coverage report lost the source row"};
  }
  const std::string coord_pct =
      poi::coverage_percent(osm->present.at("coordinates"), osm->total);
  const std::string addr_pct =
      poi::coverage_percent(osm->present.at("address"), osm->total);
  if (coord_pct != "100.0" || addr_pct != "75.6") {
    return {false, fmt("coverage rendered %s%% / %s%%, expected 100.0 / 75.6",
                       coord_pct.c_str(), addr_pct.c_str())};
  }
  return {true, fmt("all-non-match: overall %.6f, balanced %.1f; coverage "
                    "row 385 -> %s%% coordinates, %s%% address",
                    overall, balanced, coord_pct.c_str(), addr_pct.c_str())};
}

// ---------------------------------------------------------------------
// 8. Taxonomy gating: nothing maps below the 0.95 cosine floor, every
// unmappable label is flagged, and replaying the audit log clears every
// flag on a fresh copy of the dataset.

Outcome criterion_taxonomy() {
  poi::EmbeddingStore store;
  store.dim = 2;
  store.vectors = {{"restaurant", {1.0, 0.0}}, {"store", {0.0, 1.0}},
                   {"asian", {1.0, 0.4}},      {"eatery", {1.0, -0.4}},
                   {"cafe", {0.98, 0.02}},     {"noodle", {0.7, 0.7}}};
  const std::vector<std::string> targets = {"restaurant", "store"};

  // Gate: for a spread of labels, every accepted mapping scores >= 0.95
  // and every rejection is flagged with nothing mapped.
  std::size_t mapped_labels = 0;
  std::size_t flagged_labels = 0;
  const std::vector<std::string> probe_labels = {
      "cafe",   "asian eatery", "restaurant", "store",  "noodle",
      "bookstore", "noodle cafe", "asian",    "eatery", "zzzq"};
  for (const std::string& label : probe_labels) {
    const poi::TaxonomyMapping m =
        poi::map_place_type(label, targets, store, 0.95);
    if (m.flagged != m.mapped_labels.empty()) {
      return {false, "flag disagrees with mapping emptiness: " + label};
    }
    if (m.flagged) {
      ++flagged_labels;
      continue;
    }
    ++mapped_labels;
    for (const auto& [target, score] : m.scores) {
      if (score < 0.95) {
        return {false,
                fmt("\"%s\" mapped to %s at %.4f, below the 0.95 floor",
                    label.c_str(), target.c_str(), score)};
      }
    }
  }

  // Dataset pass: unmappable labels and empty type sets raise flags.
  std::vector<poi::StandardPoi> pois;
  for (int i = 1; i <= 4; ++i) {
    poi::StandardPoi p;
    p.id = "v:" + std::to_string(i);
    p.source = "v";
    p.point = poi::GeoPoint(1.3, 103.8 + i * 1e-4);
    p.extraction_date = {2023, 5, 1};
    pois.push_back(std::move(p));
  }
  pois[0].place_types = {"cafe"};
  pois[1].place_types = {"bookstore"};
  // pois[2] reached this stage with no place types (e.g. flagged when a
  // merge ended type-less) — the flag must survive the taxonomy pass.
  pois[2].requires_verification = true;
  pois[3].place_types = {"asian eatery"};

  poi::TaxonomyOptions options;
  options.threshold = 0.95;
  const std::vector<poi::StandardPoi> mapped =
      poi::apply_taxonomy(pois, targets, store, options);
  if (mapped[0].place_types != std::set<std::string>{"restaurant"} ||
      mapped[0].requires_verification) {
    return {false, "in-vocabulary label failed to map"};
  }
  if (mapped[3].place_types != std::set<std::string>{"restaurant"} ||
      mapped[3].requires_verification) {
    return {false, "multi-word label failed to map through its phrase"};
  }
  const auto flagged = poi::list_flagged(mapped);
  std::map<std::string, std::vector<std::string>> flag_reasons;
  for (const auto& f : flagged) {
    flag_reasons[f.id] = f.reasons;
  }
  if (flag_reasons.size() != 2 || flag_reasons.count("v:2") == 0 ||
      flag_reasons.count("v:3") == 0) {
    return {false, fmt("expected v:2 and v:3 flagged, got %zu flags",
                       flag_reasons.size())};
  }
  const auto has_reason = [&](const std::string& id, const char* reason) {
    const auto& rs = flag_reasons[id];
    return std::find(rs.begin(), rs.end(), reason) != rs.end();
  };
  if (!has_reason("v:2", poi::kReasonUnmappedTaxonomy) ||
      !has_reason("v:3", poi::kReasonMissingPlaceType)) {
    return {false, "flag reasons do not identify the failure mode"};
  }

  // Resolve every flag, keeping the audit log; replaying that log on a
  // fresh copy must produce the same dataset with nothing flagged.
  std::vector<poi::Resolution> resolutions(2);
  resolutions[0].poi_id = "v:2";
  resolutions[0].action = poi::Resolution::Action::kAssignTypes;
  resolutions[0].labels = {"Store"};
  resolutions[1].poi_id = "v:3";
  resolutions[1].action = poi::Resolution::Action::kDismiss;

  std::vector<poi::AuditEntry> audit;
  const std::vector<poi::StandardPoi> resolved =
      poi::apply_resolutions(mapped, resolutions, "acceptance", &audit);
  if (!poi::list_flagged(resolved).empty()) {
    return {false, "flags survived their resolutions"};
  }

  TempTree tree("poiconflate-acceptance-verify");
  const std::string log_path = (tree.root / "audit.ndjson").string();
  poi::append_audit_log(log_path, audit);
  const std::vector<poi::Resolution> replayed_res =
      poi::resolutions_from_audit(poi::load_audit_log(log_path));
  const std::vector<poi::StandardPoi> replayed =
      poi::apply_resolutions(mapped, replayed_res, "replay", nullptr);
  if (!poi::list_flagged(replayed).empty()) {
    return {false, "replaying the audit log left flags behind"};
  }
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    if (replayed[i].place_types != resolved[i].place_types ||
        replayed[i].requires_verification !=
            resolved[i].requires_verification) {
      return {false, "audit replay diverged from the original resolution"};
    }
  }
  return {true, fmt("%zu labels mapped (all >= 0.95), %zu flagged; audit "
                    "replay cleared every flag",
                    mapped_labels, flagged_labels)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };

  // Criteria 2 and 3 share one expensive evaluation pass.
  LadderStats ladder;
  bool ladder_ready = false;
  const auto ensure_ladder = [&]() -> const LadderStats& {
    if (!ladder_ready) {
      ladder = run_ladder();
      ladder_ready = true;
    }
    return ladder;
  };

  const std::vector<Criterion> criteria = {
      {"throughput", criterion_throughput},
      {"accuracy ladder", [&] { return criterion_ladder(ensure_ladder()); }},
      {"rebalancing effect",
       [&] { return criterion_rebalancing(ensure_ladder()); }},
      {"oracle parity", criterion_oracles},
      {"procurement completeness", criterion_procurement},
      {"unification identities", criterion_unification},
      {"metric sanity", criterion_metrics},
      {"taxonomy gating", criterion_taxonomy},
  };

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all_ok = all_ok && outcome.ok;
    std::printf("[%s] %zu/8 %s — %s\n", outcome.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
