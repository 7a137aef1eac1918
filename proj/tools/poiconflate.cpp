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

// poiconflate — point-of-interest conflation toolkit.
//
// One subcommand per pipeline stage plus `run` for the whole chain:
//   procure | normalize | taxonomy-map | train | match | unify | verify |
//   evaluate | coverage | fixture | run
//
// Exit codes: 0 success, 1 stage/runtime error, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poi/evaluation.hpp"
#include "poi/matcher.hpp"
#include "poi/normalization.hpp"
#include "poi/persistence.hpp"
#include "poi/pipeline.hpp"
#include "poi/procurement.hpp"
#include "poi/taxonomy.hpp"
#include "poi/toml.hpp"
#include "poi/unification.hpp"
#include "poi/verification.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitStageError = 1;
constexpr int kExitConfigError = 2;

// "250x250" → (width_m, height_m).
std::pair<double, double> parse_tile(const std::string& text) {
  const std::size_t x = text.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= text.size()) {
    throw std::invalid_argument("--tile expects WIDTHxHEIGHT, e.g. 250x250");
  }
  const double w = std::stod(text.substr(0, x));
  const double h = std::stod(text.substr(x + 1));
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("--tile dimensions must be positive");
  }
  return {w, h};
}

std::vector<poi::StandardPoi> load_pois_or_die(const std::string& path) {
  poi::LoadReport report = poi::load_dataset(path);
  for (const std::string& e : report.errors) {
    std::cerr << path << ": " << e << '\n';
  }
  return std::move(report.pois);
}

poi::SourceRanking load_ranking(const std::string& path) {
  const poi::toml::Table table = poi::toml::parse_file(path);
  poi::SourceRanking ranking;
  for (const poi::toml::Value& v : table.require_array("ordered_sources")) {
    ranking.ordered_sources.push_back(v.as_string());
  }
  return ranking;
}

struct Args {
  std::uint64_t seed = 42;

  // procure
  std::string source_config;
  std::string input;
  std::string area;
  std::string tile = "250x250";
  double min_dim = 25.0;

  // shared paths
  std::string in;
  std::vector<std::string> ins;
  std::string out;
  std::string profile;
  std::string date = "1970-01-01";
  std::string vocab;

  // taxonomy
  std::string embeddings;
  std::string subwords;
  std::string taxonomy;
  double threshold = 0.95;
  std::vector<std::string> passthrough;

  // train / match
  std::string pairs;
  std::string labels;
  std::string pois;
  std::string algo = "bagging";
  std::string backend = "hybrid";
  int k = 10;
  bool no_rebalance = false;
  bool tune = false;
  int n_trees = 50;
  int max_depth = 2;
  double learning_rate = 0.1;
  std::string model;
  std::string baseline;
  double alpha = 0.80;
  double beta = 0.20;
  double vthreshold = 0.85;
  double radius = 100.0;
  bool same_source = false;
  int threads = 0;

  // unify
  std::string ranking;

  // verify
  bool list_only = false;
  std::string resolutions;
  std::string replay;
  std::string audit_log;
  std::string operator_name = "cli";
  bool interactive = false;

  // evaluate / coverage
  std::string unified;
  std::string csv_out;

  // fixture
  int n = 1227;
  int sources = 5;
  double dup_rate = 0.14;

  // run
  std::string config;
};

int cmd_procure(const Args& a) {
  const auto [tile_w, tile_h] = parse_tile(a.tile);
  const poi::PagedSourceConfig cfg =
      poi::PagedSourceConfig::from_file(a.source_config);
  std::unique_ptr<poi::PagedSource> source;
  if (!a.input.empty()) {
    source = std::make_unique<poi::FileBackedSource>(
        poi::FileBackedSource::from_ndjson(a.input, cfg));
  } else {
    source = std::make_unique<poi::HttpPagedSource>(cfg);
  }
  const poi::Polygon study_area = poi::load_polygon(a.area);
  const std::vector<poi::Tile> tiles =
      poi::plan_initial_grid(study_area, tile_w, tile_h);

  std::vector<poi::RawRecord> records;
  std::size_t warning_count = 0;
  for (const poi::Tile& tile : tiles) {
    poi::FetchResult fetched =
        poi::fetch_recursive(tile, *source, cfg, a.min_dim);
    records.insert(records.end(),
                   std::make_move_iterator(fetched.records.begin()),
                   std::make_move_iterator(fetched.records.end()));
    for (const std::string& w : fetched.warnings) {
      std::cerr << "warning: " << w << '\n';
      ++warning_count;
    }
  }
  records = poi::dedupe_by_id(records);
  poi::save_raw_records(records, a.out);
  std::cout << "procured " << records.size() << " record(s) from "
            << tiles.size() << " tile(s)";
  if (warning_count > 0) {
    std::cout << " (" << warning_count << " truncation warning(s))";
  }
  std::cout << '\n';
  return kExitOk;
}

int cmd_normalize(const Args& a) {
  const poi::SourceProfile profile = poi::SourceProfile::from_file(a.profile);
  const auto date = poi::Date::parse(a.date);
  if (!date.has_value()) {
    throw std::invalid_argument("--date must be YYYY-MM-DD");
  }
  const poi::AddressVocabulary vocab =
      a.vocab.empty() ? poi::AddressVocabulary::defaults()
                      : poi::AddressVocabulary::from_file(a.vocab);
  const std::vector<poi::RawRecord> records =
      poi::load_raw_records(a.in, profile.source_id);
  const poi::StandardizeResult result =
      poi::standardize_all(records, profile, *date, vocab);
  for (const std::string& e : result.errors) {
    std::cerr << "skipped: " << e << '\n';
  }
  poi::save_dataset(result.pois, a.out);
  std::cout << "standardized " << result.pois.size() << " of "
            << records.size() << " record(s)\n";
  return kExitOk;
}

int cmd_taxonomy_map(const Args& a) {
  std::vector<poi::StandardPoi> pois = load_pois_or_die(a.in);
  poi::EmbeddingStore store = poi::load_embeddings(a.embeddings);
  if (!a.subwords.empty()) {
    poi::load_subword_ngrams(a.subwords, &store);
  }
  const std::vector<std::string> targets =
      poi::load_target_taxonomy(a.taxonomy);
  poi::TaxonomyOptions options;
  options.threshold = a.threshold;
  options.passthrough_sources.insert(a.passthrough.begin(),
                                     a.passthrough.end());
  std::vector<poi::StandardPoi> mapped =
      poi::apply_taxonomy(std::move(pois), targets, store, options);
  std::size_t flagged = 0;
  for (const poi::StandardPoi& p : mapped) {
    flagged += p.requires_verification ? 1 : 0;
  }
  poi::save_dataset(mapped, a.out);
  std::cout << "mapped " << mapped.size() << " record(s), " << flagged
            << " flagged for verification\n";
  return kExitOk;
}

poi::MatchOptions match_options(const Args& a,
                                poi::FeatureBackend backend) {
  poi::MatchOptions options;
  options.radius_m = a.radius;
  options.cross_source_only = !a.same_source;
  options.backend = backend;
  options.num_threads = a.threads;
  return options;
}

int cmd_train(const Args& a) {
  const std::vector<poi::StandardPoi> pois = load_pois_or_die(a.pois);
  const auto labels = poi::load_labeled_pairs(a.pairs);

  poi::TrainOptions options;
  options.algorithm = poi::algorithm_from_string(a.algo);
  options.backend = poi::feature_backend_from_string(a.backend);
  options.k = a.k;
  options.rebalance = !a.no_rebalance;
  options.tune = a.tune;
  options.hyperparams = {a.n_trees, a.max_depth, a.learning_rate};
  options.seed = a.seed;

  const std::vector<poi::FeaturePair> computed =
      poi::featurize_all(pois, match_options(a, options.backend));
  std::size_t missing = 0;
  const std::vector<poi::FeaturePair> labeled =
      poi::join_labels(computed, labels, &missing);
  if (missing > 0) {
    std::cerr << "warning: " << missing
              << " labeled pair(s) outside the candidate radius\n";
  }
  std::size_t positives = 0;
  for (const poi::FeaturePair& p : labeled) {
    positives += (p.label.has_value() && *p.label) ? 1 : 0;
  }
  const poi::MatchModel model = poi::train_model(labeled, options);
  poi::save_model(model, a.out);
  std::cout << "trained " << poi::to_string(model.algorithm) << " ("
            << poi::to_string(model.backend) << " features, "
            << model.sub_models.size() << " sub-model(s)) on "
            << labeled.size() << " pair(s), " << positives << " positive\n";
  return kExitOk;
}

int cmd_match(const Args& a) {
  const std::vector<poi::StandardPoi> pois = load_pois_or_die(a.pois);
  if (a.model.empty() == a.baseline.empty()) {
    throw std::invalid_argument(
        "exactly one of --model or --baseline is required");
  }
  std::vector<poi::DecidedPair> decided;
  if (!a.model.empty()) {
    const poi::MatchModel model = poi::load_model(a.model);
    decided = poi::match_all(pois, &model, match_options(a, model.backend));
  } else {
    const poi::FeatureBackend backend =
        poi::feature_backend_from_string(a.baseline);
    const poi::WsaParams params{a.alpha, a.beta, a.vthreshold};
    decided = poi::match_all(pois, params, match_options(a, backend));
  }
  std::size_t matches = 0;
  for (const poi::DecidedPair& p : decided) {
    matches += p.is_match ? 1 : 0;
  }
  poi::save_decided_pairs(decided, a.out);
  std::cout << "decided " << decided.size() << " candidate pair(s), "
            << matches << " match(es)\n";
  return kExitOk;
}

int cmd_unify(const Args& a) {
  const std::vector<poi::StandardPoi> pois = load_pois_or_die(a.pois);
  const auto match_pairs = poi::load_match_pairs(a.pairs);
  const poi::SourceRanking ranking =
      a.ranking.empty() ? poi::SourceRanking{} : load_ranking(a.ranking);
  const std::vector<poi::UnifiedPoi> unified =
      poi::unify_dataset(pois, match_pairs, ranking);
  poi::save_unified(unified, a.out, poi::format_from_path(a.out));
  std::cout << "unified " << pois.size() << " record(s) into "
            << unified.size() << " place(s)\n";
  return kExitOk;
}

void print_flagged(const std::vector<poi::StandardPoi>& pois) {
  const std::vector<poi::FlaggedPoi> flagged = poi::list_flagged(pois);
  for (const poi::FlaggedPoi& f : flagged) {
    std::cout << f.id << ":";
    for (const std::string& r : f.reasons) {
      std::cout << ' ' << r;
    }
    for (const std::string& tag : pois[f.index].tags) {
      if (tag.rfind(poi::kUnmappedTypeTagPrefix, 0) == 0) {
        std::cout << " [" << tag.substr(std::string(
                                            poi::kUnmappedTypeTagPrefix)
                                            .size())
                  << "]";
      }
    }
    std::cout << '\n';
  }
  std::cout << flagged.size() << " flagged record(s)\n";
}

int run_interactive(std::vector<poi::StandardPoi>* pois, const Args& a,
                    std::vector<poi::AuditEntry>* audit) {
  std::unique_ptr<poi::EmbeddingStore> store;
  std::vector<std::string> targets;
  if (!a.embeddings.empty() && !a.taxonomy.empty()) {
    store = std::make_unique<poi::EmbeddingStore>(
        poi::load_embeddings(a.embeddings));
    if (!a.subwords.empty()) {
      poi::load_subword_ngrams(a.subwords, store.get());
    }
    targets = poi::load_target_taxonomy(a.taxonomy);
  }

  for (const poi::FlaggedPoi& f : poi::list_flagged(*pois)) {
    const poi::StandardPoi& p = (*pois)[f.index];
    std::cout << "\n" << p.id << (p.has_name() ? " — " + p.name : "") << '\n';
    for (const std::string& r : f.reasons) {
      std::cout << "  reason: " << r << '\n';
    }
    for (const std::string& tag : p.tags) {
      if (tag.rfind(poi::kUnmappedTypeTagPrefix, 0) != 0) {
        continue;
      }
      const std::string label =
          tag.substr(std::string(poi::kUnmappedTypeTagPrefix).size());
      std::cout << "  original label: " << label << '\n';
      if (store != nullptr) {
        for (const auto& [suggestion, score] :
             poi::suggest_labels(label, targets, *store)) {
          std::printf("    suggestion: %-30s %.4f\n", suggestion.c_str(),
                      score);
        }
      }
    }
    std::cout << "  [labels pipe-separated to assign | d = dismiss | "
                 "s = skip | q = quit] > "
              << std::flush;
    std::string line;
    if (!std::getline(std::cin, line) || line == "q") {
      break;
    }
    if (line == "s" || line.empty()) {
      continue;
    }
    poi::Resolution res;
    res.poi_id = p.id;
    if (line == "d") {
      res.action = poi::Resolution::Action::kDismiss;
    } else {
      res.action = poi::Resolution::Action::kAssignTypes;
      std::string cur;
      for (char c : line + "|") {
        if (c == '|') {
          if (!cur.empty()) {
            res.labels.insert(cur);
          }
          cur.clear();
        } else {
          cur += c;
        }
      }
    }
    poi::resolve_flag(pois, res, a.operator_name, audit);
  }
  return kExitOk;
}

int cmd_verify(const Args& a) {
  std::vector<poi::StandardPoi> pois = load_pois_or_die(a.in);

  if (a.list_only ||
      (a.resolutions.empty() && a.replay.empty() && !a.interactive)) {
    print_flagged(pois);
    return kExitOk;
  }

  std::vector<poi::AuditEntry> audit;
  if (a.interactive) {
    run_interactive(&pois, a, &audit);
  } else if (!a.resolutions.empty()) {
    const std::vector<poi::Resolution> resolutions =
        poi::load_resolutions_csv(a.resolutions);
    pois = poi::apply_resolutions(std::move(pois), resolutions,
                                  a.operator_name, &audit);
  } else {
    const std::vector<poi::Resolution> resolutions =
        poi::resolutions_from_audit(poi::load_audit_log(a.replay));
    pois = poi::apply_resolutions(std::move(pois), resolutions,
                                  a.operator_name, nullptr);
  }
  if (!a.audit_log.empty() && !audit.empty()) {
    poi::append_audit_log(a.audit_log, audit);
  }
  if (!a.out.empty()) {
    poi::save_dataset(pois, a.out);
  }
  std::cout << poi::list_flagged(pois).size()
            << " record(s) still flagged\n";
  return kExitOk;
}

int cmd_evaluate(const Args& a) {
  const auto predictions = poi::load_pair_decisions(a.pairs);
  const auto labels = poi::load_pair_decisions(a.labels);
  std::vector<bool> y_pred;
  std::vector<bool> y_true;
  std::size_t unpredicted = 0;
  for (const auto& [key, label] : labels) {
    const auto it = predictions.find(key);
    if (it == predictions.end()) {
      // A labeled pair the matcher never scored (outside the candidate
      // radius) counts as a non-match prediction.
      ++unpredicted;
      y_pred.push_back(false);
    } else {
      y_pred.push_back(it->second);
    }
    y_true.push_back(label);
  }
  const poi::ConfusionCounts c = poi::confusion_counts(y_pred, y_true);
  std::printf("pairs evaluated:   %lld\n", static_cast<long long>(c.total()));
  std::printf("tp=%lld fp=%lld tn=%lld fn=%lld\n",
              static_cast<long long>(c.tp), static_cast<long long>(c.fp),
              static_cast<long long>(c.tn), static_cast<long long>(c.fn));
  std::printf("overall accuracy:  %.4f\n", poi::overall_accuracy(c));
  try {
    std::printf("balanced accuracy: %.4f\n",
                poi::balanced_accuracy(y_pred, y_true));
  } catch (const std::exception&) {
    std::printf("balanced accuracy: undefined (single-class labels)\n");
  }
  if (unpredicted > 0) {
    std::cerr << "note: " << unpredicted
              << " labeled pair(s) had no prediction (counted as "
                 "non-match)\n";
  }
  return kExitOk;
}

int cmd_coverage(const Args& a) {
  std::map<std::string, std::vector<poi::StandardPoi>> by_source;
  for (const std::string& path : a.ins) {
    for (poi::StandardPoi& p : load_pois_or_die(path)) {
      by_source[p.source].push_back(std::move(p));
    }
  }
  std::vector<poi::StandardPoi> unified;
  if (!a.unified.empty()) {
    for (const poi::UnifiedPoi& u : poi::load_unified(a.unified)) {
      unified.push_back(u.poi);
    }
  }
  const poi::CoverageReport report = poi::coverage_report(
      by_source, a.unified.empty() ? nullptr : &unified);
  std::cout << poi::coverage_to_text(report);
  if (!a.csv_out.empty()) {
    std::ofstream out(a.csv_out, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write " + a.csv_out);
    }
    out << poi::coverage_to_csv(report);
  }
  return kExitOk;
}

int cmd_fixture(const Args& a) {
  poi::FixtureConfig cfg;
  cfg.seed = a.seed;
  cfg.n_pois = a.n;
  cfg.n_sources = a.sources;
  cfg.duplicate_rate = a.dup_rate;
  const poi::Fixture fixture = poi::generate_fixture(cfg);

  fs::create_directories(a.out);
  const std::string pois_path = (fs::path(a.out) / "pois.ndjson").string();
  const std::string labels_path = (fs::path(a.out) / "labels.csv").string();
  poi::save_dataset(fixture.pois, pois_path);
  poi::save_labeled_pairs(fixture.labeled_pairs, labels_path);

  std::size_t positives = 0;
  for (const poi::FeaturePair& p : fixture.labeled_pairs) {
    positives += (p.label.has_value() && *p.label) ? 1 : 0;
  }
  std::cout << "fixture: " << fixture.pois.size() << " POIs, "
            << fixture.labeled_pairs.size() << " labeled pair(s), "
            << positives << " match(es)";
  if (!fixture.labeled_pairs.empty()) {
    std::printf(" (%.2f%%)", 100.0 * static_cast<double>(positives) /
                                 static_cast<double>(
                                     fixture.labeled_pairs.size()));
  }
  std::cout << '\n';
  return kExitOk;
}

int cmd_run(const Args& a, bool seed_overridden) {
  poi::PipelineConfig config = poi::PipelineConfig::from_file(a.config);
  if (seed_overridden) {
    config.seed = a.seed;
  }
  const poi::PipelineResult result = poi::run_pipeline(config);
  for (const std::string& w : result.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  for (const poi::StageRecord& s : result.stages) {
    std::printf("stage %-12s %6lld ms\n", s.name.c_str(),
                static_cast<long long>(s.duration_ms));
  }
  for (const auto& [name, path] : result.artifacts) {
    std::cout << name << ": " << path << '\n';
  }
  std::cout << "manifest: " << result.manifest_path << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poiconflate — multi-source point-of-interest conflation"};
  app.require_subcommand(1);

  Args a;
  auto* seed_opt = app.add_option("--seed", a.seed, "Random seed (global)");

  auto* procure = app.add_subcommand("procure", "Fetch raw records");
  procure->add_option("--source", a.source_config, "Source config TOML")
      ->required();
  procure->add_option("--input", a.input,
                      "ndjson records for a file-backed source (omit to "
                      "use the HTTP adapter)");
  procure->add_option("--area", a.area, "Study-area polygon GeoJSON")
      ->required();
  procure->add_option("--tile", a.tile, "Initial tile size, e.g. 250x250");
  procure->add_option("--min-dim", a.min_dim,
                      "Minimum tile dimension in meters");
  procure->add_option("--out", a.out, "Output ndjson")->required();

  auto* normalize = app.add_subcommand("normalize", "Standardize raw records");
  normalize->add_option("--in", a.in, "Raw ndjson")->required();
  normalize->add_option("--profile", a.profile, "Source profile TOML")
      ->required();
  normalize->add_option("--date", a.date, "Extraction date YYYY-MM-DD");
  normalize->add_option("--vocab", a.vocab, "Address vocabulary TOML");
  normalize->add_option("--out", a.out, "Output ndjson")->required();

  auto* taxmap =
      app.add_subcommand("taxonomy-map", "Map place types onto a taxonomy");
  taxmap->add_option("--in", a.in, "Standardized dataset")->required();
  taxmap->add_option("--embeddings", a.embeddings, "Word-vector file")
      ->required();
  taxmap->add_option("--subwords", a.subwords, "Character n-gram vectors");
  taxmap->add_option("--taxonomy", a.taxonomy, "Target labels, one per line")
      ->required();
  taxmap->add_option("--threshold", a.threshold, "Cosine threshold");
  taxmap->add_option("--passthrough", a.passthrough,
                     "Sources already on the target taxonomy");
  taxmap->add_option("--out", a.out, "Output dataset")->required();

  auto* train = app.add_subcommand("train", "Train a match classifier");
  train->add_option("--pairs", a.pairs, "Labeled pairs CSV")->required();
  train->add_option("--pois", a.pois, "Dataset the pairs refer to")
      ->required();
  train->add_option("--algo", a.algo, "bagging | gb");
  train->add_option("--backend", a.backend, "string | tfidf | hybrid");
  train->add_option("--k", a.k, "Number of rebalanced datasets");
  train->add_flag("--no-rebalance", a.no_rebalance,
                  "Train one sub-model on the raw class balance");
  train->add_flag("--tune", a.tune, "Cross-validate the hyperparameter grid");
  train->add_option("--n-trees", a.n_trees, "Trees per sub-model");
  train->add_option("--max-depth", a.max_depth, "Tree depth");
  train->add_option("--learning-rate", a.learning_rate,
                    "Gradient-boosting shrinkage");
  train->add_option("--radius", a.radius, "Candidate radius in meters");
  train->add_option("--threads", a.threads, "Worker threads (0 = auto)");
  train->add_option("--out", a.out, "Model output path")->required();

  auto* match = app.add_subcommand("match", "Decide candidate pairs");
  match->add_option("--pois", a.pois, "Dataset to match")->required();
  match->add_option("--model", a.model, "Trained model JSON");
  match->add_option("--baseline", a.baseline,
                    "WSA baseline backend: string | tfidf | hybrid");
  match->add_option("--alpha", a.alpha, "WSA name weight");
  match->add_option("--beta", a.beta, "WSA address weight");
  match->add_option("--vthreshold", a.vthreshold, "WSA decision threshold");
  match->add_option("--radius", a.radius, "Candidate radius in meters");
  match->add_flag("--same-source", a.same_source,
                  "Also pair records from the same source");
  match->add_option("--threads", a.threads, "Worker threads (0 = auto)");
  match->add_option("--out", a.out, "Decided pairs CSV")->required();

  auto* unify = app.add_subcommand("unify", "Merge matched records");
  unify->add_option("--pois", a.pois, "Dataset to unify")->required();
  unify->add_option("--pairs", a.pairs, "Decided pairs CSV")->required();
  unify->add_option("--ranking", a.ranking,
                    "Authority ranking TOML (ordered_sources = [...])");
  unify->add_option("--out", a.out, "Unified output")->required();

  auto* verify = app.add_subcommand("verify", "Review flagged records");
  verify->add_option("--in", a.in, "Dataset to review")->required();
  verify->add_flag("--list", a.list_only, "List flagged records and exit");
  verify->add_option("--resolutions", a.resolutions, "Resolutions CSV");
  verify->add_option("--replay", a.replay,
                     "Audit log to replay instead of a resolutions CSV");
  verify->add_option("--audit-log", a.audit_log, "Audit log to append to");
  verify->add_option("--operator", a.operator_name, "Operator name");
  verify->add_flag("--interactive", a.interactive,
                   "Review flagged records one at a time");
  verify->add_option("--embeddings", a.embeddings,
                     "Word vectors for interactive suggestions");
  verify->add_option("--subwords", a.subwords, "Character n-gram vectors");
  verify->add_option("--taxonomy", a.taxonomy,
                     "Target labels for interactive suggestions");
  verify->add_option("--out", a.out, "Resolved dataset output");

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions");
  evaluate->add_option("--pairs", a.pairs, "Predicted pairs CSV")->required();
  evaluate->add_option("--labels", a.labels, "Labeled pairs CSV")->required();

  auto* coverage = app.add_subcommand("coverage", "Attribute coverage report");
  coverage->add_option("--in", a.ins, "Standardized dataset(s)")->required();
  coverage->add_option("--unified", a.unified, "Unified dataset");
  coverage->add_option("--csv", a.csv_out, "Also write the CSV here");

  auto* fixture = app.add_subcommand("fixture", "Generate a synthetic corpus");
  fixture->add_option("--n", a.n, "Number of POI records");
  fixture->add_option("--sources", a.sources, "Number of pseudo-sources");
  fixture->add_option("--dup-rate", a.dup_rate,
                      "Probability a record is a duplicate of another");
  fixture->add_option("--out", a.out, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Run the whole pipeline");
  run->add_option("--config", a.config, "Pipeline TOML")->required();

  for (CLI::App* sub : {procure, normalize, taxmap, train, match, unify,
                        verify, evaluate, coverage, fixture, run}) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (procure->parsed()) return cmd_procure(a);
    if (normalize->parsed()) return cmd_normalize(a);
    if (taxmap->parsed()) return cmd_taxonomy_map(a);
    if (train->parsed()) return cmd_train(a);
    if (match->parsed()) return cmd_match(a);
    if (unify->parsed()) return cmd_unify(a);
    if (verify->parsed()) return cmd_verify(a);
    if (evaluate->parsed()) return cmd_evaluate(a);
    if (coverage->parsed()) return cmd_coverage(a);
    if (fixture->parsed()) return cmd_fixture(a);
    if (run->parsed()) return cmd_run(a, seed_opt->count() > 0);
  } catch (const poi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const poi::StageError& e) {
    std::cerr << "stage error: " << e.what() << '\n';
    return kExitStageError;
  } catch (const poi::toml::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStageError;
  }
  return kExitOk;
}
