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

#include "poi/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <utility>

#include <nlohmann/json.hpp>

#include "poi/evaluation.hpp"
#include "poi/normalization.hpp"
#include "poi/persistence.hpp"
#include "poi/procurement.hpp"
#include "poi/taxonomy.hpp"
#include "poi/toml.hpp"
#include "poi/unification.hpp"

namespace poi {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kStageVersion = 1;
constexpr int kManifestFormatVersion = 1;

std::string resolve_path(const fs::path& base, const std::string& p) {
  if (p.empty()) {
    return p;
  }
  fs::path candidate(p);
  if (candidate.is_absolute()) {
    return candidate.lexically_normal().string();
  }
  return (base / candidate).lexically_normal().string();
}

std::vector<std::string> string_array(const toml::Table& table,
                                      const std::string& key) {
  std::vector<std::string> out;
  const toml::Value* v = table.find(key);
  if (v == nullptr) {
    return out;
  }
  if (!v->is_array()) {
    throw ConfigError(key + " must be an array of strings");
  }
  for (const toml::Value& item : v->as_array()) {
    if (!item.is_string()) {
      throw ConfigError(key + " must contain only strings");
    }
    out.push_back(item.as_string());
  }
  return out;
}

void write_manifest(const std::string& path, const PipelineConfig& config,
                    const PipelineResult& result,
                    const std::string& failed_stage) {
  ordered_json doc;
  doc["format_version"] = kManifestFormatVersion;
  doc["seed"] = config.seed;
  ordered_json stages = ordered_json::array();
  for (const StageRecord& rec : result.stages) {
    ordered_json s;
    s["name"] = rec.name;
    s["version"] = rec.version;
    s["seed"] = rec.seed;
    s["duration_ms"] = rec.duration_ms;
    s["inputs"] = ordered_json(rec.inputs);
    s["outputs"] = ordered_json(rec.outputs);
    stages.push_back(std::move(s));
  }
  doc["stages"] = std::move(stages);
  if (!failed_stage.empty()) {
    doc["failed_stage"] = failed_stage;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write manifest: " + path);
  }
  out << doc.dump(2) << '\n';
}

// Shared mutable state handed from stage to stage.
struct PipelineState {
  std::map<std::string, std::string> raw_paths;  // source_id → ndjson
  std::vector<StandardPoi> standardized;
  std::vector<StandardPoi> mapped;
  std::vector<DecidedPair> decided;
  std::vector<UnifiedPoi> unified;
};

void stage_procure(const PipelineConfig& config, PipelineState* state,
                   PipelineResult* result, StageRecord* rec) {
  rec->inputs[config.procure_area] = sha256_file(config.procure_area);
  const Polygon area = load_polygon(config.procure_area);
  const std::vector<Tile> tiles =
      plan_initial_grid(area, config.tile_width_m, config.tile_height_m);
  for (std::size_t i = 0; i < config.procure_source_configs.size(); ++i) {
    const std::string& cfg_path = config.procure_source_configs[i];
    rec->inputs[cfg_path] = sha256_file(cfg_path);
    const PagedSourceConfig source_cfg = PagedSourceConfig::from_file(cfg_path);

    std::unique_ptr<PagedSource> source;
    if (!config.procure_inputs[i].empty()) {
      rec->inputs[config.procure_inputs[i]] =
          sha256_file(config.procure_inputs[i]);
      source = std::make_unique<FileBackedSource>(FileBackedSource::from_ndjson(
          config.procure_inputs[i], source_cfg));
    } else {
      source = std::make_unique<HttpPagedSource>(source_cfg);
    }

    std::vector<RawRecord> records;
    for (const Tile& tile : tiles) {
      FetchResult fetched =
          fetch_recursive(tile, *source, source_cfg, config.min_dim_m);
      records.insert(records.end(),
                     std::make_move_iterator(fetched.records.begin()),
                     std::make_move_iterator(fetched.records.end()));
      for (std::string& w : fetched.warnings) {
        result->warnings.push_back(source_cfg.source_id + ": " + std::move(w));
      }
    }
    records = dedupe_by_id(records);

    const std::string out_path =
        (fs::path(config.out_dir) / ("raw-" + source_cfg.source_id + ".ndjson"))
            .string();
    save_raw_records(records, out_path);
    rec->outputs[out_path] = sha256_file(out_path);
    state->raw_paths[source_cfg.source_id] = out_path;
    result->artifacts["raw-" + source_cfg.source_id] = out_path;
  }
}

void stage_normalize(const PipelineConfig& config, PipelineState* state,
                     PipelineResult* result, StageRecord* rec) {
  const AddressVocabulary vocab =
      config.address_vocabulary.empty()
          ? AddressVocabulary::defaults()
          : AddressVocabulary::from_file(config.address_vocabulary);
  if (!config.address_vocabulary.empty()) {
    rec->inputs[config.address_vocabulary] =
        sha256_file(config.address_vocabulary);
  }

  std::vector<std::string> all_errors;
  for (std::size_t i = 0; i < config.normalize_profiles.size(); ++i) {
    const std::string& profile_path = config.normalize_profiles[i];
    rec->inputs[profile_path] = sha256_file(profile_path);
    const SourceProfile profile = SourceProfile::from_file(profile_path);

    std::string raw_path;
    if (!state->raw_paths.empty()) {
      const auto it = state->raw_paths.find(profile.source_id);
      if (it == state->raw_paths.end()) {
        throw std::runtime_error("no procured records for source '" +
                                 profile.source_id + "'");
      }
      raw_path = it->second;
    } else {
      raw_path = config.normalize_inputs[i];
    }
    rec->inputs[raw_path] = sha256_file(raw_path);

    const std::vector<RawRecord> records =
        load_raw_records(raw_path, profile.source_id);
    StandardizeResult standardized =
        standardize_all(records, profile, config.extraction_date, vocab);
    state->standardized.insert(
        state->standardized.end(),
        std::make_move_iterator(standardized.pois.begin()),
        std::make_move_iterator(standardized.pois.end()));
    all_errors.insert(all_errors.end(), standardized.errors.begin(),
                      standardized.errors.end());
  }

  const std::string out_path =
      (fs::path(config.out_dir) / "std.ndjson").string();
  save_dataset(state->standardized, out_path);
  rec->outputs[out_path] = sha256_file(out_path);
  result->artifacts["standardized"] = out_path;

  if (!all_errors.empty()) {
    const std::string err_path =
        (fs::path(config.out_dir) / "normalize-errors.txt").string();
    std::ofstream err(err_path, std::ios::binary | std::ios::trunc);
    for (const std::string& e : all_errors) {
      err << e << '\n';
    }
    rec->outputs[err_path] = sha256_file(err_path);
    result->artifacts["normalize-errors"] = err_path;
    result->warnings.push_back("normalize: " +
                               std::to_string(all_errors.size()) +
                               " record(s) skipped");
  }
}

void stage_taxonomy(const PipelineConfig& config, PipelineState* state,
                    PipelineResult* result, StageRecord* rec) {
  const std::string in_path = result->artifacts.at("standardized");
  rec->inputs[in_path] = sha256_file(in_path);

  if (config.embeddings.empty() || config.taxonomy.empty()) {
    // No embedding model configured: the source taxonomies are taken as
    // already aligned and records pass through unchanged.
    state->mapped = state->standardized;
  } else {
    rec->inputs[config.embeddings] = sha256_file(config.embeddings);
    rec->inputs[config.taxonomy] = sha256_file(config.taxonomy);
    EmbeddingStore store = load_embeddings(config.embeddings);
    if (!config.subwords.empty()) {
      rec->inputs[config.subwords] = sha256_file(config.subwords);
      load_subword_ngrams(config.subwords, &store);
    }
    const std::vector<std::string> targets =
        load_target_taxonomy(config.taxonomy);
    TaxonomyOptions options;
    options.threshold = config.taxonomy_threshold;
    options.passthrough_sources.insert(config.passthrough_sources.begin(),
                                       config.passthrough_sources.end());
    state->mapped = apply_taxonomy(state->standardized, targets, store, options);
  }

  const std::string out_path =
      (fs::path(config.out_dir) / "mapped.ndjson").string();
  save_dataset(state->mapped, out_path);
  rec->outputs[out_path] = sha256_file(out_path);
  result->artifacts["mapped"] = out_path;
}

void stage_match(const PipelineConfig& config, PipelineState* state,
                 PipelineResult* result, StageRecord* rec) {
  const std::string in_path = result->artifacts.at("mapped");
  rec->inputs[in_path] = sha256_file(in_path);

  MatchOptions options;
  options.radius_m = config.radius_m;
  options.cross_source_only = config.cross_source_only;
  options.backend = config.train.backend;
  options.num_threads = config.num_threads;

  MatchModel model;
  WsaParams wsa;
  bool use_wsa = false;

  if (!config.model_path.empty()) {
    rec->inputs[config.model_path] = sha256_file(config.model_path);
    model = load_model(config.model_path);
  } else if (!config.labels_path.empty()) {
    rec->inputs[config.labels_path] = sha256_file(config.labels_path);
    const auto labels = load_labeled_pairs(config.labels_path);
    const std::vector<FeaturePair> computed =
        featurize_all(state->mapped, options);
    std::size_t missing = 0;
    const std::vector<FeaturePair> labeled =
        join_labels(computed, labels, &missing);
    if (missing > 0) {
      result->warnings.push_back(
          "match: " + std::to_string(missing) +
          " labeled pair(s) fell outside the candidate radius");
    }
    TrainOptions train = config.train;
    train.seed = config.seed;
    model = train_model(labeled, train);
    const std::string model_out =
        (fs::path(config.out_dir) / "model.json").string();
    save_model(model, model_out);
    rec->outputs[model_out] = sha256_file(model_out);
    result->artifacts["model"] = model_out;
  } else {
    use_wsa = true;
    wsa = WsaParams{config.alpha, config.beta, config.vthreshold};
    options.backend = feature_backend_from_string(config.baseline);
  }

  state->decided = use_wsa ? match_all(state->mapped, wsa, options)
                           : match_all(state->mapped, &model, options);

  const std::string out_path = (fs::path(config.out_dir) / "pairs.csv").string();
  save_decided_pairs(state->decided, out_path);
  rec->outputs[out_path] = sha256_file(out_path);
  result->artifacts["pairs"] = out_path;
}

void stage_unify(const PipelineConfig& config, PipelineState* state,
                 PipelineResult* result, StageRecord* rec) {
  rec->inputs[result->artifacts.at("mapped")] =
      sha256_file(result->artifacts.at("mapped"));
  rec->inputs[result->artifacts.at("pairs")] =
      sha256_file(result->artifacts.at("pairs"));

  std::vector<std::pair<std::string, std::string>> match_pairs;
  for (const DecidedPair& p : state->decided) {
    if (p.is_match) {
      match_pairs.emplace_back(p.features.id_a, p.features.id_b);
    }
  }
  const SourceRanking ranking{config.ranking};
  state->unified = unify_dataset(state->mapped, match_pairs, ranking);

  const std::string out_path =
      (fs::path(config.out_dir) / "unified.geojson").string();
  save_unified(state->unified, out_path, DatasetFormat::kGeoJson);
  rec->outputs[out_path] = sha256_file(out_path);
  result->artifacts["unified"] = out_path;
}

void stage_coverage(const PipelineConfig& config, PipelineState* state,
                    PipelineResult* result, StageRecord* rec) {
  rec->inputs[result->artifacts.at("mapped")] =
      sha256_file(result->artifacts.at("mapped"));
  rec->inputs[result->artifacts.at("unified")] =
      sha256_file(result->artifacts.at("unified"));

  std::map<std::string, std::vector<StandardPoi>> by_source;
  for (const StandardPoi& p : state->mapped) {
    by_source[p.source].push_back(p);
  }
  std::vector<StandardPoi> unified_pois;
  unified_pois.reserve(state->unified.size());
  for (const UnifiedPoi& u : state->unified) {
    unified_pois.push_back(u.poi);
  }
  const CoverageReport report = coverage_report(by_source, &unified_pois);

  const std::string csv_path =
      (fs::path(config.out_dir) / "coverage.csv").string();
  const std::string txt_path =
      (fs::path(config.out_dir) / "coverage.txt").string();
  {
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    csv << coverage_to_csv(report);
    std::ofstream txt(txt_path, std::ios::binary | std::ios::trunc);
    txt << coverage_to_text(report);
  }
  rec->outputs[csv_path] = sha256_file(csv_path);
  rec->outputs[txt_path] = sha256_file(txt_path);
  result->artifacts["coverage-csv"] = csv_path;
  result->artifacts["coverage-text"] = txt_path;
}

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  toml::Table table;
  try {
    table = toml::parse_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();

  PipelineConfig cfg;
  try {
    cfg.out_dir = resolve_path(base, table.get_string("out_dir", "out"));
    cfg.seed = static_cast<std::uint64_t>(table.get_int("seed", 42));

    // [procure]
    cfg.procure_source_configs = string_array(table, "procure.source_configs");
    cfg.procure_inputs = string_array(table, "procure.inputs");
    cfg.procure_area =
        resolve_path(base, table.get_string("procure.area", ""));
    cfg.tile_width_m = table.get_float("procure.tile_width_m", 250.0);
    cfg.tile_height_m = table.get_float("procure.tile_height_m", 250.0);
    cfg.min_dim_m = table.get_float("procure.min_dim_m", 25.0);
    for (std::string& p : cfg.procure_source_configs) {
      p = resolve_path(base, p);
    }
    for (std::string& p : cfg.procure_inputs) {
      p = resolve_path(base, p);
    }

    // [normalize]
    cfg.normalize_profiles = string_array(table, "normalize.profiles");
    cfg.normalize_inputs = string_array(table, "normalize.inputs");
    for (std::string& p : cfg.normalize_profiles) {
      p = resolve_path(base, p);
    }
    for (std::string& p : cfg.normalize_inputs) {
      p = resolve_path(base, p);
    }
    const std::string date_text =
        table.get_string("normalize.extraction_date", "1970-01-01");
    const auto date = Date::parse(date_text);
    if (!date.has_value()) {
      throw ConfigError("normalize.extraction_date: bad date '" + date_text +
                        "'");
    }
    cfg.extraction_date = *date;
    cfg.address_vocabulary =
        resolve_path(base, table.get_string("normalize.vocabulary", ""));

    // [taxonomy]
    cfg.embeddings =
        resolve_path(base, table.get_string("taxonomy.embeddings", ""));
    cfg.subwords =
        resolve_path(base, table.get_string("taxonomy.subwords", ""));
    cfg.taxonomy =
        resolve_path(base, table.get_string("taxonomy.taxonomy", ""));
    cfg.taxonomy_threshold = table.get_float("taxonomy.threshold", 0.95);
    cfg.passthrough_sources = string_array(table, "taxonomy.passthrough");

    // [match]
    cfg.model_path = resolve_path(base, table.get_string("match.model", ""));
    cfg.labels_path = resolve_path(base, table.get_string("match.labels", ""));
    cfg.baseline = table.get_string("match.baseline", "");
    cfg.alpha = table.get_float("match.alpha", cfg.alpha);
    cfg.beta = table.get_float("match.beta", cfg.beta);
    cfg.vthreshold = table.get_float("match.vthreshold", cfg.vthreshold);
    cfg.train.algorithm = algorithm_from_string(
        table.get_string("match.algorithm", "bagging"));
    cfg.train.backend =
        feature_backend_from_string(table.get_string("match.backend", "hybrid"));
    cfg.train.k = static_cast<int>(table.get_int("match.k", 10));
    cfg.train.rebalance = table.get_bool("match.rebalance", true);
    cfg.train.tune = table.get_bool("match.tune", false);
    cfg.train.hyperparams.n_trees =
        static_cast<int>(table.get_int("match.n_trees", 50));
    cfg.train.hyperparams.max_depth =
        static_cast<int>(table.get_int("match.max_depth", 2));
    cfg.train.hyperparams.learning_rate =
        table.get_float("match.learning_rate", 0.1);
    cfg.radius_m = table.get_float("match.radius_m", 100.0);
    cfg.cross_source_only = table.get_bool("match.cross_source_only", true);
    cfg.num_threads = static_cast<int>(table.get_int("match.threads", 0));

    // [unify]
    cfg.ranking = string_array(table, "unify.ranking");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  // Cross-key validation.
  if (cfg.normalize_profiles.empty()) {
    throw ConfigError("normalize.profiles is required");
  }
  const bool procure = !cfg.procure_source_configs.empty();
  if (procure) {
    if (cfg.procure_area.empty()) {
      throw ConfigError("procure.area is required when sources are configured");
    }
    if (cfg.procure_inputs.empty()) {
      cfg.procure_inputs.assign(cfg.procure_source_configs.size(), "");
    }
    if (cfg.procure_inputs.size() != cfg.procure_source_configs.size()) {
      throw ConfigError(
          "procure.inputs must parallel procure.source_configs");
    }
  } else if (cfg.normalize_inputs.size() != cfg.normalize_profiles.size()) {
    throw ConfigError(
        "normalize.inputs must parallel normalize.profiles when procurement "
        "is skipped");
  }
  int classifiers = 0;
  classifiers += cfg.model_path.empty() ? 0 : 1;
  classifiers += cfg.labels_path.empty() ? 0 : 1;
  classifiers += cfg.baseline.empty() ? 0 : 1;
  if (classifiers != 1) {
    throw ConfigError(
        "match: exactly one of model, labels or baseline must be set");
  }
  if (!cfg.baseline.empty()) {
    try {
      feature_backend_from_string(cfg.baseline);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("match.baseline: ") + e.what());
    }
  }
  return cfg;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  fs::create_directories(config.out_dir);
  PipelineResult result;
  result.manifest_path =
      (fs::path(config.out_dir) / "manifest.json").string();

  PipelineState state;
  const auto run_stage =
      [&](const std::string& name,
          const std::function<void(StageRecord*)>& body) {
        StageRecord rec;
        rec.name = name;
        rec.version = kStageVersion;
        rec.seed = config.seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          body(&rec);
        } catch (const std::exception& e) {
          write_manifest(result.manifest_path, config, result, name);
          throw StageError(name, e.what());
        }
        rec.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        result.stages.push_back(std::move(rec));
        write_manifest(result.manifest_path, config, result, "");
      };

  if (!config.procure_source_configs.empty()) {
    run_stage("procure",
              [&](StageRecord* r) { stage_procure(config, &state, &result, r); });
  }
  run_stage("normalize", [&](StageRecord* r) {
    stage_normalize(config, &state, &result, r);
  });
  run_stage("taxonomy-map", [&](StageRecord* r) {
    stage_taxonomy(config, &state, &result, r);
  });
  run_stage("match",
            [&](StageRecord* r) { stage_match(config, &state, &result, r); });
  run_stage("unify",
            [&](StageRecord* r) { stage_unify(config, &state, &result, r); });
  run_stage("coverage", [&](StageRecord* r) {
    stage_coverage(config, &state, &result, r);
  });
  return result;
}

}  // namespace poi
