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

#ifndef POI_PIPELINE_HPP
#define POI_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "poi/core.hpp"
#include "poi/matcher.hpp"

namespace poi {

/// Configuration problems (bad TOML, missing required keys, inconsistent
/// stage wiring). The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stage failed mid-run. Partial outputs written so far stay on disk
/// and the manifest names the failed stage. Exit code 1.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// One-file pipeline description, one TOML section per stage. Relative
/// paths resolve against the config file's directory.
struct PipelineConfig {
  std::string out_dir = "out";
  std::uint64_t seed = 42;

  // [procure] — optional stage; runs when any source is configured.
  std::vector<std::string> procure_source_configs;  // PagedSourceConfig TOMLs
  std::vector<std::string> procure_inputs;          // ndjson per source;
                                                    // "" = HTTP adapter
  std::string procure_area;                         // polygon GeoJSON
  double tile_width_m = 250.0;
  double tile_height_m = 250.0;
  double min_dim_m = 25.0;

  // [normalize]
  std::vector<std::string> normalize_profiles;  // SourceProfile TOMLs
  std::vector<std::string> normalize_inputs;    // raw ndjson, parallel to
                                                // profiles (unused when
                                                // procure runs)
  Date extraction_date;                         // default 1970-01-01
  std::string address_vocabulary;               // optional TOML

  // [taxonomy] — degenerates to a copy when no embeddings are given.
  std::string embeddings;
  std::string subwords;
  std::string taxonomy;
  double taxonomy_threshold = 0.95;
  std::vector<std::string> passthrough_sources;

  // [match] — exactly one of: a pre-trained model, labels to train on,
  // or a WSA baseline.
  std::string model_path;
  std::string labels_path;
  std::string baseline;  // "string" | "tfidf" | "hybrid"
  double alpha = 0.80;
  double beta = 0.20;
  double vthreshold = 0.85;
  TrainOptions train;
  double radius_m = 100.0;
  bool cross_source_only = true;
  int num_threads = 0;

  // [unify]
  std::vector<std::string> ranking;  // most authoritative first

  /// Parse and validate; throws ConfigError with the offending key.
  static PipelineConfig from_file(const std::string& path);
};

struct StageRecord {
  std::string name;
  int version = 1;
  std::uint64_t seed = 0;
  long long duration_ms = 0;
  std::map<std::string, std::string> inputs;   // path → sha256
  std::map<std::string, std::string> outputs;  // path → sha256
};

struct PipelineResult {
  std::vector<StageRecord> stages;
  std::map<std::string, std::string> artifacts;  // logical name → path
  std::vector<std::string> warnings;
  std::string manifest_path;
};

/// Execute procure? → normalize → taxonomy-map → match → unify →
/// coverage, writing every stage artifact plus a manifest under
/// config.out_dir. The manifest is rewritten after each stage, so a
/// failed run still documents everything completed up to the failure.
/// Throws StageError on the first failing stage.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace poi

#endif  // POI_PIPELINE_HPP
