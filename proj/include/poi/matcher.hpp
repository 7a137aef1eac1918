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

#ifndef POI_MATCHER_HPP
#define POI_MATCHER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "poi/core.hpp"
#include "poi/rng.hpp"
#include "poi/similarity.hpp"

namespace poi {

/// One candidate pair with its two similarity features. Ids are kept in
/// canonical (lexicographic) order so each unordered pair has exactly
/// one representation.
struct FeaturePair {
  std::string id_a;
  std::string id_b;
  double s_name = 0.0;
  double s_address = 0.0;
  std::optional<bool> label;  // true = match; absent = unlabeled

  void canonicalize() {
    if (id_b < id_a) {
      std::swap(id_a, id_b);
    }
  }
};

/// Which similarity functions feed s_name / s_address. The recommended
/// hybrid pairs token-sort string similarity for names with TF-IDF
/// cosine for addresses; the other two feed both features from one
/// backend and exist as baselines.
enum class FeatureBackend { kString, kTfidf, kHybrid };

std::string to_string(FeatureBackend backend);
FeatureBackend feature_backend_from_string(const std::string& name);

/// Weighted-sum-aggregation baseline parameters.
struct WsaParams {
  double alpha = 0.0;
  double beta = 0.0;
  double v_threshold = 0.0;
};

/// match iff alpha*s_name + beta*s_address > v_threshold (strictly).
bool wsa_classify(const FeaturePair& pair, const WsaParams& params);

// ---------------------------------------------------------------------
// Decision trees and ensembles over the two features.

struct TreeNode {
  int feature = -1;  // -1 = leaf; otherwise 0 = s_name, 1 = s_address
  double threshold = 0.0;
  double value = 0.0;  // leaf payload: vote (classification) or residual mean
  int left = -1;
  int right = -1;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  double predict(double s_name, double s_address) const;
};

enum class Algorithm { kBagging, kGradientBoosting };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct HyperParams {
  int n_trees = 50;
  int max_depth = 2;
  double learning_rate = 0.1;  // gradient boosting only
};

/// One ensemble trained on one (re)balanced dataset. For bagging, trees
/// vote 0/1 and the probability is the mean vote; for gradient boosting
/// the probability is sigmoid(f0 + lr * sum of tree outputs).
struct SubModel {
  std::vector<DecisionTree> trees;
  double f0 = 0.0;
  double learning_rate = 0.1;
};

double submodel_probability(const SubModel& sub, Algorithm algorithm,
                            double s_name, double s_address);

/// Trained matcher: sub-models' probabilities are averaged and compared
/// against decision_threshold (match when ≥).
struct MatchModel {
  Algorithm algorithm = Algorithm::kBagging;
  FeatureBackend backend = FeatureBackend::kHybrid;
  std::vector<SubModel> sub_models;
  HyperParams hyperparams;
  bool rebalanced = true;
  std::uint64_t seed = 0;
  double decision_threshold = 0.5;
};

/// (probability, decision). Throws std::runtime_error on an untrained
/// (sub-model-free) model.
std::pair<double, bool> predict_match(const MatchModel& model,
                                      const FeaturePair& pair);

// ---------------------------------------------------------------------
// Training.

struct LabeledSplit {
  std::vector<FeaturePair> train;
  std::vector<FeaturePair> test;
  double ratio = 0.75;
};

/// Per-class random split preserving class proportions within ±1 sample.
/// Throws std::invalid_argument when either class has < 2 samples.
LabeledSplit stratified_split(const std::vector<FeaturePair>& pairs,
                              double ratio, std::uint64_t seed);

/// k datasets of exactly M per class, M = round(sqrt(n_min * n_maj)):
/// the minority class is oversampled with replacement, the majority
/// class undersampled without replacement.
std::vector<std::vector<FeaturePair>> rebalance(
    const std::vector<FeaturePair>& train, int k, std::uint64_t seed);

/// Train one ensemble. Throws std::invalid_argument when the dataset
/// has only one class.
SubModel train_ensemble(const std::vector<FeaturePair>& dataset,
                        Algorithm algorithm, const HyperParams& hp,
                        std::uint64_t seed);

/// Mean 5-fold balanced accuracy per grid point, averaged over the k
/// datasets; ties prefer fewer trees, then lower depth, then lower
/// learning rate.
HyperParams cross_validate_tune(
    const std::vector<std::vector<FeaturePair>>& datasets, Algorithm algorithm,
    const std::vector<HyperParams>& grid, int folds, std::uint64_t seed);

std::vector<HyperParams> default_grid(Algorithm algorithm);

struct TrainOptions {
  Algorithm algorithm = Algorithm::kBagging;
  FeatureBackend backend = FeatureBackend::kHybrid;
  int k = 10;               // number of rebalanced datasets / sub-models
  bool rebalance = true;    // false: train one sub-model on raw data
  bool tune = false;        // run cross_validate_tune over default_grid
  HyperParams hyperparams;  // used when tune = false
  std::uint64_t seed = 42;
};

MatchModel train_model(const std::vector<FeaturePair>& labeled_train,
                       const TrainOptions& options);

// ---------------------------------------------------------------------
// Whole-dataset matching.

struct MatchOptions {
  double radius_m = 100.0;
  bool cross_source_only = true;
  FeatureBackend backend = FeatureBackend::kHybrid;
  int num_threads = 0;  // 0 = hardware concurrency
};

/// Stage 1 + feature computation for every candidate pair: each POI in
/// turn becomes the centroid, a TF-IDF model is fit on its neighborhood
/// corpus, and pairs are emitted in canonical orientation exactly once.
/// Output order is deterministic (by centroid id, then neighbor order).
std::vector<FeaturePair> featurize_all(const std::vector<StandardPoi>& pois,
                                       const MatchOptions& options);

/// Feature computation for one pair given a prepared TF-IDF model over
/// the neighborhood corpus (and one over names for the TF-IDF backend).
FeaturePair featurize_pair(const StandardPoi& a, const StandardPoi& b,
                           const TfIdfModel& address_model,
                           const TfIdfModel* name_model,
                           FeatureBackend backend);

struct DecidedPair {
  FeaturePair features;
  double probability = 0.0;
  bool is_match = false;
};

using ClassifierRef = std::variant<WsaParams, const MatchModel*>;

/// featurize_all + classification. For a MatchModel classifier, the
/// model's stored backend overrides options.backend so features always
/// match what the model saw in training.
std::vector<DecidedPair> match_all(const std::vector<StandardPoi>& pois,
                                   const ClassifierRef& classifier,
                                   const MatchOptions& options);

/// Attach labels from (id_a, id_b) → label to computed features.
/// Unlabeled computed pairs are dropped; labeled pairs that were never
/// computed (outside the candidate radius) are counted in *missing.
std::vector<FeaturePair> join_labels(
    const std::vector<FeaturePair>& computed,
    const std::map<std::pair<std::string, std::string>, bool>& labels,
    std::size_t* missing = nullptr);

}  // namespace poi

#endif  // POI_MATCHER_HPP
