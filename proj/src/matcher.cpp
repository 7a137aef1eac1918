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

#include "poi/matcher.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "poi/normalization.hpp"
#include "poi/text.hpp"

namespace poi {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Sample {
  double x[2];
  double y;  // class label 0/1 or regression target
};

// ------------------------------------------------------------------
// Tree fitting. Both tree flavours share the exhaustive threshold
// search; they differ only in the impurity criterion and leaf payload.

struct SplitChoice {
  bool found = false;
  int feature = 0;
  double threshold = 0.0;
  double score = 0.0;  // impurity after split; lower is better
};

// Gini impurity of a node holding `pos` positives out of `n`.
double gini(double pos, double n) {
  if (n <= 0.0) {
    return 0.0;
  }
  const double p = pos / n;
  return 2.0 * p * (1.0 - p);
}

SplitChoice best_classification_split(const std::vector<Sample>& samples,
                                      const std::vector<int>& idx) {
  const double n = static_cast<double>(idx.size());
  double total_pos = 0.0;
  for (int i : idx) {
    total_pos += samples[i].y;
  }
  SplitChoice best;
  best.score = gini(total_pos, n);
  const double parent_impurity = best.score;

  for (int feature = 0; feature < 2; ++feature) {
    std::vector<int> order = idx;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return samples[a].x[feature] < samples[b].x[feature];
    });
    double left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      left_pos += samples[order[i]].y;
      const double a = samples[order[i]].x[feature];
      const double b = samples[order[i + 1]].x[feature];
      if (a == b) {
        continue;
      }
      const double left_n = static_cast<double>(i + 1);
      const double right_n = n - left_n;
      const double weighted =
          (left_n * gini(left_pos, left_n) +
           right_n * gini(total_pos - left_pos, right_n)) /
          n;
      if (weighted + 1e-12 < best.score) {
        best.found = true;
        best.feature = feature;
        best.threshold = (a + b) / 2.0;
        best.score = weighted;
      }
    }
  }
  if (best.found && parent_impurity - best.score <= 1e-12) {
    best.found = false;
  }
  return best;
}

SplitChoice best_regression_split(const std::vector<Sample>& samples,
                                  const std::vector<int>& idx) {
  const double n = static_cast<double>(idx.size());
  double total_sum = 0.0;
  double total_sq = 0.0;
  for (int i : idx) {
    total_sum += samples[i].y;
    total_sq += samples[i].y * samples[i].y;
  }
  SplitChoice best;
  best.score = total_sq - total_sum * total_sum / n;  // node SSE

  for (int feature = 0; feature < 2; ++feature) {
    std::vector<int> order = idx;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return samples[a].x[feature] < samples[b].x[feature];
    });
    double left_sum = 0.0;
    double left_sq = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      left_sum += samples[order[i]].y;
      left_sq += samples[order[i]].y * samples[order[i]].y;
      const double a = samples[order[i]].x[feature];
      const double b = samples[order[i + 1]].x[feature];
      if (a == b) {
        continue;
      }
      const double left_n = static_cast<double>(i + 1);
      const double right_n = n - left_n;
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double sse = (left_sq - left_sum * left_sum / left_n) +
                         (right_sq - right_sum * right_sum / right_n);
      if (sse + 1e-12 < best.score) {
        best.found = true;
        best.feature = feature;
        best.threshold = (a + b) / 2.0;
        best.score = sse;
      }
    }
  }
  return best;
}

int build_tree(DecisionTree* tree, const std::vector<Sample>& samples,
               std::vector<int> idx, int depth, int max_depth,
               bool classification) {
  double sum = 0.0;
  for (int i : idx) {
    sum += samples[i].y;
  }
  const double mean = idx.empty() ? 0.0 : sum / idx.size();

  const auto make_leaf = [&](double value) {
    TreeNode leaf;
    leaf.value = value;
    tree->nodes.push_back(leaf);
    return static_cast<int>(tree->nodes.size()) - 1;
  };

  if (depth >= max_depth || idx.size() < 2) {
    // Classification leaves vote for the majority class; exact ties
    // vote 0 (non-match) for a conservative default.
    return make_leaf(classification ? (mean > 0.5 ? 1.0 : 0.0) : mean);
  }
  const SplitChoice split = classification
                                ? best_classification_split(samples, idx)
                                : best_regression_split(samples, idx);
  if (!split.found) {
    return make_leaf(classification ? (mean > 0.5 ? 1.0 : 0.0) : mean);
  }

  std::vector<int> left_idx;
  std::vector<int> right_idx;
  for (int i : idx) {
    (samples[i].x[split.feature] < split.threshold ? left_idx : right_idx)
        .push_back(i);
  }
  const int node_pos = static_cast<int>(tree->nodes.size());
  TreeNode node;
  node.feature = split.feature;
  node.threshold = split.threshold;
  tree->nodes.push_back(node);
  const int left = build_tree(tree, samples, std::move(left_idx), depth + 1,
                              max_depth, classification);
  const int right = build_tree(tree, samples, std::move(right_idx), depth + 1,
                               max_depth, classification);
  tree->nodes[node_pos].left = left;
  tree->nodes[node_pos].right = right;
  return node_pos;
}

DecisionTree fit_tree(const std::vector<Sample>& samples,
                      const std::vector<int>& idx, int max_depth,
                      bool classification) {
  DecisionTree tree;
  std::vector<int> all = idx;
  build_tree(&tree, samples, std::move(all), 0, max_depth, classification);
  return tree;
}

std::vector<Sample> to_samples(const std::vector<FeaturePair>& pairs) {
  std::vector<Sample> samples;
  samples.reserve(pairs.size());
  for (const FeaturePair& p : pairs) {
    Sample s;
    s.x[0] = p.s_name;
    s.x[1] = p.s_address;
    s.y = (p.label.has_value() && *p.label) ? 1.0 : 0.0;
    samples.push_back(s);
  }
  return samples;
}

}  // namespace

std::string to_string(FeatureBackend backend) {
  switch (backend) {
    case FeatureBackend::kString: return "string";
    case FeatureBackend::kTfidf: return "tfidf";
    case FeatureBackend::kHybrid: return "hybrid";
  }
  return "hybrid";
}

FeatureBackend feature_backend_from_string(const std::string& name) {
  if (name == "string") return FeatureBackend::kString;
  if (name == "tfidf") return FeatureBackend::kTfidf;
  if (name == "hybrid") return FeatureBackend::kHybrid;
  throw std::invalid_argument("unknown feature backend: " + name);
}

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::kBagging ? "bagging" : "gradient_boosting";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "bagging") return Algorithm::kBagging;
  if (name == "gradient_boosting" || name == "gb") {
    return Algorithm::kGradientBoosting;
  }
  throw std::invalid_argument("unknown algorithm: " + name);
}

bool wsa_classify(const FeaturePair& pair, const WsaParams& params) {
  return params.alpha * pair.s_name + params.beta * pair.s_address >
         params.v_threshold;
}

double DecisionTree::predict(double s_name, double s_address) const {
  const double x[2] = {s_name, s_address};
  int node = 0;
  while (nodes[node].feature >= 0) {
    node = x[nodes[node].feature] < nodes[node].threshold ? nodes[node].left
                                                          : nodes[node].right;
  }
  return nodes[node].value;
}

double submodel_probability(const SubModel& sub, Algorithm algorithm,
                            double s_name, double s_address) {
  if (algorithm == Algorithm::kBagging) {
    double votes = 0.0;
    for (const DecisionTree& tree : sub.trees) {
      votes += tree.predict(s_name, s_address);
    }
    return sub.trees.empty() ? 0.0 : votes / sub.trees.size();
  }
  double f = sub.f0;
  for (const DecisionTree& tree : sub.trees) {
    f += sub.learning_rate * tree.predict(s_name, s_address);
  }
  return sigmoid(f);
}

std::pair<double, bool> predict_match(const MatchModel& model,
                                      const FeaturePair& pair) {
  if (model.sub_models.empty()) {
    throw std::runtime_error("predict_match: model has no trained sub-models");
  }
  double sum = 0.0;
  for (const SubModel& sub : model.sub_models) {
    sum += submodel_probability(sub, model.algorithm, pair.s_name,
                                pair.s_address);
  }
  const double probability = sum / model.sub_models.size();
  return {probability, probability >= model.decision_threshold};
}

LabeledSplit stratified_split(const std::vector<FeaturePair>& pairs,
                              double ratio, std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].label.has_value()) {
      throw std::invalid_argument("stratified_split: unlabeled pair");
    }
    (*pairs[i].label ? pos : neg).push_back(i);
  }
  if (pos.size() < 2 || neg.size() < 2) {
    throw std::invalid_argument(
        "stratified_split: each class needs at least 2 samples");
  }

  LabeledSplit split;
  split.ratio = ratio;
  const auto take = [&](std::vector<std::size_t>& cls, const char* salt) {
    Rng rng(derive_seed(seed, salt));
    rng.shuffle(cls);
    const auto train_n = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(cls.size())));
    for (std::size_t i = 0; i < cls.size(); ++i) {
      (i < train_n ? split.train : split.test).push_back(pairs[cls[i]]);
    }
  };
  take(pos, "split-positive");
  take(neg, "split-negative");
  return split;
}

std::vector<std::vector<FeaturePair>> rebalance(
    const std::vector<FeaturePair>& train, int k, std::uint64_t seed) {
  if (k < 1) {
    throw std::invalid_argument("rebalance: k must be ≥ 1");
  }
  std::vector<const FeaturePair*> pos;
  std::vector<const FeaturePair*> neg;
  for (const FeaturePair& p : train) {
    if (!p.label.has_value()) {
      throw std::invalid_argument("rebalance: unlabeled pair");
    }
    (*p.label ? pos : neg).push_back(&p);
  }
  if (pos.empty() || neg.empty()) {
    throw std::invalid_argument("rebalance: both classes required");
  }
  auto* minority = &pos;
  auto* majority = &neg;
  if (minority->size() > majority->size()) {
    std::swap(minority, majority);
  }
  const auto m = static_cast<std::size_t>(std::llround(
      std::sqrt(static_cast<double>(minority->size()) *
                static_cast<double>(majority->size()))));

  std::vector<std::vector<FeaturePair>> datasets;
  datasets.reserve(k);
  for (int d = 0; d < k; ++d) {
    Rng rng(derive_seed(seed, "rebalance-" + std::to_string(d)));
    std::vector<FeaturePair> dataset;
    dataset.reserve(2 * m);
    // Minority: sample with replacement up to M (oversampling).
    for (std::size_t i = 0; i < m; ++i) {
      dataset.push_back(*(*minority)[rng.bounded(minority->size())]);
    }
    // Majority: M distinct picks (undersampling).
    for (std::size_t i : rng.sample_without_replacement(majority->size(), m)) {
      dataset.push_back(*(*majority)[i]);
    }
    datasets.push_back(std::move(dataset));
  }
  return datasets;
}

SubModel train_ensemble(const std::vector<FeaturePair>& dataset,
                        Algorithm algorithm, const HyperParams& hp,
                        std::uint64_t seed) {
  const std::vector<Sample> samples = to_samples(dataset);
  double pos = 0.0;
  for (const Sample& s : samples) {
    pos += s.y;
  }
  if (samples.empty() || pos == 0.0 ||
      pos == static_cast<double>(samples.size())) {
    throw std::invalid_argument("train_ensemble: need both classes present");
  }

  SubModel sub;
  sub.learning_rate = hp.learning_rate;

  if (algorithm == Algorithm::kBagging) {
    Rng rng(derive_seed(seed, "bagging"));
    for (int b = 0; b < hp.n_trees; ++b) {
      std::vector<int> bootstrap(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) {
        bootstrap[i] = static_cast<int>(rng.bounded(samples.size()));
      }
      sub.trees.push_back(fit_tree(samples, bootstrap, hp.max_depth, true));
    }
    return sub;
  }

  // Gradient boosting with logistic loss: start from the log-odds of
  // the base rate, then fit each round's regression tree to the
  // residuals y - sigmoid(F) and step with constant shrinkage.
  const double base_rate = pos / samples.size();
  sub.f0 = std::log(base_rate / (1.0 - base_rate));

  std::vector<double> f(samples.size(), sub.f0);
  std::vector<int> all(samples.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<Sample> residuals = samples;
  for (int round = 0; round < hp.n_trees; ++round) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      residuals[i].y = samples[i].y - sigmoid(f[i]);
    }
    DecisionTree tree = fit_tree(residuals, all, hp.max_depth, false);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      f[i] += hp.learning_rate * tree.predict(samples[i].x[0], samples[i].x[1]);
    }
    sub.trees.push_back(std::move(tree));
  }
  return sub;
}

std::vector<HyperParams> default_grid(Algorithm algorithm) {
  std::vector<HyperParams> grid;
  for (int trees : {25, 50, 100}) {
    for (int depth : {1, 2, 3}) {
      if (algorithm == Algorithm::kGradientBoosting) {
        for (double lr : {0.1, 0.3}) {
          grid.push_back({trees, depth, lr});
        }
      } else {
        grid.push_back({trees, depth, 0.1});
      }
    }
  }
  return grid;
}

namespace {

// Balanced accuracy of a trained sub-model on held-out samples. When a
// fold degenerates to one class, that class's recall stands in.
double fold_balanced_accuracy(const SubModel& sub, Algorithm algorithm,
                              const std::vector<FeaturePair>& fold) {
  double tp = 0.0;
  double tn = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  for (const FeaturePair& p : fold) {
    const double prob =
        submodel_probability(sub, algorithm, p.s_name, p.s_address);
    const bool predicted = prob >= 0.5;
    const bool actual = p.label.has_value() && *p.label;
    if (actual && predicted) {
      tp += 1.0;
    } else if (actual) {
      fn += 1.0;
    } else if (predicted) {
      fp += 1.0;
    } else {
      tn += 1.0;
    }
  }
  const bool has_pos = tp + fn > 0.0;
  const bool has_neg = tn + fp > 0.0;
  if (has_pos && has_neg) {
    return (tp / (tp + fn) + tn / (tn + fp)) / 2.0;
  }
  if (has_pos) {
    return tp / (tp + fn);
  }
  if (has_neg) {
    return tn / (tn + fp);
  }
  return 0.0;
}

}  // namespace

HyperParams cross_validate_tune(
    const std::vector<std::vector<FeaturePair>>& datasets, Algorithm algorithm,
    const std::vector<HyperParams>& grid, int folds, std::uint64_t seed) {
  if (grid.empty()) {
    throw std::invalid_argument("cross_validate_tune: empty grid");
  }
  if (grid.size() == 1) {
    return grid[0];
  }

  // Fold assignment is fixed per dataset so every grid point sees the
  // same folds.
  std::vector<std::vector<int>> fold_of;  // dataset → sample → fold
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    std::vector<std::size_t> order(datasets[d].size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "cv-fold-" + std::to_string(d)));
    rng.shuffle(order);
    std::vector<int> assignment(datasets[d].size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      assignment[order[i]] = static_cast<int>(i % folds);
    }
    fold_of.push_back(std::move(assignment));
  }

  double best_score = -1.0;
  HyperParams best = grid[0];
  for (const HyperParams& hp : grid) {
    double dataset_sum = 0.0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      double fold_sum = 0.0;
      for (int f = 0; f < folds; ++f) {
        std::vector<FeaturePair> train_part;
        std::vector<FeaturePair> valid_part;
        for (std::size_t i = 0; i < datasets[d].size(); ++i) {
          (fold_of[d][i] == f ? valid_part : train_part)
              .push_back(datasets[d][i]);
        }
        const SubModel sub =
            train_ensemble(train_part, algorithm, hp,
                           derive_seed(seed, "cv-train-" + std::to_string(d) +
                                                 "-" + std::to_string(f)));
        fold_sum += fold_balanced_accuracy(sub, algorithm, valid_part);
      }
      dataset_sum += fold_sum / folds;
    }
    const double score = dataset_sum / datasets.size();
    const bool better =
        score > best_score + 1e-12 ||
        (std::abs(score - best_score) <= 1e-12 &&
         (hp.n_trees < best.n_trees ||
          (hp.n_trees == best.n_trees &&
           (hp.max_depth < best.max_depth ||
            (hp.max_depth == best.max_depth &&
             hp.learning_rate < best.learning_rate)))));
    if (better) {
      best_score = score;
      best = hp;
    }
  }
  return best;
}

MatchModel train_model(const std::vector<FeaturePair>& labeled_train,
                       const TrainOptions& options) {
  MatchModel model;
  model.algorithm = options.algorithm;
  model.backend = options.backend;
  model.seed = options.seed;
  model.rebalanced = options.rebalance;

  std::vector<std::vector<FeaturePair>> datasets;
  if (options.rebalance) {
    datasets = rebalance(labeled_train, options.k, options.seed);
  } else {
    datasets.push_back(labeled_train);
  }

  model.hyperparams =
      options.tune
          ? cross_validate_tune(datasets, options.algorithm,
                                default_grid(options.algorithm), 5,
                                derive_seed(options.seed, "tune"))
          : options.hyperparams;

  for (std::size_t d = 0; d < datasets.size(); ++d) {
    model.sub_models.push_back(
        train_ensemble(datasets[d], options.algorithm, model.hyperparams,
                       derive_seed(options.seed, "train-" + std::to_string(d))));
  }
  return model;
}

FeaturePair featurize_pair(const StandardPoi& a, const StandardPoi& b,
                           const TfIdfModel& address_model,
                           const TfIdfModel* name_model,
                           FeatureBackend backend) {
  FeaturePair pair;
  pair.id_a = a.id;
  pair.id_b = b.id;
  pair.canonicalize();

  const bool names_present = a.has_name() && b.has_name();
  const bool addresses_present = a.has_address() && b.has_address();
  const std::string addr_a =
      a.has_address() ? canonical_address_string(*a.address) : std::string();
  const std::string addr_b =
      b.has_address() ? canonical_address_string(*b.address) : std::string();

  switch (backend) {
    case FeatureBackend::kHybrid:
      pair.s_name = names_present ? name_similarity(a.name, b.name) : 0.0;
      pair.s_address =
          addresses_present ? tfidf_cosine(address_model, addr_a, addr_b) : 0.0;
      break;
    case FeatureBackend::kString:
      pair.s_name = names_present ? name_similarity(a.name, b.name) : 0.0;
      pair.s_address =
          addresses_present ? name_similarity(addr_a, addr_b) : 0.0;
      break;
    case FeatureBackend::kTfidf:
      pair.s_name = (names_present && name_model != nullptr)
                        ? tfidf_cosine(*name_model, a.name, b.name)
                        : 0.0;
      pair.s_address =
          addresses_present ? tfidf_cosine(address_model, addr_a, addr_b) : 0.0;
      break;
  }
  return pair;
}

namespace {

// Candidate pairs of one centroid, features computed against its
// neighborhood corpus. Pure; safe to run per-centroid in parallel.
std::vector<FeaturePair> featurize_centroid(
    const std::vector<StandardPoi>& pois, const SpatialGridIndex& index,
    std::size_t centroid, const MatchOptions& options) {
  NeighborOptions nopt;
  nopt.radius_m = options.radius_m;
  nopt.cross_source_only = options.cross_source_only;
  const std::vector<std::size_t> neighbors =
      neighbors_within(index, pois, centroid, nopt);
  if (neighbors.empty()) {
    return {};
  }

  // The corpus is the neighborhood: the centroid's own address plus its
  // neighbors' addresses, in neighbor order.
  std::vector<std::string> address_corpus;
  address_corpus.reserve(neighbors.size() + 1);
  std::vector<std::string> name_corpus;
  const auto address_of = [&](const StandardPoi& p) {
    return p.has_address() ? canonical_address_string(*p.address)
                           : std::string();
  };
  address_corpus.push_back(address_of(pois[centroid]));
  for (std::size_t n : neighbors) {
    address_corpus.push_back(address_of(pois[n]));
  }
  if (options.backend == FeatureBackend::kTfidf) {
    name_corpus.push_back(pois[centroid].name);
    for (std::size_t n : neighbors) {
      name_corpus.push_back(pois[n].name);
    }
  }

  const auto has_tokens = [](const std::vector<std::string>& docs) {
    for (const std::string& d : docs) {
      if (!tokenize_alnum(d).empty()) {
        return true;
      }
    }
    return false;
  };

  TfIdfModel address_model;
  if (has_tokens(address_corpus)) {
    address_model = fit_tfidf(address_corpus);
  }
  TfIdfModel name_model;
  const TfIdfModel* name_model_ptr = nullptr;
  if (options.backend == FeatureBackend::kTfidf && has_tokens(name_corpus)) {
    name_model = fit_tfidf(name_corpus);
    name_model_ptr = &name_model;
  }

  std::vector<FeaturePair> out;
  for (std::size_t n : neighbors) {
    // Canonical orientation: emit only from the lexicographically
    // smaller id's perspective so each unordered pair appears once.
    if (pois[centroid].id < pois[n].id) {
      out.push_back(featurize_pair(pois[centroid], pois[n], address_model,
                                   name_model_ptr, options.backend));
    }
  }
  return out;
}

}  // namespace

std::vector<FeaturePair> featurize_all(const std::vector<StandardPoi>& pois,
                                       const MatchOptions& options) {
  // Centroids are processed in id order so output is deterministic no
  // matter how work is scheduled.
  std::vector<std::size_t> order(pois.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pois[a].id < pois[b].id;
  });

  const SpatialGridIndex index(pois, std::max(options.radius_m, 1.0));

  unsigned num_threads = options.num_threads > 0
                             ? static_cast<unsigned>(options.num_threads)
                             : std::thread::hardware_concurrency();
  num_threads = std::max(1u, std::min<unsigned>(num_threads, 64));

  std::vector<std::vector<FeaturePair>> per_centroid(order.size());
  if (num_threads <= 1 || order.size() < 128) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      per_centroid[i] = featurize_centroid(pois, index, order[i], options);
    }
  } else {
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < num_threads; ++t) {
      workers.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= order.size()) {
            return;
          }
          per_centroid[i] = featurize_centroid(pois, index, order[i], options);
        }
      });
    }
    for (std::thread& w : workers) {
      w.join();
    }
  }

  std::vector<FeaturePair> out;
  for (auto& chunk : per_centroid) {
    out.insert(out.end(), std::make_move_iterator(chunk.begin()),
               std::make_move_iterator(chunk.end()));
  }
  return out;
}

std::vector<DecidedPair> match_all(const std::vector<StandardPoi>& pois,
                                   const ClassifierRef& classifier,
                                   const MatchOptions& options) {
  MatchOptions effective = options;
  if (std::holds_alternative<const MatchModel*>(classifier)) {
    effective.backend = std::get<const MatchModel*>(classifier)->backend;
  }
  const std::vector<FeaturePair> features = featurize_all(pois, effective);

  std::vector<DecidedPair> out;
  out.reserve(features.size());
  for (const FeaturePair& pair : features) {
    DecidedPair decided;
    decided.features = pair;
    if (std::holds_alternative<WsaParams>(classifier)) {
      const WsaParams& params = std::get<WsaParams>(classifier);
      decided.is_match = wsa_classify(pair, params);
      decided.probability = std::clamp(
          params.alpha * pair.s_name + params.beta * pair.s_address, 0.0, 1.0);
    } else {
      const MatchModel* model = std::get<const MatchModel*>(classifier);
      const auto [probability, is_match] = predict_match(*model, pair);
      decided.probability = probability;
      decided.is_match = is_match;
    }
    out.push_back(std::move(decided));
  }
  return out;
}

std::vector<FeaturePair> join_labels(
    const std::vector<FeaturePair>& computed,
    const std::map<std::pair<std::string, std::string>, bool>& labels,
    std::size_t* missing) {
  std::vector<FeaturePair> out;
  std::size_t found = 0;
  for (const FeaturePair& pair : computed) {
    auto it = labels.find({pair.id_a, pair.id_b});
    if (it != labels.end()) {
      FeaturePair labeled = pair;
      labeled.label = it->second;
      out.push_back(std::move(labeled));
      ++found;
    }
  }
  if (missing != nullptr) {
    *missing = labels.size() - found;
  }
  return out;
}

}  // namespace poi
