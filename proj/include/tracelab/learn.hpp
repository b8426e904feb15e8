// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/corpus.hpp"
#include "tracelab/ir.hpp"

namespace tracelab::learn {

enum class Label : int { no_link = 0, link = 1 };

const char* to_string(Label l);

/// Row-major dense feature matrix with named columns.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<double> values;
  std::size_t rows = 0;

  std::size_t cols() const { return names.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * cols(), cols()};
  }
  void add_row(std::span<const double> row);
};

struct LabeledPair {
  std::string source_id;
  std::string target_id;
  std::vector<double> features;
  Label label = Label::no_link;
};

/// Labeled pairs sharing one ordered feature-name list.
struct PairTable {
  std::vector<std::string> feature_names;
  std::vector<LabeledPair> pairs;

  std::size_t size() const { return pairs.size(); }
  FeatureMatrix features(std::span<const std::size_t> rows) const;
  std::vector<Label> labels(std::span<const std::size_t> rows) const;
  std::vector<Label> labels() const;
};

enum class FeatureMode { similarity_features, concatenated_vectors };

FeatureMode feature_mode_from_string(std::string_view s);

/// Extra per-pair feature appended after the built-in ones.
struct NamedFeature {
  std::string name;
  std::function<double(const Artifact& source, const Artifact& target)> compute;
};

struct PairFeatureConfig {
  PreprocessConfig preprocess = PreprocessConfig::defaults();
  int lsi_k = 0;  // 0 selects ir::default_lsi_rank
  ir::LdaConfig lda{.topics = 10, .iterations = 200};
  /// A term is rare when it occurs in at most this many documents of the
  /// combined source+target corpus.
  int rare_df = 2;
  std::vector<NamedFeature> extra;
};

/// Names of the built-in similarity features, in column order.
const std::vector<std::string>& similarity_feature_names();

/// All |S| x |T| pairs in source-major order, labeled from the answers.
PairTable make_pairs(const Dataset& dataset, FeatureMode mode,
                     const PairFeatureConfig& cfg = {});

enum class BalanceStrategy { undersample, oversample };

BalanceStrategy balance_strategy_from_string(std::string_view s);

/// Row indices of a class-balanced sample. Undersampling keeps every
/// minority row and draws the majority without replacement; oversampling
/// keeps every row and draws extra minority rows with replacement. Kept rows
/// appear in input order, oversampled duplicates after them.
std::vector<std::size_t> balance_indices(std::span<const Label> labels,
                                         BalanceStrategy strategy,
                                         std::uint64_t seed);
std::vector<LabeledPair> balance(const std::vector<LabeledPair>& pairs,
                                 BalanceStrategy strategy, std::uint64_t seed);

enum class SplitKind { kfold, timestamp };

struct SplitPlan {
  SplitKind kind = SplitKind::kfold;
  int k = 5;
  std::int64_t cutoff = 0;
  std::uint64_t seed = 1;
};

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified k-fold over arbitrary integer strata. Fold sizes differ by at
/// most one; every index is tested exactly once.
std::vector<Fold> stratified_kfold(std::span<const int> strata, int k,
                                   std::uint64_t seed);

using TimestampLookup =
    std::function<std::optional<std::int64_t>(const std::string& artifact_id)>;

/// Train = pairs whose newer artifact was created strictly before `cutoff`.
/// Throws Error(validation) listing every artifact without a timestamp.
Fold timestamp_split(std::span<const std::pair<std::string, std::string>> pair_ids,
                     const TimestampLookup& created_at, std::int64_t cutoff);

/// kfold ignores `dataset`; timestamp mode reads created_at from it.
std::vector<Fold> split(const PairTable& table, const SplitPlan& plan,
                        const Dataset* dataset = nullptr);

enum class ClassifierKind { naive_bayes, logistic_regression };

const char* to_string(ClassifierKind k);
ClassifierKind classifier_kind_from_string(std::string_view s);

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  bool standardize = true;
};

/// Weighted mean log-loss plus (l2 / 2) * |w|^2. `params` holds the feature
/// weights followed by the bias; `targets` are 0/1.
double logistic_loss(std::span<const double> params, const FeatureMatrix& x,
                     std::span<const double> targets,
                     std::span<const double> sample_weights, double l2);
std::vector<double> logistic_gradient(std::span<const double> params,
                                      const FeatureMatrix& x,
                                      std::span<const double> targets,
                                      std::span<const double> sample_weights,
                                      double l2);

/// Binary {no_link, link} classifier, immutable after training.
class Classifier {
 public:
  ClassifierKind kind() const { return kind_; }
  const std::vector<std::string>& feature_names() const { return names_; }

  /// {P(no_link), P(link)}.
  std::array<double, 2> predict_proba(std::span<const double> features) const;
  Label predict(std::span<const double> features) const;

  /// Throws Error(incompatible) unless `names` equals the training names.
  void check_features(const std::vector<std::string>& names) const;

  void save(const std::filesystem::path& path) const;
  static Classifier load(const std::filesystem::path& path);

  friend Classifier train(const FeatureMatrix& x, std::span<const Label> y,
                          ClassifierKind kind, const TrainConfig& cfg,
                          std::span<const double> sample_weights);

 private:
  void check_dimension(std::size_t d) const;
  std::vector<double> standardized(std::span<const double> features) const;

  ClassifierKind kind_ = ClassifierKind::logistic_regression;
  std::vector<std::string> names_;
  TrainConfig config_;
  // logistic regression
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> scale_;
  // gaussian naive bayes, indexed [class][feature]
  std::array<double, 2> log_prior_{};
  std::array<std::vector<double>, 2> nb_mean_;
  std::array<std::vector<double>, 2> nb_var_;
};

/// Throws Error(invalid_argument) unless both classes are present.
Classifier train(const FeatureMatrix& x, std::span<const Label> y,
                 ClassifierKind kind, const TrainConfig& cfg = {},
                 std::span<const double> sample_weights = {});
Classifier train(const PairTable& table, std::span<const std::size_t> rows,
                 ClassifierKind kind, const TrainConfig& cfg = {});

struct FoldResult {
  std::vector<std::size_t> test;
  std::vector<Label> predicted;
  double f1 = 0.0;
};

/// Trains one classifier per fold, balancing only the training rows.
/// Results do not depend on `jobs`.
std::vector<FoldResult> cross_validate(const PairTable& table,
                                       const std::vector<Fold>& folds,
                                       ClassifierKind kind,
                                       const TrainConfig& cfg,
                                       std::optional<BalanceStrategy> balancing,
                                       int jobs = 1);

/// F1 of the link class.
double link_f1(std::span<const Label> predicted, std::span<const Label> gold);

}  // namespace tracelab::learn
