// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <filesystem>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/corpus.hpp"
#include "tracelab/evalkit.hpp"
#include "tracelab/ir.hpp"
#include "tracelab/learn.hpp"

namespace tracelab::linktype {

/// Maps raw tracker labels ("Dependency", "is blocked by") onto a small
/// canonical set. Labels are lowercased and trimmed first; a label in
/// keep_distinct is returned as is; otherwise the first rule whose pattern
/// matches the whole label wins; unmatched labels pass through lowercased.
class LabelCanonicalizer {
 public:
  struct Rule {
    std::string pattern;  // ECMAScript regex over the lowercased label
    std::string canonical;
  };

  LabelCanonicalizer() = default;
  /// Throws Error(invalid_argument) on a bad pattern, an uppercase canonical
  /// label, or a canonical label that a rule would map elsewhere.
  LabelCanonicalizer(std::vector<Rule> rules, std::set<std::string> keep_distinct);

  /// {related, duplicates, blocks, depends, requires, clone, subtask, cause},
  /// with clone kept distinct from duplicates.
  static LabelCanonicalizer defaults();
  /// CSV pattern,canonical[,keep_distinct]; keep_distinct=true adds the
  /// canonical label to the keep set.
  static LabelCanonicalizer load(const std::filesystem::path& path);

  std::string canonicalize(std::string_view raw_label) const;

  const std::vector<Rule>& rules() const { return rules_; }
  const std::set<std::string>& keep_distinct() const { return keep_; }

 private:
  std::vector<Rule> rules_;
  std::vector<std::regex> compiled_;
  std::set<std::string> keep_;
};

struct RawIssueLink {
  std::string source_id;
  std::string target_id;
  std::string raw_label;
};

/// Issues become artifacts of kind "issue": title, text = description,
/// metadata issue_type/reporter/assignee, created_at from an integer epoch
/// or an ISO-8601 UTC timestamp.
ArtifactSet load_issues(const std::filesystem::path& path);  // .csv or .jsonl
/// CSV source_id,target_id,raw_label.
std::vector<RawIssueLink> load_issue_links(const std::filesystem::path& path);

struct TypedPair {
  std::string source_id;
  std::string target_id;
  std::string label;  // canonical
};

/// Canonicalizes labels. Throws Error(validation) listing links to unknown
/// issues. A pair seen twice keeps its first label.
std::vector<TypedPair> make_typed_pairs(const ArtifactSet& issues,
                                        std::span<const RawIssueLink> links,
                                        const LabelCanonicalizer& canon);

struct EncodingConfig {
  PreprocessConfig preprocess = PreprocessConfig::defaults();
  bool text = true;
  bool metadata = true;
  bool relational = true;
  std::vector<std::string> metadata_fields{"issue_type", "reporter", "assignee"};
};

/// Fixed-dimension pair encoding: TF-IDF of both issues, one-hot metadata
/// of both issues, and the signed creation-time delta (target - source).
class TypedPairEncoder {
 public:
  TypedPairEncoder() = default;
  /// Vocabulary and metadata values come from the given issues only.
  static TypedPairEncoder fit(const std::vector<const Artifact*>& issues,
                              const EncodingConfig& cfg);

  const std::vector<std::string>& feature_names() const { return names_; }
  std::vector<double> encode(const Artifact& source, const Artifact& target) const;

 private:
  EncodingConfig cfg_;
  ir::Vectorizer vectorizer_;
  std::vector<std::vector<std::string>> values_;  // per metadata field, sorted
  std::vector<std::string> names_;
};

struct TypeTrainConfig {
  learn::TrainConfig train;
  /// Weights each instance by n / (K * n_class).
  bool class_weights = false;
};

/// One-vs-rest logistic regression over canonical labels.
class TypeModel {
 public:
  const std::vector<std::string>& classes() const { return classes_; }
  const TypedPairEncoder& encoder() const { return encoder_; }

  /// One probability per class, normalized to sum to 1.
  std::vector<double> predict_proba(const Artifact& source, const Artifact& target) const;
  /// Arg max; ties go to the lexicographically smallest label.
  std::string predict(const Artifact& source, const Artifact& target) const;

  friend TypeModel train_type_model(const ArtifactSet& issues,
                                    std::span<const TypedPair> pairs,
                                    std::span<const std::size_t> rows,
                                    const EncodingConfig& enc,
                                    const TypeTrainConfig& cfg);

 private:
  std::vector<std::string> classes_;
  TypedPairEncoder encoder_;
  std::vector<learn::Classifier> one_vs_rest_;
};

/// Trains on pairs[rows]. Throws Error(invalid_argument) for single-class
/// data or when fewer than two classes have two or more instances.
TypeModel train_type_model(const ArtifactSet& issues, std::span<const TypedPair> pairs,
                           std::span<const std::size_t> rows, const EncodingConfig& enc,
                           const TypeTrainConfig& cfg);

struct TypeExperiment {
  std::vector<std::size_t> rows;  // tested pair indices, fold by fold
  std::vector<std::string> gold;
  std::vector<std::string> predicted;
  eval::ClassificationReport report;
};

/// kfold is stratified by label; timestamp trains on pairs whose newer issue
/// predates the cutoff. Results do not depend on `jobs`.
TypeExperiment run_type_experiment(const ArtifactSet& issues,
                                   std::span<const TypedPair> pairs,
                                   const learn::SplitPlan& plan,
                                   const EncodingConfig& enc, const TypeTrainConfig& cfg,
                                   int jobs = 1);

}  // namespace tracelab::linktype
