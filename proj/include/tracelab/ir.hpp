// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tracelab/corpus.hpp"
#include "tracelab/text.hpp"

namespace tracelab::ir {

struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

/// Entries sorted by index, no explicit zeros except for tf-idf weights of
/// terms present in every document.
using SparseVector = std::vector<SparseEntry>;

enum class Weighting { bag_of_words, tfidf };

const char* to_string(Weighting w);
Weighting weighting_from_string(std::string_view s);

/// Everything needed to turn unseen text into a vector in an index's term
/// space.
struct Vectorizer {
  PreprocessConfig preprocess;
  Vocabulary vocabulary;
  std::vector<double> idf;  // one per vocabulary term
  Weighting weighting = Weighting::tfidf;

  /// Weighted vector of already preprocessed tokens. tf is normalized by the
  /// total token count, out-of-vocabulary tokens included.
  SparseVector weigh(const std::vector<std::string>& tokens) const;
  SparseVector weigh_text(std::string_view text) const;
  /// Raw in-vocabulary counts.
  SparseVector count(const std::vector<std::string>& tokens) const;
};

/// Term-by-document matrix; column j belongs to doc_ids[j].
struct TermDocMatrix {
  Vectorizer vectorizer;
  std::vector<std::string> doc_ids;
  std::vector<SparseVector> columns;  // weights
  std::vector<SparseVector> counts;   // raw term counts, used by LDA
  std::vector<std::size_t> doc_lengths;

  std::size_t n_terms() const { return vectorizer.vocabulary.size(); }
  std::size_t n_docs() const { return doc_ids.size(); }
  Weighting weighting() const { return vectorizer.weighting; }

  Eigen::MatrixXd dense() const;
};

TermDocMatrix build_index(const ArtifactSet& set, const PreprocessConfig& cfg,
                          Weighting weighting);
/// Same, over raw documents (ids paired with text).
TermDocMatrix build_index(const std::vector<std::string>& doc_ids,
                          const std::vector<std::string>& texts,
                          const PreprocessConfig& cfg, Weighting weighting);

enum class Measure { cosine, jaccard, hellinger, symmetric_kl };

const char* to_string(Measure m);
Measure measure_from_string(std::string_view s);
/// Hellinger and symmetric KL compare probability distributions.
bool is_distribution_measure(Measure m);

/// Similarity in [0, 1]. Cosine of a zero vector is 0; cosine is clamped to
/// [0, 1]. Jaccard compares the supports (non-zero coordinates). Symmetric
/// KL divergence d is reported as 1 / (1 + d).
double similarity(std::span<const double> u, std::span<const double> v,
                  Measure measure);
double similarity(const SparseVector& u, const SparseVector& v, Measure measure);

struct LsiModel {
  int k = 0;
  Eigen::MatrixXd term_factors;    // m x k
  Eigen::MatrixXd doc_factors;     // n x k
  Eigen::VectorXd singular_values;  // k, non-increasing
  std::vector<std::string> doc_ids;
  Vectorizer vectorizer;

  /// Coordinates of a term-space vector in the latent space (U_k^T q).
  Eigen::VectorXd project(const SparseVector& q) const;
  /// Latent coordinates of training document j (Sigma_k V_k^T e_j).
  Eigen::VectorXd document(std::size_t j) const;
  /// Frobenius norm of A - U_k Sigma_k V_k^T.
  double reconstruction_error(const TermDocMatrix& index) const;
};

/// min(ceil(0.3 * min(m, n)), 200), at least 1.
int default_lsi_rank(std::size_t n_terms, std::size_t n_docs);

LsiModel lsi_fit(const TermDocMatrix& index, int k);

struct LdaConfig {
  int topics = 10;
  int iterations = 1000;
  double alpha = 0.0;  // <= 0 selects 50 / topics
  double beta = 0.01;
  std::uint64_t seed = 1;
  int inference_iterations = 100;
};

struct LdaModel {
  int k = 0;
  Eigen::MatrixXd theta;  // k x n, columns are distributions
  Eigen::MatrixXd phi;    // k x m, rows are distributions
  double alpha = 0.0;
  double beta = 0.0;
  int iterations = 0;
  int inference_iterations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> doc_ids;
  Vectorizer vectorizer;

  /// Topic mixture of unseen tokens by Gibbs fold-in with phi held fixed.
  Eigen::VectorXd infer(const std::vector<std::string>& tokens,
                        std::uint64_t seed) const;
};

/// Collapsed Gibbs sampling over the raw counts of `index`.
LdaModel lda_fit(const TermDocMatrix& index, const LdaConfig& cfg);

/// Indices (0-based) of topics with probability >= threshold.
std::vector<std::size_t> dominant_topics(std::span<const double> theta_column,
                                         double threshold);

struct ScoredTarget {
  std::string target_id;
  double score = 0.0;

  bool operator==(const ScoredTarget&) const = default;
};

/// Scores every indexed document against the query; descending score, ties
/// by ascending id. Throws Error(incompatible) for distribution measures.
std::vector<ScoredTarget> rank_targets(const Artifact& query,
                                       const TermDocMatrix& index,
                                       Measure measure);
std::vector<ScoredTarget> rank_targets(const Artifact& query,
                                       const LsiModel& model, Measure measure);
/// Accepts cosine, hellinger and symmetric_kl.
std::vector<ScoredTarget> rank_targets(const Artifact& query,
                                       const LdaModel& model, Measure measure);

void sort_ranking(std::vector<ScoredTarget>& ranking);

/// 64-bit FNV-1a, used for seeds and content hashes.
std::uint64_t fnv1a(std::string_view data);

// Persistence: versioned JSON dumps. Loading a dump with another version or
// kind throws Error(version_mismatch).
inline constexpr int kModelFormatVersion = 1;

void save_model(const TermDocMatrix& index, const std::filesystem::path& path);
void save_model(const LsiModel& model, const std::filesystem::path& path);
void save_model(const LdaModel& model, const std::filesystem::path& path);
TermDocMatrix load_index(const std::filesystem::path& path);
LsiModel load_lsi(const std::filesystem::path& path);
LdaModel load_lda(const std::filesystem::path& path);

}  // namespace tracelab::ir
