// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/corpus.hpp"
#include "tracelab/evalkit.hpp"
#include "tracelab/ir.hpp"
#include "tracelab/learn.hpp"

namespace tracelab::tlr {

enum class EngineKind { vsm, lsi, lda, classifier };
enum class RecoveryMode { per_source, full_matrix };

const char* to_string(EngineKind e);
EngineKind engine_from_string(std::string_view s);
RecoveryMode mode_from_string(std::string_view s);

struct RecoveryConfig {
  EngineKind engine = EngineKind::vsm;
  ir::Measure measure = ir::Measure::cosine;
  RecoveryMode mode = RecoveryMode::full_matrix;
  std::optional<double> threshold;  // inclusive
  std::optional<std::size_t> top_k;
  std::string source_id;  // per_source mode

  PreprocessConfig preprocess = PreprocessConfig::defaults();
  ir::Weighting weighting = ir::Weighting::tfidf;
  int lsi_k = 0;  // 0 selects ir::default_lsi_rank
  ir::LdaConfig lda;
  learn::ClassifierKind classifier = learn::ClassifierKind::logistic_regression;
  learn::TrainConfig train;
  std::uint64_t seed = 1;
  int jobs = 1;

  /// Engine/measure compatibility and parameter ranges.
  void validate() const;
};

/// A fitted engine over a dataset's targets. Immutable after construction;
/// rank() is safe to call concurrently.
class Engine {
 public:
  Engine(const Dataset& dataset, const RecoveryConfig& cfg);
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  /// All targets, descending score, ties by ascending id.
  std::vector<ir::ScoredTarget> rank(const Artifact& source) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Rankings of the sources selected by the mode (every source, or only
/// cfg.source_id), in source order.
std::vector<eval::RankedResult> score(const Dataset& dataset,
                                      const RecoveryConfig& cfg);

/// Applies top_k, then the inclusive threshold, to each ranking.
TraceMatrix select_links(const std::vector<eval::RankedResult>& rankings,
                         const RecoveryConfig& cfg);

/// Candidate links with scores and provenance=automatic. Throws
/// Error(invalid_argument, "no selection rule") without threshold and top_k.
TraceMatrix recover(const Dataset& dataset, const RecoveryConfig& cfg);

/// CSV `source_id,target_id,score,engine`, ordered by source id, then
/// descending score, then target id.
void write_candidates_csv(std::ostream& out, const TraceMatrix& candidates,
                          EngineKind engine);

/// Reads candidate CSV rows back as rankings plus the predicted link set.
/// Plain `source target` pair files are accepted too (score 1).
struct Predictions {
  TraceMatrix links;
  std::vector<eval::RankedResult> rankings;
};
Predictions read_predictions(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_score(double v);

}  // namespace tracelab::tlr
