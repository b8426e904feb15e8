// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "tracelab/corpus.hpp"
#include "tracelab/ir.hpp"

namespace tracelab::eval {

using PairSet = std::set<TraceMatrix::Key>;

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
};

/// Set-overlap precision, recall and F-beta over (source, target) pairs.
/// Empty prediction against non-empty gold gives precision 0. Empty gold
/// gives recall 1 (nothing to find); both empty gives all ones.
PrecisionRecall precision_recall_f(const PairSet& predicted, const PairSet& gold,
                                   double beta = 1.0);
PrecisionRecall precision_recall_f(const TraceMatrix& predicted,
                                   const TraceMatrix& gold, double beta = 1.0);

struct RankedResult {
  std::string source_id;
  std::vector<ir::ScoredTarget> ranked_targets;
};

/// Mean of precision@rank over the ranks of true targets, divided by the
/// number of gold links of the source (unranked true targets contribute 0).
double average_precision(const RankedResult& result, const PairSet& gold);

/// Mean AP over results whose source has at least one gold link; sources
/// without gold links are excluded. 0 when no result qualifies.
double mean_average_precision(std::span<const RankedResult> results,
                              const PairSet& gold);

/// Mean number of false positives ranked above each true link. A true link
/// missing from its source's ranking counts every false positive of that
/// ranking. 0 when there are no true links.
double lag(std::span<const RankedResult> results, const PairSet& gold);

/// Binary relevance, discount log2(rank + 1).
double dcg_at_k(const RankedResult& result, const PairSet& gold, std::size_t k);
double precision_at_k(const RankedResult& result, const PairSet& gold,
                      std::size_t k);
/// Fraction of the source's gold links found in the top k; 1 without gold.
double recall_at_k(const RankedResult& result, const PairSet& gold,
                   std::size_t k);

PairSet pairs_of(const TraceMatrix& matrix);

struct ClassScore {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

struct ClassificationReport {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<ClassScore> per_class;  // every label seen, sorted
};

/// Single-label multi-class scores. Macro and weighted averages run over the
/// labels present in `gold`; micro pools TP/FP/FN over all labels. Throws
/// on empty or unequal-length input.
ClassificationReport evaluate_types(std::span<const std::string> predictions,
                                    std::span<const std::string> gold);

}  // namespace tracelab::eval
