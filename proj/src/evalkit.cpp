// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/evalkit.hpp"

#include <cmath>
#include <map>

#include "tracelab/error.hpp"

namespace tracelab::eval {
namespace {

double f_measure(double p, double r, double beta) {
  double b2 = beta * beta;
  double denom = b2 * p + r;
  return denom == 0.0 ? 0.0 : (1.0 + b2) * p * r / denom;
}

bool relevant(const PairSet& gold, const std::string& s, const std::string& t) {
  return gold.count({s, t}) > 0;
}

std::size_t gold_count(const PairSet& gold, const std::string& source) {
  std::size_t n = 0;
  for (auto it = gold.lower_bound({source, std::string()});
       it != gold.end() && it->first == source; ++it)
    ++n;
  return n;
}

}  // namespace

PairSet pairs_of(const TraceMatrix& matrix) { return matrix.pairs(); }

PrecisionRecall precision_recall_f(const PairSet& predicted, const PairSet& gold,
                                   double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be > 0");
  std::size_t overlap = 0;
  for (const auto& p : predicted) overlap += gold.count(p);
  PrecisionRecall out;
  if (predicted.empty() && gold.empty()) {
    out.precision = out.recall = out.f_beta = 1.0;
    return out;
  }
  out.precision = predicted.empty()
                      ? 0.0
                      : static_cast<double>(overlap) / static_cast<double>(predicted.size());
  out.recall = gold.empty()
                   ? 1.0
                   : static_cast<double>(overlap) / static_cast<double>(gold.size());
  out.f_beta = f_measure(out.precision, out.recall, beta);
  return out;
}

PrecisionRecall precision_recall_f(const TraceMatrix& predicted,
                                   const TraceMatrix& gold, double beta) {
  return precision_recall_f(predicted.pairs(), gold.pairs(), beta);
}

double average_precision(const RankedResult& result, const PairSet& gold) {
  std::size_t total = gold_count(gold, result.source_id);
  if (total == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < result.ranked_targets.size(); ++i) {
    if (!relevant(gold, result.source_id, result.ranked_targets[i].target_id)) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(total);
}

double mean_average_precision(std::span<const RankedResult> results,
                              const PairSet& gold) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : results) {
    if (gold_count(gold, r.source_id) == 0) continue;
    sum += average_precision(r, gold);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double lag(std::span<const RankedResult> results, const PairSet& gold) {
  double total_lag = 0.0;
  std::size_t true_links = 0;
  for (const auto& r : results) {
    std::size_t false_above = 0;
    std::size_t found = 0;
    for (const auto& t : r.ranked_targets) {
      if (relevant(gold, r.source_id, t.target_id)) {
        total_lag += static_cast<double>(false_above);
        ++found;
      } else {
        ++false_above;
      }
    }
    std::size_t expected = gold_count(gold, r.source_id);
    total_lag += static_cast<double>((expected - found) * false_above);
    true_links += expected;
  }
  return true_links == 0 ? 0.0 : total_lag / static_cast<double>(true_links);
}

double dcg_at_k(const RankedResult& result, const PairSet& gold, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
  double dcg = 0.0;
  std::size_t limit = std::min(k, result.ranked_targets.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (relevant(gold, result.source_id, result.ranked_targets[i].target_id))
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

double precision_at_k(const RankedResult& result, const PairSet& gold,
                      std::size_t k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
  std::size_t hits = 0;
  std::size_t limit = std::min(k, result.ranked_targets.size());
  for (std::size_t i = 0; i < limit; ++i)
    hits += relevant(gold, result.source_id, result.ranked_targets[i].target_id) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double recall_at_k(const RankedResult& result, const PairSet& gold,
                   std::size_t k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");
  std::size_t total = gold_count(gold, result.source_id);
  if (total == 0) return 1.0;
  std::size_t hits = 0;
  std::size_t limit = std::min(k, result.ranked_targets.size());
  for (std::size_t i = 0; i < limit; ++i)
    hits += relevant(gold, result.source_id, result.ranked_targets[i].target_id) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(total);
}

ClassificationReport evaluate_types(std::span<const std::string> predictions,
                                    std::span<const std::string> gold) {
  if (predictions.size() != gold.size())
    throw Error(ErrorCode::invalid_argument,
                "predictions and gold labels differ in length");
  if (gold.empty())
    throw Error(ErrorCode::invalid_argument, "cannot evaluate an empty label set");

  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
  };
  std::map<std::string, Counts> counts;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    counts[gold[i]].support += 1;
    if (predictions[i] == gold[i]) {
      counts[gold[i]].tp += 1;
      ++correct;
    } else {
      counts[predictions[i]].fp += 1;
      counts[gold[i]].fn += 1;
    }
  }

  ClassificationReport report;
  std::size_t tp = 0, fp = 0, fn = 0, gold_classes = 0;
  double macro = 0.0, weighted = 0.0;
  for (const auto& [label, c] : counts) {
    ClassScore s;
    s.label = label;
    s.support = c.support;
    s.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    s.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    s.f1 = f_measure(s.precision, s.recall, 1.0);
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    if (c.support > 0) {
      ++gold_classes;
      macro += s.f1;
      weighted += s.f1 * static_cast<double>(c.support);
    }
    report.per_class.push_back(std::move(s));
  }
  double micro_p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  double micro_r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  report.micro_f1 = f_measure(micro_p, micro_r, 1.0);
  report.macro_f1 = macro / static_cast<double>(gold_classes);
  report.weighted_f1 = weighted / static_cast<double>(gold.size());
  report.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  return report;
}

}  // namespace tracelab::eval
