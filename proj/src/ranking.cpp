// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <algorithm>

#include "tracelab/error.hpp"
#include "tracelab/ir.hpp"

namespace tracelab::ir {
namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

void sort_ranking(std::vector<ScoredTarget>& ranking) {
  std::sort(ranking.begin(), ranking.end(),
            [](const ScoredTarget& a, const ScoredTarget& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.target_id < b.target_id;
            });
}

std::vector<ScoredTarget> rank_targets(const Artifact& query,
                                       const TermDocMatrix& index,
                                       Measure measure) {
  if (is_distribution_measure(measure))
    throw Error(ErrorCode::incompatible, std::string(to_string(measure)) +
                                             " is only available for LDA");
  auto tokens = tracelab::preprocess(query.content(), index.vectorizer.preprocess);
  std::vector<ScoredTarget> out;
  out.reserve(index.n_docs());
  if (measure == Measure::jaccard) {
    SparseVector q = index.vectorizer.count(tokens);
    for (std::size_t j = 0; j < index.n_docs(); ++j)
      out.push_back({index.doc_ids[j], similarity(q, index.counts[j], measure)});
  } else {
    SparseVector q = index.vectorizer.weigh(tokens);
    for (std::size_t j = 0; j < index.n_docs(); ++j)
      out.push_back({index.doc_ids[j], similarity(q, index.columns[j], measure)});
  }
  sort_ranking(out);
  return out;
}

std::vector<ScoredTarget> rank_targets(const Artifact& query,
                                       const LsiModel& model, Measure measure) {
  if (is_distribution_measure(measure))
    throw Error(ErrorCode::incompatible, std::string(to_string(measure)) +
                                             " is only available for LDA");
  Eigen::VectorXd q = model.project(model.vectorizer.weigh_text(query.content()));
  std::vector<ScoredTarget> out;
  out.reserve(model.doc_ids.size());
  for (std::size_t j = 0; j < model.doc_ids.size(); ++j) {
    Eigen::VectorXd d = model.document(j);
    out.push_back({model.doc_ids[j], similarity(as_span(q), as_span(d), measure)});
  }
  sort_ranking(out);
  return out;
}

std::vector<ScoredTarget> rank_targets(const Artifact& query,
                                       const LdaModel& model, Measure measure) {
  if (measure == Measure::jaccard)
    throw Error(ErrorCode::incompatible,
                "jaccard is not defined on topic distributions");
  auto tokens = tracelab::preprocess(query.content(), model.vectorizer.preprocess);
  Eigen::VectorXd q = model.infer(tokens, model.seed ^ fnv1a(query.id));
  std::vector<ScoredTarget> out;
  out.reserve(model.doc_ids.size());
  for (std::size_t j = 0; j < model.doc_ids.size(); ++j) {
    Eigen::VectorXd d = model.theta.col(static_cast<Eigen::Index>(j));
    out.push_back({model.doc_ids[j], similarity(as_span(q), as_span(d), measure)});
  }
  sort_ranking(out);
  return out;
}

}  // namespace tracelab::ir
