// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "tracelab/error.hpp"
#include "tracelab/ir.hpp"

namespace tracelab::ir {

int default_lsi_rank(std::size_t n_terms, std::size_t n_docs) {
  std::size_t small = std::min(n_terms, n_docs);
  auto k = static_cast<int>(std::ceil(0.3 * static_cast<double>(small)));
  return std::max(1, std::min(k, 200));
}

LsiModel lsi_fit(const TermDocMatrix& index, int k) {
  const auto limit = static_cast<int>(std::min(index.n_terms(), index.n_docs()));
  if (k < 1 || k > limit)
    throw Error(ErrorCode::invalid_argument,
                "LSI rank k=" + std::to_string(k) + " outside [1, " +
                    std::to_string(limit) + "]");

  Eigen::MatrixXd a = index.dense();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);

  LsiModel model;
  model.k = k;
  model.term_factors = svd.matrixU().leftCols(k);
  model.doc_factors = svd.matrixV().leftCols(k);
  model.singular_values = svd.singularValues().head(k);
  model.doc_ids = index.doc_ids;
  model.vectorizer = index.vectorizer;
  return model;
}

Eigen::VectorXd LsiModel::project(const SparseVector& q) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
  for (const auto& e : q)
    out += e.value * term_factors.row(static_cast<Eigen::Index>(e.index)).transpose();
  return out;
}

Eigen::VectorXd LsiModel::document(std::size_t j) const {
  return singular_values.cwiseProduct(
      doc_factors.row(static_cast<Eigen::Index>(j)).transpose());
}

double LsiModel::reconstruction_error(const TermDocMatrix& index) const {
  Eigen::MatrixXd approx =
      term_factors * singular_values.asDiagonal() * doc_factors.transpose();
  return (index.dense() - approx).norm();
}

}  // namespace tracelab::ir
