// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <algorithm>
#include <set>

#include "tracelab/error.hpp"
#include "tracelab/learn.hpp"

namespace tracelab::learn {

const char* to_string(Label l) { return l == Label::link ? "link" : "no_link"; }

void FeatureMatrix::add_row(std::span<const double> row) {
  if (row.size() != cols())
    throw Error(ErrorCode::invalid_argument,
                "feature row has " + std::to_string(row.size()) +
                    " values, expected " + std::to_string(cols()));
  values.insert(values.end(), row.begin(), row.end());
  ++rows;
}

FeatureMatrix PairTable::features(std::span<const std::size_t> rows) const {
  FeatureMatrix x;
  x.names = feature_names;
  x.values.reserve(rows.size() * feature_names.size());
  for (std::size_t r : rows) x.add_row(pairs[r].features);
  return x;
}

std::vector<Label> PairTable::labels(std::span<const std::size_t> rows) const {
  std::vector<Label> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(pairs[r].label);
  return out;
}

std::vector<Label> PairTable::labels() const {
  std::vector<Label> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.label);
  return out;
}

FeatureMode feature_mode_from_string(std::string_view s) {
  if (s == "similarity_features" || s == "similarity")
    return FeatureMode::similarity_features;
  if (s == "concatenated_vectors" || s == "concatenated")
    return FeatureMode::concatenated_vectors;
  throw Error(ErrorCode::invalid_argument,
              "unknown feature mode '" + std::string(s) + "'");
}

const std::vector<std::string>& similarity_feature_names() {
  static const std::vector<std::string> names{
      "cosine_tfidf", "jaccard_tokens", "lsi_cosine", "lda_hellinger",
      "shared_rare_term_count"};
  return names;
}

namespace {

// Combined corpus: sources first, then targets.
struct Combined {
  ir::TermDocMatrix index;
  std::size_t n_sources = 0;
};

Combined combined_index(const Dataset& d, const PreprocessConfig& cfg) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (const auto& a : d.sources) {
    ids.push_back("s:" + a.id);
    texts.push_back(a.content());
  }
  for (const auto& a : d.targets) {
    ids.push_back("t:" + a.id);
    texts.push_back(a.content());
  }
  return {ir::build_index(ids, texts, cfg, ir::Weighting::tfidf), d.sources.size()};
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<double> densify(const ir::SparseVector& v, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  for (const auto& e : v) out[e.index] = e.value;
  return out;
}

}  // namespace

PairTable make_pairs(const Dataset& dataset, FeatureMode mode,
                     const PairFeatureConfig& cfg) {
  PairTable table;
  const std::size_t ns = dataset.sources.size();
  const std::size_t nt = dataset.targets.size();
  table.pairs.reserve(ns * nt);
  if (ns == 0 || nt == 0) {
    table.feature_names = similarity_feature_names();
    return table;
  }

  Combined c = combined_index(dataset, cfg.preprocess);
  const ir::TermDocMatrix& index = c.index;
  const std::size_t m = index.n_terms();

  if (mode == FeatureMode::concatenated_vectors) {
    for (const auto& term : index.vectorizer.vocabulary.terms)
      table.feature_names.push_back("s:" + term);
    for (const auto& term : index.vectorizer.vocabulary.terms)
      table.feature_names.push_back("t:" + term);
  } else {
    table.feature_names = similarity_feature_names();
  }
  for (const auto& f : cfg.extra) table.feature_names.push_back(f.name);

  // Latent representations for the similarity features.
  std::vector<Eigen::VectorXd> lsi_docs;
  std::vector<Eigen::VectorXd> lda_docs;
  std::vector<double> df(m, 0.0);
  if (mode == FeatureMode::similarity_features && m > 0) {
    int k = cfg.lsi_k > 0 ? std::min<int>(cfg.lsi_k, static_cast<int>(std::min(m, index.n_docs())))
                          : ir::default_lsi_rank(m, index.n_docs());
    ir::LsiModel lsi = ir::lsi_fit(index, k);
    for (std::size_t j = 0; j < index.n_docs(); ++j) lsi_docs.push_back(lsi.document(j));
    ir::LdaModel lda = ir::lda_fit(index, cfg.lda);
    for (std::size_t j = 0; j < index.n_docs(); ++j)
      lda_docs.push_back(lda.theta.col(static_cast<Eigen::Index>(j)));
    for (const auto& col : index.counts)
      for (const auto& e : col) df[e.index] += 1.0;
  }

  for (std::size_t s = 0; s < ns; ++s) {
    const std::size_t sj = s;
    std::vector<double> source_dense;
    if (mode == FeatureMode::concatenated_vectors)
      source_dense = densify(index.columns[sj], m);
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t tj = ns + t;
      LabeledPair p;
      p.source_id = dataset.sources[s].id;
      p.target_id = dataset.targets[t].id;
      p.label = dataset.answers.contains(p.source_id, p.target_id) ? Label::link
                                                                   : Label::no_link;
      if (mode == FeatureMode::concatenated_vectors) {
        p.features = source_dense;
        auto target_dense = densify(index.columns[tj], m);
        p.features.insert(p.features.end(), target_dense.begin(), target_dense.end());
      } else if (m == 0) {
        p.features.assign(similarity_feature_names().size(), 0.0);
      } else {
        double shared_rare = 0.0;
        const auto& a = index.counts[sj];
        const auto& b = index.counts[tj];
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
          if (a[i].index < b[j].index) {
            ++i;
          } else if (b[j].index < a[i].index) {
            ++j;
          } else {
            if (df[a[i].index] <= cfg.rare_df) shared_rare += 1.0;
            ++i;
            ++j;
          }
        }
        p.features = {
            ir::similarity(index.columns[sj], index.columns[tj], ir::Measure::cosine),
            ir::similarity(a, b, ir::Measure::jaccard),
            ir::similarity(as_span(lsi_docs[sj]), as_span(lsi_docs[tj]), ir::Measure::cosine),
            ir::similarity(as_span(lda_docs[sj]), as_span(lda_docs[tj]), ir::Measure::hellinger),
            shared_rare};
      }
      for (const auto& f : cfg.extra)
        p.features.push_back(f.compute(dataset.sources[s], dataset.targets[t]));
      table.pairs.push_back(std::move(p));
    }
  }
  return table;
}

}  // namespace tracelab::learn
