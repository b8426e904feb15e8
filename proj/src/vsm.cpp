// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <algorithm>
#include <cmath>
#include <map>

#include "tracelab/error.hpp"
#include "tracelab/ir.hpp"

namespace tracelab::ir {

const char* to_string(Weighting w) {
  return w == Weighting::tfidf ? "tfidf" : "bag_of_words";
}

Weighting weighting_from_string(std::string_view s) {
  if (s == "tfidf") return Weighting::tfidf;
  if (s == "bag_of_words" || s == "bow") return Weighting::bag_of_words;
  throw Error(ErrorCode::invalid_argument,
              "unknown weighting '" + std::string(s) + "'");
}

SparseVector Vectorizer::count(const std::vector<std::string>& tokens) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& tok : tokens) {
    if (auto idx = vocabulary.find(tok))
      counts[static_cast<std::uint32_t>(*idx)] += 1.0;
  }
  SparseVector out;
  out.reserve(counts.size());
  for (const auto& [idx, c] : counts) out.push_back({idx, c});
  return out;
}

SparseVector Vectorizer::weigh(const std::vector<std::string>& tokens) const {
  SparseVector counts = count(tokens);
  SparseVector out;
  out.reserve(counts.size());
  const double len = static_cast<double>(tokens.size());
  for (const auto& e : counts) {
    double w = weighting == Weighting::bag_of_words
                   ? 1.0
                   : (e.value / len) * idf[e.index];
    if (w != 0.0) out.push_back({e.index, w});
  }
  return out;
}

SparseVector Vectorizer::weigh_text(std::string_view text) const {
  return weigh(tracelab::preprocess(text, preprocess));
}

Eigen::MatrixXd TermDocMatrix::dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(n_terms()), static_cast<Eigen::Index>(n_docs()));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (const auto& e : columns[j])
      a(static_cast<Eigen::Index>(e.index), static_cast<Eigen::Index>(j)) = e.value;
  return a;
}

TermDocMatrix build_index(const std::vector<std::string>& doc_ids,
                          const std::vector<std::string>& texts,
                          const PreprocessConfig& cfg, Weighting weighting) {
  if (doc_ids.size() != texts.size())
    throw Error(ErrorCode::invalid_argument, "doc_ids and texts differ in size");

  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(texts.size());
  std::vector<std::string> all_terms;
  for (const auto& text : texts) {
    tokens.push_back(tracelab::preprocess(text, cfg));
    all_terms.insert(all_terms.end(), tokens.back().begin(), tokens.back().end());
  }

  TermDocMatrix m;
  m.doc_ids = doc_ids;
  m.vectorizer.preprocess = cfg;
  m.vectorizer.weighting = weighting;
  m.vectorizer.vocabulary = make_vocabulary(std::move(all_terms));

  m.counts.reserve(tokens.size());
  std::vector<double> df(m.n_terms(), 0.0);
  for (const auto& doc : tokens) {
    m.counts.push_back(m.vectorizer.count(doc));
    m.doc_lengths.push_back(doc.size());
    for (const auto& e : m.counts.back()) df[e.index] += 1.0;
  }

  const double n = static_cast<double>(m.n_docs());
  m.vectorizer.idf.resize(m.n_terms());
  for (std::size_t i = 0; i < df.size(); ++i)
    m.vectorizer.idf[i] = std::log2(n / df[i]);

  m.columns.reserve(tokens.size());
  for (const auto& doc : tokens) m.columns.push_back(m.vectorizer.weigh(doc));
  return m;
}

TermDocMatrix build_index(const ArtifactSet& set, const PreprocessConfig& cfg,
                          Weighting weighting) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  ids.reserve(set.size());
  texts.reserve(set.size());
  for (const auto& a : set) {
    ids.push_back(a.id);
    texts.push_back(a.content());
  }
  return build_index(ids, texts, cfg, weighting);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace tracelab::ir
