// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <random>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/ir.hpp"

namespace tracelab::ir {
namespace {

// Portable uniform draw in [0, 1): the mt19937_64 sequence is fixed by the
// standard, the library distributions are not.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>((*this)() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
};

std::size_t sample(std::vector<double>& weights, Uniform& rng) {
  double total = 0.0;
  for (double& w : weights) {
    total += w;
    w = total;
  }
  double u = rng() * total;
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (u < weights[k]) return k;
  return weights.size() - 1;
}

}  // namespace

LdaModel lda_fit(const TermDocMatrix& index, const LdaConfig& cfg) {
  if (cfg.topics < 1) throw Error(ErrorCode::invalid_argument, "LDA needs k >= 1");
  if (cfg.iterations < 1)
    throw Error(ErrorCode::invalid_argument, "LDA needs iterations >= 1");
  if (cfg.beta <= 0.0) throw Error(ErrorCode::invalid_argument, "LDA beta must be > 0");
  if (index.n_docs() == 0 || index.n_terms() == 0)
    throw Error(ErrorCode::invalid_argument, "LDA on an empty corpus");

  const std::size_t k = static_cast<std::size_t>(cfg.topics);
  const std::size_t m = index.n_terms();
  const std::size_t n = index.n_docs();
  const double alpha = cfg.alpha > 0.0 ? cfg.alpha : 50.0 / static_cast<double>(k);
  const double beta = cfg.beta;
  const double vbeta = static_cast<double>(m) * beta;

  // Token stream per document, expanded from counts in term order.
  std::vector<std::vector<std::uint32_t>> words(n);
  for (std::size_t d = 0; d < n; ++d)
    for (const auto& e : index.counts[d])
      words[d].insert(words[d].end(), static_cast<std::size_t>(e.value), e.index);

  Uniform rng(cfg.seed);
  std::vector<std::vector<std::uint32_t>> z(n);
  std::vector<double> n_dk(n * k, 0.0);
  std::vector<double> n_kw(k * m, 0.0);
  std::vector<double> n_k(k, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    z[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      auto t = static_cast<std::uint32_t>(rng.below(k));
      z[d][i] = t;
      n_dk[d * k + t] += 1;
      n_kw[t * m + words[d][i]] += 1;
      n_k[t] += 1;
    }
  }

  std::vector<double> p(k);
  for (int it = 0; it < cfg.iterations; ++it) {
    for (std::size_t d = 0; d < n; ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const std::uint32_t w = words[d][i];
        std::uint32_t t = z[d][i];
        n_dk[d * k + t] -= 1;
        n_kw[t * m + w] -= 1;
        n_k[t] -= 1;
        for (std::size_t j = 0; j < k; ++j)
          p[j] = (n_dk[d * k + j] + alpha) * (n_kw[j * m + w] + beta) / (n_k[j] + vbeta);
        t = static_cast<std::uint32_t>(sample(p, rng));
        z[d][i] = t;
        n_dk[d * k + t] += 1;
        n_kw[t * m + w] += 1;
        n_k[t] += 1;
      }
    }
  }

  LdaModel model;
  model.k = cfg.topics;
  model.alpha = alpha;
  model.beta = beta;
  model.iterations = cfg.iterations;
  model.inference_iterations = cfg.inference_iterations;
  model.seed = cfg.seed;
  model.doc_ids = index.doc_ids;
  model.vectorizer = index.vectorizer;
  model.theta.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  model.phi.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  const double kalpha = static_cast<double>(k) * alpha;
  for (std::size_t d = 0; d < n; ++d) {
    const double len = static_cast<double>(words[d].size());
    for (std::size_t j = 0; j < k; ++j)
      model.theta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(d)) =
          (n_dk[d * k + j] + alpha) / (len + kalpha);
  }
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t w = 0; w < m; ++w)
      model.phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(w)) =
          (n_kw[j * m + w] + beta) / (n_k[j] + vbeta);
  return model;
}

Eigen::VectorXd LdaModel::infer(const std::vector<std::string>& tokens,
                                std::uint64_t infer_seed) const {
  const auto kk = static_cast<std::size_t>(k);
  std::vector<std::uint32_t> words;
  for (const auto& e : vectorizer.count(tokens))
    words.insert(words.end(), static_cast<std::size_t>(e.value), e.index);

  Uniform rng(infer_seed);
  std::vector<std::uint32_t> z(words.size());
  std::vector<double> n_k(kk, 0.0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    z[i] = static_cast<std::uint32_t>(rng.below(kk));
    n_k[z[i]] += 1;
  }
  std::vector<double> p(kk);
  const int sweeps = words.empty() ? 0 : std::max(1, inference_iterations);
  for (int it = 0; it < sweeps; ++it) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      n_k[z[i]] -= 1;
      for (std::size_t j = 0; j < kk; ++j)
        p[j] = (n_k[j] + alpha) *
               phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(words[i]));
      z[i] = static_cast<std::uint32_t>(sample(p, rng));
      n_k[z[i]] += 1;
    }
  }
  Eigen::VectorXd out(k);
  const double denom = static_cast<double>(words.size()) + static_cast<double>(kk) * alpha;
  for (std::size_t j = 0; j < kk; ++j)
    out(static_cast<Eigen::Index>(j)) = (n_k[j] + alpha) / denom;
  return out;
}

std::vector<std::size_t> dominant_topics(std::span<const double> theta_column,
                                         double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < theta_column.size(); ++i)
    if (theta_column[i] >= threshold) out.push_back(i);
  return out;
}

}  // namespace tracelab::ir
