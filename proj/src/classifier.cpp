// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "tracelab/error.hpp"
#include "tracelab/learn.hpp"
#include "tracelab/parallel.hpp"

using nlohmann::json;

namespace tracelab::learn {

const char* to_string(ClassifierKind k) {
  return k == ClassifierKind::naive_bayes ? "naive_bayes" : "logistic_regression";
}

ClassifierKind classifier_kind_from_string(std::string_view s) {
  if (s == "naive_bayes" || s == "nb") return ClassifierKind::naive_bayes;
  if (s == "logistic_regression" || s == "lr") return ClassifierKind::logistic_regression;
  throw Error(ErrorCode::invalid_argument,
              "unknown classifier '" + std::string(s) + "'");
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double weight_at(std::span<const double> w, std::size_t i) {
  return w.empty() ? 1.0 : w[i];
}

void check_shapes(std::span<const double> params, const FeatureMatrix& x,
                  std::span<const double> targets, std::span<const double> sw) {
  if (params.size() != x.cols() + 1 || targets.size() != x.rows ||
      (!sw.empty() && sw.size() != x.rows))
    throw Error(ErrorCode::invalid_argument, "logistic objective: shape mismatch");
}

}  // namespace

double logistic_loss(std::span<const double> params, const FeatureMatrix& x,
                     std::span<const double> targets,
                     std::span<const double> sample_weights, double l2) {
  check_shapes(params, x, targets, sample_weights);
  const std::size_t d = x.cols();
  double loss = 0.0, total_w = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    double z = params[d];
    for (std::size_t j = 0; j < d; ++j) z += params[j] * row[j];
    // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
    double w = weight_at(sample_weights, i);
    loss += w * (softplus(z) - targets[i] * z);
    total_w += w;
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < d; ++j) reg += params[j] * params[j];
  return (total_w > 0 ? loss / total_w : 0.0) + 0.5 * l2 * reg;
}

std::vector<double> logistic_gradient(std::span<const double> params,
                                      const FeatureMatrix& x,
                                      std::span<const double> targets,
                                      std::span<const double> sample_weights,
                                      double l2) {
  check_shapes(params, x, targets, sample_weights);
  const std::size_t d = x.cols();
  std::vector<double> g(d + 1, 0.0);
  double total_w = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    double z = params[d];
    for (std::size_t j = 0; j < d; ++j) z += params[j] * row[j];
    double w = weight_at(sample_weights, i);
    double r = w * (sigmoid(z) - targets[i]);
    for (std::size_t j = 0; j < d; ++j) g[j] += r * row[j];
    g[d] += r;
    total_w += w;
  }
  if (total_w > 0)
    for (double& v : g) v /= total_w;
  for (std::size_t j = 0; j < d; ++j) g[j] += l2 * params[j];
  return g;
}

void Classifier::check_dimension(std::size_t d) const {
  if (d != names_.size())
    throw Error(ErrorCode::invalid_argument,
                "feature dimension " + std::to_string(d) + " does not match the " +
                    std::to_string(names_.size()) + " training features");
}

void Classifier::check_features(const std::vector<std::string>& names) const {
  if (names != names_)
    throw Error(ErrorCode::incompatible,
                "feature names differ from those the classifier was trained on");
}

std::vector<double> Classifier::standardized(std::span<const double> features) const {
  std::vector<double> z(features.begin(), features.end());
  if (!mean_.empty())
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = (z[j] - mean_[j]) / scale_[j];
  return z;
}

std::array<double, 2> Classifier::predict_proba(std::span<const double> features) const {
  check_dimension(features.size());
  if (kind_ == ClassifierKind::logistic_regression) {
    auto z = standardized(features);
    double s = bias_;
    for (std::size_t j = 0; j < z.size(); ++j) s += weights_[j] * z[j];
    double p = sigmoid(s);
    return {1.0 - p, p};
  }
  std::array<double, 2> logp{};
  for (int c = 0; c < 2; ++c) {
    double lp = log_prior_[c];
    for (std::size_t j = 0; j < features.size(); ++j) {
      double var = nb_var_[c][j];
      double diff = features[j] - nb_mean_[c][j];
      lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - diff * diff / (2.0 * var);
    }
    logp[c] = lp;
  }
  double mx = std::max(logp[0], logp[1]);
  double e0 = std::exp(logp[0] - mx);
  double e1 = std::exp(logp[1] - mx);
  double p1 = e1 / (e0 + e1);
  return {1.0 - p1, p1};
}

Label Classifier::predict(std::span<const double> features) const {
  return predict_proba(features)[1] > 0.5 ? Label::link : Label::no_link;
}

Classifier train(const FeatureMatrix& x, std::span<const Label> y,
                 ClassifierKind kind, const TrainConfig& cfg,
                 std::span<const double> sample_weights) {
  if (y.size() != x.rows)
    throw Error(ErrorCode::invalid_argument, "label count does not match feature rows");
  if (!sample_weights.empty() && sample_weights.size() != x.rows)
    throw Error(ErrorCode::invalid_argument, "sample weight count mismatch");
  std::array<std::size_t, 2> class_count{};
  for (Label l : y) class_count[static_cast<int>(l)] += 1;
  if (class_count[0] == 0 || class_count[1] == 0)
    throw Error(ErrorCode::invalid_argument,
                "training data must contain both link and no_link examples");

  const std::size_t d = x.cols();
  Classifier clf;
  clf.kind_ = kind;
  clf.names_ = x.names;
  clf.config_ = cfg;

  if (kind == ClassifierKind::naive_bayes) {
    std::array<double, 2> wsum{};
    for (int c = 0; c < 2; ++c) {
      clf.nb_mean_[c].assign(d, 0.0);
      clf.nb_var_[c].assign(d, 0.0);
    }
    for (std::size_t i = 0; i < x.rows; ++i) {
      int c = static_cast<int>(y[i]);
      double w = weight_at(sample_weights, i);
      wsum[c] += w;
      auto row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) clf.nb_mean_[c][j] += w * row[j];
    }
    for (int c = 0; c < 2; ++c)
      for (double& m : clf.nb_mean_[c]) m /= wsum[c];
    double max_var = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      int c = static_cast<int>(y[i]);
      double w = weight_at(sample_weights, i);
      auto row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        double diff = row[j] - clf.nb_mean_[c][j];
        clf.nb_var_[c][j] += w * diff * diff;
      }
    }
    for (int c = 0; c < 2; ++c)
      for (double& v : clf.nb_var_[c]) {
        v /= wsum[c];
        max_var = std::max(max_var, v);
      }
    // variance floor keeps constant features from producing zero variance
    const double floor = 1e-9 * std::max(max_var, 1.0);
    for (int c = 0; c < 2; ++c)
      for (double& v : clf.nb_var_[c]) v += floor;
    const double total = wsum[0] + wsum[1];
    for (int c = 0; c < 2; ++c) clf.log_prior_[c] = std::log(wsum[c] / total);
    return clf;
  }

  FeatureMatrix z = x;
  if (cfg.standardize) {
    clf.mean_.assign(d, 0.0);
    clf.scale_.assign(d, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
      auto row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) clf.mean_[j] += row[j];
    }
    for (double& m : clf.mean_) m /= static_cast<double>(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
      auto row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        double diff = row[j] - clf.mean_[j];
        clf.scale_[j] += diff * diff;
      }
    }
    for (double& s : clf.scale_) {
      s = std::sqrt(s / static_cast<double>(x.rows));
      if (s < 1e-12) s = 1.0;
    }
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t j = 0; j < d; ++j)
        z.values[i * d + j] = (z.values[i * d + j] - clf.mean_[j]) / clf.scale_[j];
  }

  std::vector<double> targets(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) targets[i] = y[i] == Label::link ? 1.0 : 0.0;
  std::vector<double> params(d + 1, 0.0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto g = logistic_gradient(params, z, targets, sample_weights, cfg.l2);
    for (std::size_t j = 0; j <= d; ++j) params[j] -= cfg.learning_rate * g[j];
  }
  clf.weights_.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
  clf.bias_ = params[d];
  return clf;
}

Classifier train(const PairTable& table, std::span<const std::size_t> rows,
                 ClassifierKind kind, const TrainConfig& cfg) {
  FeatureMatrix x = table.features(rows);
  std::vector<Label> y = table.labels(rows);
  return train(x, y, kind, cfg);
}

namespace {
constexpr const char* kClassifierFormat = "tracelab-classifier";
constexpr int kClassifierVersion = 1;
}  // namespace

void Classifier::save(const std::filesystem::path& path) const {
  json j = {{"format", kClassifierFormat},
            {"version", kClassifierVersion},
            {"kind", to_string(kind_)},
            {"feature_names", names_},
            {"config",
             {{"learning_rate", config_.learning_rate},
              {"epochs", config_.epochs},
              {"l2", config_.l2},
              {"seed", config_.seed},
              {"standardize", config_.standardize}}},
            {"weights", weights_},
            {"bias", bias_},
            {"mean", mean_},
            {"scale", scale_},
            {"log_prior", log_prior_},
            {"nb_mean", nb_mean_},
            {"nb_var", nb_var_}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << j.dump() << '\n';
}

Classifier Classifier::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::load, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::load, path.string() + ": " + e.what());
  }
  if (j.value("format", "") != kClassifierFormat ||
      j.value("version", -1) != kClassifierVersion)
    throw Error(ErrorCode::version_mismatch,
                path.string() + ": unsupported classifier dump version");
  Classifier c;
  c.kind_ = classifier_kind_from_string(j.at("kind").get<std::string>());
  c.names_ = j.at("feature_names").get<std::vector<std::string>>();
  const json& cfg = j.at("config");
  c.config_.learning_rate = cfg.at("learning_rate").get<double>();
  c.config_.epochs = cfg.at("epochs").get<int>();
  c.config_.l2 = cfg.at("l2").get<double>();
  c.config_.seed = cfg.at("seed").get<std::uint64_t>();
  c.config_.standardize = cfg.at("standardize").get<bool>();
  c.weights_ = j.at("weights").get<std::vector<double>>();
  c.bias_ = j.at("bias").get<double>();
  c.mean_ = j.at("mean").get<std::vector<double>>();
  c.scale_ = j.at("scale").get<std::vector<double>>();
  c.log_prior_ = j.at("log_prior").get<std::array<double, 2>>();
  c.nb_mean_ = j.at("nb_mean").get<std::array<std::vector<double>, 2>>();
  c.nb_var_ = j.at("nb_var").get<std::array<std::vector<double>, 2>>();
  return c;
}

double link_f1(std::span<const Label> predicted, std::span<const Label> gold) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    bool p = predicted[i] == Label::link;
    bool g = gold[i] == Label::link;
    tp += (p && g) ? 1 : 0;
    fp += (p && !g) ? 1 : 0;
    fn += (!p && g) ? 1 : 0;
  }
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

std::vector<FoldResult> cross_validate(const PairTable& table,
                                       const std::vector<Fold>& folds,
                                       ClassifierKind kind,
                                       const TrainConfig& cfg,
                                       std::optional<BalanceStrategy> balancing,
                                       int jobs) {
  std::vector<FoldResult> results(folds.size());
  parallel_for(folds.size(), jobs, [&](std::size_t f) {
    std::vector<std::size_t> rows = folds[f].train;
    if (balancing) {
      auto labels = table.labels(rows);
      std::vector<std::size_t> picked;
      for (std::size_t i : balance_indices(labels, *balancing, cfg.seed + f))
        picked.push_back(rows[i]);
      rows = std::move(picked);
    }
    Classifier clf = train(table, rows, kind, cfg);
    FoldResult& r = results[f];
    r.test = folds[f].test;
    for (std::size_t i : r.test) r.predicted.push_back(clf.predict(table.pairs[i].features));
    r.f1 = link_f1(r.predicted, table.labels(r.test));
  });
  return results;
}

}  // namespace tracelab::learn
