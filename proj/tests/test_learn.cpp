// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "tracelab/error.hpp"
#include "tracelab/learn.hpp"

using namespace tracelab;
using namespace tracelab::learn;

namespace {

std::size_t count(std::span<const Label> labels, Label l) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

// Points around (+2, +2) are links, around (-2, -2) are not.
void separable(std::mt19937_64& rng, std::size_t n, FeatureMatrix& x, std::vector<Label>& y) {
  std::normal_distribution<double> noise(0.0, 0.5);
  x.names = {"f0", "f1"};
  for (std::size_t i = 0; i < n; ++i) {
    bool link = i % 3 == 0;
    double c = link ? 2.0 : -2.0;
    std::vector<double> row{c + noise(rng), c + noise(rng)};
    x.add_row(row);
    y.push_back(link ? Label::link : Label::no_link);
  }
}

std::vector<Label> labels_of(std::size_t links, std::size_t others) {
  std::vector<Label> out(links + others, Label::no_link);
  for (std::size_t i = 0; i < links; ++i) out[i * out.size() / links] = Label::link;
  return out;
}

}  // namespace

TEST(MakePairs, CountsAndLabels) {
  Dataset d;
  for (int i = 0; i < 3; ++i) d.sources.add(testsupport::artifact("s" + std::to_string(i), "source text " + std::to_string(i) + " pump"));
  for (int i = 0; i < 4; ++i) d.targets.add(testsupport::artifact("t" + std::to_string(i), "target words valve " + std::to_string(i)));
  d.answers.insert(make_link("s0", "t1", Provenance::manual));
  d.answers.insert(make_link("s2", "t3", Provenance::manual));
  PairFeatureConfig cfg;
  cfg.lda.iterations = 20;
  for (auto mode : {FeatureMode::similarity_features, FeatureMode::concatenated_vectors}) {
    PairTable t = make_pairs(d, mode, cfg);
    ASSERT_EQ(t.size(), 12u);
    auto labels = t.labels();
    EXPECT_EQ(count(labels, Label::link), 2u);
    EXPECT_EQ(count(labels, Label::no_link), 10u);
    EXPECT_EQ(t.pairs[1].source_id, "s0");
    EXPECT_EQ(t.pairs[1].target_id, "t1");
    EXPECT_EQ(t.pairs[1].label, Label::link);
    for (const auto& p : t.pairs) EXPECT_EQ(p.features.size(), t.feature_names.size());
  }
  EXPECT_EQ(make_pairs(d, FeatureMode::similarity_features, cfg).feature_names,
            similarity_feature_names());
}

TEST(MakePairs, IdenticalTextsHaveUnitCosine) {
  Dataset d;
  d.sources.add(testsupport::artifact("s", "pump pressure monitor"));
  d.targets.add(testsupport::artifact("t", "pump pressure monitor"));
  d.targets.add(testsupport::artifact("u", "operator alarm panel"));
  PairFeatureConfig cfg;
  cfg.lda.iterations = 20;
  PairTable t = make_pairs(d, FeatureMode::similarity_features, cfg);
  EXPECT_NEAR(t.pairs[0].features[0], 1.0, 1e-12);
  EXPECT_NEAR(t.pairs[0].features[1], 1.0, 1e-12);
}

TEST(MakePairs, ExtraFeaturesAppended) {
  Dataset d = testsupport::planted_dataset(3, 1);
  PairFeatureConfig cfg;
  cfg.lda.iterations = 10;
  cfg.extra.push_back({"same_suffix", [](const Artifact& s, const Artifact& t) {
                         return s.id.back() == t.id.back() ? 1.0 : 0.0;
                       }});
  PairTable t = make_pairs(d, FeatureMode::similarity_features, cfg);
  EXPECT_EQ(t.feature_names.back(), "same_suffix");
  EXPECT_EQ(t.pairs[0].features.back(), 1.0);
  EXPECT_EQ(t.pairs[1].features.back(), 0.0);
}

TEST(Balance, UnderAndOversample) {
  auto labels = labels_of(2, 10);
  auto under = balance_indices(labels, BalanceStrategy::undersample, 3);
  std::vector<Label> u;
  for (auto i : under) u.push_back(labels[i]);
  EXPECT_EQ(count(u, Label::link), 2u);
  EXPECT_EQ(count(u, Label::no_link), 2u);

  auto over = balance_indices(labels, BalanceStrategy::oversample, 3);
  std::vector<Label> o;
  for (auto i : over) o.push_back(labels[i]);
  EXPECT_EQ(count(o, Label::link), 10u);
  EXPECT_EQ(count(o, Label::no_link), 10u);

  EXPECT_EQ(balance_indices(labels, BalanceStrategy::undersample, 3), under);
  EXPECT_EQ(balance_indices(labels, BalanceStrategy::oversample, 3), over);
}

TEST(Balance, KeepsEveryMinorityRow) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t links = 1 + rng() % 5, others = links + rng() % 30;
    auto labels = labels_of(links, others);
    for (auto strategy : {BalanceStrategy::undersample, BalanceStrategy::oversample}) {
      auto rows = balance_indices(labels, strategy, trial);
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == Label::link) {
          EXPECT_NE(std::find(rows.begin(), rows.end(), i), rows.end());
        }
    }
  }
}

TEST(Balance, NeedsBothClasses) {
  std::vector<Label> only(5, Label::no_link);
  EXPECT_THROW(balance_indices(only, BalanceStrategy::undersample, 1), Error);
}

TEST(Split, KFoldPartitions) {
  std::vector<int> strata{0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
  auto folds = stratified_kfold(strata, 5, 4);
  ASSERT_EQ(folds.size(), 5u);
  std::vector<int> tested(10, 0);
  for (const auto& f : folds) {
    EXPECT_EQ(f.test.size(), 2u);
    EXPECT_EQ(f.train.size() + f.test.size(), 10u);
    for (auto i : f.test) {
      ++tested[i];
      EXPECT_EQ(std::find(f.train.begin(), f.train.end(), i), f.train.end());
    }
  }
  for (int t : tested) EXPECT_EQ(t, 1);
  // Each link lands in a different fold.
  int folds_with_link = 0;
  for (const auto& f : folds)
    for (auto i : f.test) folds_with_link += strata[i] == 1 ? 1 : 0;
  EXPECT_EQ(folds_with_link, 2);
}

TEST(Split, LeaveOneOut) {
  std::vector<int> strata{0, 1, 0, 1, 0, 0, 1};
  auto folds = stratified_kfold(strata, 7, 1);
  for (const auto& f : folds) EXPECT_EQ(f.test.size(), 1u);
  EXPECT_THROW(stratified_kfold(strata, 8, 1), Error);
  EXPECT_THROW(stratified_kfold(strata, 1, 1), Error);
}

TEST(Split, TimestampSplit) {
  std::map<std::string, std::int64_t> created{{"a", 10}, {"b", 20}, {"c", 30}};
  TimestampLookup lookup = [&](const std::string& id) -> std::optional<std::int64_t> {
    auto it = created.find(id);
    if (it == created.end()) return std::nullopt;
    return it->second;
  };
  std::vector<std::pair<std::string, std::string>> pairs{{"a", "b"}, {"a", "c"}, {"b", "a"}};
  Fold f = timestamp_split(pairs, lookup, 25);
  EXPECT_EQ(f.train, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(f.test, (std::vector<std::size_t>{1}));

  Fold none = timestamp_split(pairs, lookup, 5);
  EXPECT_TRUE(none.train.empty());
  FeatureMatrix x;
  x.names = {"f"};
  EXPECT_THROW(train(x, std::vector<Label>{}, ClassifierKind::logistic_regression), Error);

  std::vector<std::pair<std::string, std::string>> missing{{"a", "x"}, {"y", "b"}};
  try {
    timestamp_split(missing, lookup, 25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
    EXPECT_NE(std::string(e.what()).find("x"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("y"), std::string::npos);
  }
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureMatrix x;
    x.names = {"a", "b", "c"};
    std::vector<double> targets, weights;
    for (int i = 0; i < 8; ++i) {
      std::vector<double> row{g(rng), g(rng), g(rng)};
      x.add_row(row);
      targets.push_back(rng() % 2);
      weights.push_back(u(rng));
    }
    std::vector<double> params{g(rng), g(rng), g(rng), g(rng)};
    auto grad = logistic_gradient(params, x, targets, weights, 0.1);
    for (std::size_t j = 0; j < params.size(); ++j) {
      const double h = 1e-6;
      auto plus = params, minus = params;
      plus[j] += h;
      minus[j] -= h;
      double fd = (logistic_loss(plus, x, targets, weights, 0.1) -
                   logistic_loss(minus, x, targets, weights, 0.1)) / (2 * h);
      EXPECT_NEAR(grad[j], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Classifier, SeparableDataBothKinds) {
  std::mt19937_64 rng(17);
  FeatureMatrix train_x, test_x;
  std::vector<Label> train_y, test_y;
  separable(rng, 150, train_x, train_y);
  separable(rng, 60, test_x, test_y);
  for (auto kind : {ClassifierKind::logistic_regression, ClassifierKind::naive_bayes}) {
    Classifier clf = train(train_x, train_y, kind);
    std::vector<Label> pred;
    for (std::size_t i = 0; i < test_x.rows; ++i) pred.push_back(clf.predict(test_x.row(i)));
    EXPECT_GE(link_f1(pred, test_y), 0.95) << to_string(kind);
  }
}

TEST(Classifier, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(19);
  FeatureMatrix x;
  std::vector<Label> y;
  separable(rng, 60, x, y);
  std::normal_distribution<double> g(0.0, 10.0);
  for (auto kind : {ClassifierKind::logistic_regression, ClassifierKind::naive_bayes}) {
    Classifier clf = train(x, y, kind);
    for (int i = 0; i < 500; ++i) {
      std::vector<double> f{g(rng), g(rng)};
      auto p = clf.predict_proba(f);
      EXPECT_GE(p[0], 0.0);
      EXPECT_GE(p[1], 0.0);
      EXPECT_NEAR(p[0] + p[1], 1.0, 1e-9);
    }
    std::vector<double> wrong{1.0};
    EXPECT_THROW(clf.predict(wrong), Error);
  }
}

TEST(Classifier, SingleClassRejected) {
  FeatureMatrix x;
  x.names = {"f"};
  std::vector<double> row{1.0};
  x.add_row(row);
  x.add_row(row);
  std::vector<Label> y(2, Label::link);
  try {
    train(x, y, ClassifierKind::naive_bayes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(Classifier, SaveLoadAndFeatureNames) {
  std::mt19937_64 rng(23);
  FeatureMatrix x;
  std::vector<Label> y;
  separable(rng, 40, x, y);
  testsupport::TempDir dir;
  for (auto kind : {ClassifierKind::logistic_regression, ClassifierKind::naive_bayes}) {
    Classifier clf = train(x, y, kind);
    clf.save(dir / "clf.json");
    Classifier back = Classifier::load(dir / "clf.json");
    for (std::size_t i = 0; i < x.rows; ++i)
      EXPECT_EQ(back.predict_proba(x.row(i)), clf.predict_proba(x.row(i)));
    EXPECT_NO_THROW(back.check_features({"f0", "f1"}));
    EXPECT_THROW(back.check_features({"f1", "f0"}), Error);
  }
}

TEST(CrossValidate, JobsIndependentAndBalancedTrainingOnly) {
  Dataset d = testsupport::planted_dataset(8, 9);
  PairFeatureConfig pf;
  pf.lda.iterations = 20;
  PairTable t = make_pairs(d, FeatureMode::similarity_features, pf);
  auto folds = split(t, {.kind = SplitKind::kfold, .k = 4, .seed = 2});
  TrainConfig cfg;
  cfg.epochs = 100;
  auto one = cross_validate(t, folds, ClassifierKind::logistic_regression, cfg,
                            BalanceStrategy::undersample, 1);
  auto four = cross_validate(t, folds, ClassifierKind::logistic_regression, cfg,
                             BalanceStrategy::undersample, 4);
  ASSERT_EQ(one.size(), 4u);
  std::size_t tested = 0;
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].test, four[i].test);
    EXPECT_EQ(one[i].predicted, four[i].predicted);
    EXPECT_EQ(one[i].f1, four[i].f1);
    // Test rows are the fold's own rows, unbalanced.
    EXPECT_EQ(one[i].test, folds[i].test);
    tested += one[i].test.size();
  }
  EXPECT_EQ(tested, t.size());
}
