// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "tracelab/error.hpp"
#include "tracelab/tlr.hpp"

using namespace tracelab;
using namespace tracelab::tlr;

namespace {

RecoveryConfig config(EngineKind engine, ir::Measure measure) {
  RecoveryConfig cfg;
  cfg.engine = engine;
  cfg.measure = measure;
  cfg.lda.topics = 5;
  cfg.lda.iterations = 60;
  cfg.lda.inference_iterations = 20;
  cfg.train.epochs = 150;
  return cfg;
}

std::vector<RecoveryConfig> all_engines() {
  return {config(EngineKind::vsm, ir::Measure::cosine),
          config(EngineKind::vsm, ir::Measure::jaccard),
          config(EngineKind::lsi, ir::Measure::cosine),
          config(EngineKind::lda, ir::Measure::hellinger),
          config(EngineKind::lda, ir::Measure::symmetric_kl),
          config(EngineKind::classifier, ir::Measure::cosine)};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(Recover, ThresholdZeroKeepsEveryPair) {
  Dataset d = testsupport::planted_dataset(6, 1);
  for (auto cfg : all_engines()) {
    cfg.threshold = 0.0;
    EXPECT_EQ(recover(d, cfg).size(), 36u) << to_string(cfg.engine);
  }
}

TEST(Recover, TopOnePerSource) {
  Dataset d = testsupport::planted_dataset(12, 2);
  auto cfg = config(EngineKind::vsm, ir::Measure::cosine);
  cfg.top_k = 1;
  TraceMatrix m = recover(d, cfg);
  EXPECT_EQ(m.size(), 12u);
  for (const auto& [key, link] : m) {
    EXPECT_EQ(link.provenance, Provenance::automatic);
    EXPECT_TRUE(link.score.has_value());
  }
}

TEST(Recover, ThresholdIsInclusive) {
  Dataset d;
  d.sources.add(testsupport::artifact("s1", "pump pressure sensor reading"));
  d.sources.add(testsupport::artifact("s2", "operator alarm panel"));
  d.targets.add(testsupport::artifact("t1", "pump pressure sensor reading"));
  d.targets.add(testsupport::artifact("t2", "pump alarm"));
  d.targets.add(testsupport::artifact("t3", "valve control loop"));
  auto cfg = config(EngineKind::vsm, ir::Measure::cosine);
  cfg.threshold = 1.0;
  TraceMatrix m = recover(d, cfg);
  EXPECT_EQ(m.pairs(), (std::set<TraceMatrix::Key>{{"s1", "t1"}}));
  EXPECT_EQ(*m.find("s1", "t1")->score, 1.0);
}

TEST(Recover, NeedsSelectionRule) {
  Dataset d = testsupport::planted_dataset(3, 1);
  auto cfg = config(EngineKind::vsm, ir::Measure::cosine);
  try {
    recover(d, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
    EXPECT_NE(std::string(e.what()).find("no selection rule"), std::string::npos);
  }
}

TEST(Recover, IncompatibleMeasures) {
  Dataset d = testsupport::planted_dataset(3, 1);
  auto vsm = config(EngineKind::vsm, ir::Measure::hellinger);
  vsm.top_k = 1;
  EXPECT_EQ(code_of([&] { recover(d, vsm); }), ErrorCode::incompatible);
  auto lda = config(EngineKind::lda, ir::Measure::jaccard);
  lda.top_k = 1;
  EXPECT_EQ(code_of([&] { recover(d, lda); }), ErrorCode::incompatible);
  auto bad = config(EngineKind::vsm, ir::Measure::cosine);
  bad.threshold = 1.5;
  EXPECT_EQ(code_of([&] { recover(d, bad); }), ErrorCode::invalid_argument);
}

TEST(Recover, PerSourceMode) {
  Dataset d = testsupport::planted_dataset(5, 3);
  auto cfg = config(EngineKind::vsm, ir::Measure::cosine);
  cfg.mode = RecoveryMode::per_source;
  cfg.source_id = "S002";
  cfg.top_k = 2;
  TraceMatrix m = recover(d, cfg);
  EXPECT_EQ(m.size(), 2u);
  for (const auto& [key, link] : m) EXPECT_EQ(key.first, "S002");
  EXPECT_TRUE(m.contains("S002", "T002"));
  cfg.source_id = "nope";
  EXPECT_EQ(code_of([&] { recover(d, cfg); }), ErrorCode::not_found);
}

TEST(Recover, ScoresMatchRankingAndThresholdIsAntiMonotone) {
  Dataset d = testsupport::planted_dataset(8, 4);
  for (auto cfg : all_engines()) {
    auto rankings = score(d, cfg);
    std::size_t previous = SIZE_MAX;
    for (double th : {0.0, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      cfg.threshold = th;
      TraceMatrix m = select_links(rankings, cfg);
      EXPECT_LE(m.size(), previous);
      previous = m.size();
      for (const auto& [key, link] : m) {
        EXPECT_GE(*link.score, th);
        for (const auto& r : rankings)
          if (r.source_id == key.first)
            for (const auto& t : r.ranked_targets)
              if (t.target_id == key.second) {
                EXPECT_EQ(t.score, *link.score);
              }
      }
    }
  }
}

TEST(Recover, DeterministicAcrossJobCounts) {
  Dataset d = testsupport::planted_dataset(10, 5);
  for (auto cfg : all_engines()) {
    cfg.threshold = 0.0;
    cfg.jobs = 1;
    TraceMatrix one = recover(d, cfg);
    cfg.jobs = 4;
    EXPECT_EQ(recover(d, cfg), one) << to_string(cfg.engine);
    EXPECT_EQ(recover(d, cfg), one);
  }
}

TEST(Recover, PlantedSignalRecoveredByEveryTextEngine) {
  Dataset d = testsupport::planted_dataset(30, 6);
  for (auto cfg : {config(EngineKind::vsm, ir::Measure::cosine),
                   config(EngineKind::lsi, ir::Measure::cosine)}) {
    if (cfg.engine == EngineKind::lsi) cfg.lsi_k = 30;
    cfg.top_k = 1;
    TraceMatrix m = recover(d, cfg);
    std::size_t hits = 0;
    for (const auto& [key, link] : m) hits += d.answers.contains(key.first, key.second) ? 1 : 0;
    EXPECT_GE(hits, 27u) << to_string(cfg.engine);
  }
}

TEST(Candidates, CsvOrderAndRoundTrip) {
  TraceMatrix m;
  m.insert(make_link("s2", "t1", Provenance::automatic, 0.3));
  m.insert(make_link("s1", "t2", Provenance::automatic, 0.1));
  m.insert(make_link("s1", "t1", Provenance::automatic, 0.7));
  m.insert(make_link("s1", "t3", Provenance::automatic, 0.7));
  std::ostringstream out;
  write_candidates_csv(out, m, EngineKind::vsm);
  EXPECT_EQ(out.str(),
            "source_id,target_id,score,engine\n"
            "s1,t1,0.7,vsm\ns1,t3,0.7,vsm\ns1,t2,0.1,vsm\ns2,t1,0.3,vsm\n");
  testsupport::TempDir dir;
  testsupport::write_file(dir / "c.csv", out.str());
  Predictions p = read_predictions(dir / "c.csv");
  EXPECT_EQ(p.links.pairs(), m.pairs());
  ASSERT_EQ(p.rankings.size(), 2u);
  EXPECT_EQ(p.rankings[0].ranked_targets[0].target_id, "t1");
  EXPECT_EQ(p.rankings[0].ranked_targets[2].target_id, "t2");
}

TEST(Candidates, ScoreFormatRoundTrips) {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 0.123456789012345678, 2.5e-5})
    EXPECT_EQ(std::stod(format_score(v)), v);
}
