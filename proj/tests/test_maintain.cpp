// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tracelab/error.hpp"
#include "tracelab/maintain.hpp"

using namespace tracelab;
using namespace tracelab::maintain;
using testsupport::artifact;

namespace {

MaintenanceConfig config(double threshold) {
  MaintenanceConfig cfg;
  cfg.threshold = threshold;
  cfg.now = 1700000000;
  return cfg;
}

Dataset small_dataset() {
  Dataset d;
  d.sources.add(artifact("s1", "pump pressure sensor", "requirement"));
  d.sources.add(artifact("s2", "pressure alarm display", "requirement"));
  d.sources.add(artifact("s3", "operator manual override", "requirement"));
  d.targets.add(artifact("t", "pressure sensor driver", "design"));
  d.targets.add(artifact("u", "alarm panel renderer", "design"));
  return d;
}

std::size_t count_scenario(const std::vector<Justification>& log, Scenario s) {
  return static_cast<std::size_t>(
      std::count_if(log.begin(), log.end(), [&](const Justification& j) { return j.scenario == s; }));
}

}  // namespace

TEST(DetectChanges, Fixtures) {
  Dataset old = small_dataset();
  EXPECT_TRUE(detect_changes(old, old).empty());

  Dataset removed;
  for (const auto& a : old.sources) removed.sources.add(a);
  removed.targets.add(*old.targets.find("u"));
  auto events = detect_changes(old, removed);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, ChangeKind::removed);
  EXPECT_EQ(events[0].artifact_id, "t");
  EXPECT_EQ(events[0].side, Side::target);

  Dataset edited;
  for (const auto& a : old.sources) {
    Artifact b = a;
    if (b.id == "s2") b.text += " flashing";
    edited.sources.add(b);
  }
  for (const auto& a : old.targets) edited.targets.add(a);
  events = detect_changes(old, edited);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, ChangeKind::modified);
  EXPECT_EQ(events[0].artifact_id, "s2");
  ASSERT_TRUE(events[0].old_text_hash && events[0].new_text_hash);
  EXPECT_NE(*events[0].old_text_hash, *events[0].new_text_hash);
}

TEST(ApplyMaintenance, DeletedTargetKeepsManualLink) {
  Dataset old = small_dataset();
  TraceMatrix m;
  m.insert(make_link("s1", "t", Provenance::automatic, 0.8));
  m.insert(make_link("s2", "t", Provenance::automatic, 0.4));
  m.insert(make_link("s3", "t", Provenance::manual));
  m.insert(make_link("s2", "u", Provenance::automatic, 0.5));

  Dataset now;
  for (const auto& a : old.sources) now.sources.add(a);
  now.targets.add(*old.targets.find("u"));
  auto events = detect_changes(old, now);
  auto r = apply_maintenance(m, events, now, config(0.3));

  EXPECT_FALSE(r.matrix.contains("s1", "t"));
  EXPECT_FALSE(r.matrix.contains("s2", "t"));
  ASSERT_TRUE(r.matrix.contains("s3", "t"));
  const TraceLink* manual = r.matrix.find("s3", "t");
  EXPECT_TRUE(manual->flags.count("dangling"));
  EXPECT_EQ(manual->history.size(), 1u);
  EXPECT_TRUE(r.matrix.contains("s2", "u"));
  EXPECT_EQ(r.matrix.size(), 2u);
  EXPECT_EQ(count_scenario(r.log, Scenario::artifact_removed), 3u);
  for (const auto& j : r.log) EXPECT_EQ(j.timestamp, 1700000000);
}

TEST(ApplyMaintenance, NoEventsNoChange) {
  Dataset d = small_dataset();
  TraceMatrix m;
  m.insert(make_link("s1", "t", Provenance::automatic, 0.8));
  m.insert(make_link("s3", "u", Provenance::manual));
  auto r = apply_maintenance(m, {}, d, config(0.3));
  EXPECT_EQ(r.matrix, m);
  EXPECT_TRUE(r.log.empty());
  auto before = consistency(m, d, Tim::permissive());
  auto after = consistency(r.matrix, d, Tim::permissive());
  EXPECT_EQ(before.combined, after.combined);
}

TEST(ApplyMaintenance, PlantedNewLink) {
  Dataset old = testsupport::planted_dataset(6, 4);
  TraceMatrix m;
  for (const auto& [key, link] : old.answers)
    m.insert(make_link(key.first, key.second, Provenance::automatic, 0.9));

  Dataset now;
  for (const auto& a : old.sources) {
    Artifact b = a;
    if (b.id == "S001") b.text = "zqfreshx checksum zqfreshx";
    now.sources.add(b);
  }
  for (const auto& a : old.targets) now.targets.add(a);
  now.targets.add(artifact("T900", "zqfreshx checksum routine", "design"));

  auto events = detect_changes(old, now);
  ASSERT_EQ(events.size(), 2u);
  auto r = apply_maintenance(m, events, now, config(0.5));
  EXPECT_EQ(count_scenario(r.log, Scenario::new_functionality_added), 1u);
  ASSERT_TRUE(r.matrix.contains("S001", "T900"));
  const TraceLink* link = r.matrix.find("S001", "T900");
  EXPECT_EQ(link->provenance, Provenance::automatic);
  EXPECT_GE(*link->score, 0.5);
  // The old partner lost its shared token: flagged, not removed.
  ASSERT_TRUE(r.matrix.contains("S001", "T001"));
  EXPECT_TRUE(r.matrix.find("S001", "T001")->flags.count("below_threshold"));
}

TEST(ApplyMaintenance, RenameRetargetsInPlace) {
  Dataset old = small_dataset();
  TraceMatrix m;
  m.insert(make_link("s1", "t", Provenance::automatic, 0.8));
  const std::string id = m.find("s1", "t")->id;
  Dataset now;
  for (const auto& a : old.sources) now.sources.add(a);
  Artifact moved = *old.targets.find("t");
  moved.id = "t-renamed";
  now.targets.add(moved);
  now.targets.add(*old.targets.find("u"));
  auto r = apply_maintenance(m, detect_changes(old, now), now, config(0.99));
  ASSERT_TRUE(r.matrix.contains("s1", "t-renamed"));
  EXPECT_EQ(r.matrix.find("s1", "t-renamed")->id, id);
  EXPECT_EQ(count_scenario(r.log, Scenario::link_retarget), 1u);
  EXPECT_FALSE(r.matrix.find("s1", "t-renamed")->history.empty());
}

TEST(ApplyMaintenance, Errors) {
  Dataset d = small_dataset();
  MaintenanceConfig none;
  try {
    apply_maintenance({}, {}, d, none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
  std::vector<ChangeEvent> bogus{{ChangeKind::modified, "ghost", Side::source, "a", "b"}};
  try {
    apply_maintenance({}, bogus, d, config(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
  }
}

TEST(ApplyMaintenance, RandomSequencesProtectManualLinks) {
  std::mt19937_64 rng(2024);
  const char* words[] = {"pump", "valve", "sensor", "alarm", "display", "flow", "pressure",
                         "operator", "log", "timer"};
  auto text = [&] {
    std::string t;
    for (int i = 0; i < 4; ++i) t += std::string(words[rng() % 10]) + " ";
    return t;
  };
  MaintenanceConfig cfg = config(0.0);
  int runs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    cfg.threshold = (rng() % 10) / 10.0;
    Dataset old;
    for (int i = 0; i < 4; ++i) old.sources.add(artifact("s" + std::to_string(i), text()));
    for (int i = 0; i < 4; ++i) old.targets.add(artifact("t" + std::to_string(i), text()));
    TraceMatrix m;
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t) {
        auto roll = rng() % 4;
        if (roll == 0) m.insert(make_link("s" + std::to_string(s), "t" + std::to_string(t), Provenance::manual));
        if (roll == 1)
          m.insert(make_link("s" + std::to_string(s), "t" + std::to_string(t), Provenance::automatic,
                             (rng() % 100) / 100.0));
      }

    Dataset now;
    int fresh = 0;
    for (auto* side : {&old.sources, &old.targets}) {
      ArtifactSet& out = side == &old.sources ? now.sources : now.targets;
      for (const auto& a : *side) {
        switch (rng() % 5) {
          case 0: break;  // removed
          case 1: {
            Artifact b = a;
            b.text = text();
            out.add(b);
            break;
          }
          case 2: {  // renamed
            Artifact b = a;
            b.id = a.id + "-r";
            out.add(b);
            break;
          }
          default: out.add(a);
        }
      }
      if (rng() % 2) out.add(artifact("new" + std::to_string(fresh++), text()));
    }
    if (now.sources.empty()) now.sources.add(artifact("keep-s", text()));
    if (now.targets.empty()) now.targets.add(artifact("keep-t", text()));

    auto events = detect_changes(old, now);
    auto r = apply_maintenance(m, events, now, cfg);
    for (const auto& [key, link] : m) {
      if (link.is_protected) {
        const TraceLink* kept = r.matrix.find(key.first, key.second);
        ASSERT_NE(kept, nullptr) << "trial " << trial;
        EXPECT_EQ(kept->id, link.id);
      }
      if (const TraceLink* same = r.matrix.find_by_id(link.id)) {
        EXPECT_GE(same->history.size(), link.history.size());
      }
    }
    auto twice = apply_maintenance(r.matrix, events, now, cfg);
    EXPECT_EQ(twice.matrix, r.matrix) << "trial " << trial;
    ++runs;
  }
  EXPECT_EQ(runs, 1000);
}

TEST(Consistency, Boundaries) {
  Dataset d = small_dataset();
  auto empty = consistency({}, d, Tim::permissive());
  EXPECT_EQ(empty.validity, 1.0);
  EXPECT_EQ(empty.completeness, 0.0);
  EXPECT_FALSE(empty.correctness.has_value());
  EXPECT_DOUBLE_EQ(empty.combined, 0.5);

  Dataset four;
  four.sources.add(artifact("a", "x"));
  four.sources.add(artifact("b", "x"));
  four.targets.add(artifact("c", "x"));
  four.targets.add(artifact("d", "x"));
  TraceMatrix one;
  one.insert(make_link("a", "c", Provenance::manual));
  EXPECT_DOUBLE_EQ(consistency(one, four, Tim::permissive()).completeness, 0.5);

  TraceMatrix full;
  full.insert(make_link("a", "c", Provenance::manual));
  full.insert(make_link("b", "d", Provenance::manual));
  VettedPairs vetted{{{"a", "c"}, true}, {{"b", "d"}, true}};
  auto best = consistency(full, four, Tim::permissive(), &vetted);
  EXPECT_EQ(best.combined, 1.0);
  EXPECT_EQ(best.correctness, 1.0);

  VettedPairs half{{{"a", "c"}, true}, {{"b", "d"}, false}};
  EXPECT_DOUBLE_EQ(*consistency(full, four, Tim::permissive(), &half).correctness, 0.5);
  EXPECT_THROW(consistency(full, four, Tim::permissive(), nullptr, {-1, 1, 1}), Error);
}

TEST(Consistency, TimValidity) {
  Dataset d = small_dataset();
  Tim tim;
  tim.rules.push_back({"requirement", "design", {"implements"}});
  TraceMatrix m;
  TraceLink good = make_link("s1", "t", Provenance::manual);
  good.type_label = "implements";
  TraceLink bad = make_link("s2", "u", Provenance::manual);
  bad.type_label = "tests";
  m.insert(good);
  m.insert(bad);
  EXPECT_DOUBLE_EQ(consistency(m, d, tim).validity, 0.5);
  EXPECT_TRUE(tim.allows("requirement", "design", std::string("implements")));
  EXPECT_FALSE(tim.allows("design", "requirement", std::string("implements")));

  testsupport::TempDir dir;
  testsupport::write_file(dir / "tim.csv",
                          "source_kind,target_kind,labels\nrequirement,*,implements|refines\n");
  Tim loaded = Tim::load(dir / "tim.csv");
  EXPECT_TRUE(loaded.allows("requirement", "anything", std::string("refines")));
  EXPECT_FALSE(loaded.allows("requirement", "anything", std::string("tests")));
  testsupport::write_file(dir / "empty.csv", "source_kind,target_kind,labels\n");
  EXPECT_THROW(Tim::load(dir / "empty.csv"), Error);
}

TEST(Log, AppendsTabSeparatedLines) {
  testsupport::TempDir dir;
  std::vector<Justification> entries{
      {0, "L1", Scenario::artifact_removed, "gone"},
      {1614834367, "L2", Scenario::new_functionality_added, "new"}};
  append_log(dir / "j.log", entries);
  append_log(dir / "j.log", std::span(entries).subspan(0, 1));
  EXPECT_EQ(testsupport::read_file(dir / "j.log"),
            "1970-01-01T00:00:00Z\tL1\tartifact_removed\tgone\n"
            "2021-03-04T05:06:07Z\tL2\tnew_functionality_added\tnew\n"
            "1970-01-01T00:00:00Z\tL1\tartifact_removed\tgone\n");
}
