// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "tracelab/corpus.hpp"
#include "tracelab/error.hpp"

using namespace tracelab;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LoadDataset, CsvPairFixture) {
  TempDir dir;
  write_file(dir / "sources.csv",
             "id,title,text,created_at,metadata_json\n"
             "s1,Login,User logs in,100,\n"
             "s2,Logout,\"User logs out, session ends\",,\"{\"\"kind\"\":\"\"req\"\"}\"\n");
  write_file(dir / "targets.csv",
             "id,title,text,created_at,metadata_json\nt1,,auth module,,\nt2,,session module,,\n");
  write_file(dir / "answers.csv", "source_id,target_id,type_label\ns1,t1,\ns2,t2,implements\n");
  Dataset d = load_dataset(dir.path(), DatasetFormat::csv_pair);
  EXPECT_EQ(d.sources.size(), 2u);
  EXPECT_EQ(d.targets.size(), 2u);
  ASSERT_EQ(d.answers.size(), 2u);
  EXPECT_TRUE(d.answers.contains("s1", "t1"));
  EXPECT_TRUE(d.answers.contains("s2", "t2"));
  EXPECT_EQ(d.answers.find("s2", "t2")->type_label, "implements");
  EXPECT_EQ(d.sources.find("s1")->created_at, 100);
  EXPECT_EQ(d.sources.find("s2")->text, "User logs out, session ends");
  EXPECT_EQ(d.sources.find("s2")->kind, "req");
  EXPECT_EQ(d.answers.find("s1", "t1")->provenance, Provenance::manual);
  EXPECT_TRUE(d.answers.find("s1", "t1")->is_protected);
}

TEST(LoadDataset, EmptyAnswers) {
  TempDir dir;
  write_file(dir / "sources" / "s1.txt", "alpha");
  write_file(dir / "targets" / "t1.txt", "beta");
  write_file(dir / "answers.txt", "");
  Dataset d = load_dataset(dir.path(), DatasetFormat::coest_dir);
  EXPECT_TRUE(d.answers.empty());
  EXPECT_EQ(d.sources.size(), 1u);
}

TEST(LoadDataset, CoestCommentsIgnored) {
  TempDir dir;
  write_file(dir / "sources" / "UC1.txt", "alpha");
  write_file(dir / "targets" / "CC1.txt", "beta");
  write_file(dir / "answers.txt", "# header\nUC1 CC1\n\n");
  Dataset d = load_dataset(dir.path(), DatasetFormat::coest_dir);
  EXPECT_EQ(d.answers.pairs(), (std::set<TraceMatrix::Key>{{"UC1", "CC1"}}));
}

TEST(LoadDataset, MissingFileNamed) {
  TempDir dir;
  write_file(dir / "sources" / "s1.txt", "alpha");
  write_file(dir / "targets" / "t1.txt", "beta");
  auto load = [&] { load_dataset(dir.path(), DatasetFormat::coest_dir); };
  EXPECT_EQ(code_of(load), ErrorCode::load);
  EXPECT_NE(message_of(load).find("answers.txt"), std::string::npos);
}

TEST(LoadDataset, UnknownIdsListed) {
  TempDir dir;
  write_file(dir / "sources" / "s1.txt", "alpha");
  write_file(dir / "targets" / "t1.txt", "beta");
  write_file(dir / "answers.txt", "s1 t9\ns7 t1\n");
  auto load = [&] { load_dataset(dir.path(), DatasetFormat::coest_dir); };
  EXPECT_EQ(code_of(load), ErrorCode::validation);
  std::string msg = message_of(load);
  EXPECT_NE(msg.find("t9"), std::string::npos);
  EXPECT_NE(msg.find("s7"), std::string::npos);
}

TEST(LoadDataset, RoundTripBothFormats) {
  Dataset d;
  for (int i = 0; i < 4; ++i) {
    Artifact s = testsupport::artifact("s" + std::to_string(i), "text, with \"quotes\"\nline " +
                                                                 std::to_string(i), "source");
    s.title = "Title " + std::to_string(i);
    s.created_at = 1000 + i;
    s.metadata["priority"] = "high";
    d.sources.add(s);
    d.targets.add(testsupport::artifact("t" + std::to_string(i), "target " + std::to_string(i),
                                        "target"));
  }
  d.answers.insert(make_link("s0", "t1", Provenance::manual));
  d.answers.insert(make_link("s2", "t3", Provenance::manual));

  TempDir dir;
  save_dataset(d, dir / "csv", DatasetFormat::csv_pair);
  Dataset csv = load_dataset(dir / "csv", DatasetFormat::csv_pair);
  EXPECT_EQ(csv, d);
  save_dataset(csv, dir / "csv2", DatasetFormat::csv_pair);
  EXPECT_EQ(load_dataset(dir / "csv2", DatasetFormat::csv_pair), d);

  // coest_dir keeps ids and text only, so compare after one trip.
  save_dataset(d, dir / "coest", DatasetFormat::coest_dir);
  Dataset once = load_dataset(dir / "coest", DatasetFormat::coest_dir);
  save_dataset(once, dir / "coest2", DatasetFormat::coest_dir);
  EXPECT_EQ(load_dataset(dir / "coest2", DatasetFormat::coest_dir), once);
  EXPECT_EQ(once.answers.pairs(), d.answers.pairs());
  EXPECT_EQ(once.sources.find("s1")->text, d.sources.find("s1")->text);
}

TEST(ArtifactSet, RejectsBadArtifacts) {
  ArtifactSet set("x");
  set.add(testsupport::artifact("a", "text"));
  EXPECT_EQ(code_of([&] { set.add(testsupport::artifact("a", "other")); }), ErrorCode::validation);
  EXPECT_EQ(code_of([&] { set.add(testsupport::artifact("", "other")); }), ErrorCode::validation);
  EXPECT_EQ(code_of([&] { set.add(testsupport::artifact("b", "")); }), ErrorCode::validation);
}

TEST(TraceMatrix, UniquePairsAndScoreRange) {
  TraceMatrix m;
  m.insert(make_link("s", "t", Provenance::automatic, 0.5));
  EXPECT_THROW(m.insert(make_link("s", "t", Provenance::automatic, 0.2)), Error);
  EXPECT_THROW(m.insert(make_link("s", "u", Provenance::automatic, 1.5)), Error);
  EXPECT_FALSE(m.find("s", "t")->is_protected);
  EXPECT_TRUE(make_link("a", "b", Provenance::manual).is_protected);
}

TEST(Vocabulary, SortedBijection) {
  ArtifactSet a("a"), b("b");
  a.add(testsupport::artifact("1", "b c"));
  b.add(testsupport::artifact("2", "a b"));
  Vocabulary v = build_vocabulary({&a, &b}, PreprocessConfig::raw());
  EXPECT_EQ(v.terms, (std::vector<std::string>{"a", "b", "c"}));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v.find(v.terms[i]), i);
  EXPECT_FALSE(v.find("zzz").has_value());

  ArtifactSet empty("e");
  EXPECT_EQ(build_vocabulary({&empty}, PreprocessConfig::defaults()).size(), 0u);
}

TEST(Vocabulary, CoversEveryToken) {
  Dataset d = testsupport::planted_dataset(10, 3);
  PreprocessConfig cfg = PreprocessConfig::defaults();
  Vocabulary v = build_vocabulary({&d.sources, &d.targets}, cfg);
  for (const auto* set : {&d.sources, &d.targets})
    for (const auto& a : *set)
      for (const auto& t : preprocess(a.content(), cfg)) EXPECT_TRUE(v.find(t)) << t;
}

TEST(MatrixCsv, RoundTrip) {
  TraceMatrix m;
  TraceLink a = make_link("s1", "t1", Provenance::manual);
  a.type_label = "implements";
  a.flags = {"dangling", "below_threshold"};
  a.history = {{0, "created"}, {1700000000, "note, with \"comma\""}};
  m.insert(a);
  m.insert(make_link("s2", "t1", Provenance::automatic, 0.125));
  TraceLink c = make_link("s3", "t4", Provenance::vetted_accept, 1.0);
  c.is_protected = true;
  m.insert(c);
  TempDir dir;
  save_matrix_csv(m, dir / "m.csv");
  EXPECT_EQ(load_matrix_csv(dir / "m.csv"), m);
}

TEST(MatrixCsv, MinimalColumns) {
  TempDir dir;
  write_file(dir / "m.csv", "source_id,target_id\ns,t\n");
  TraceMatrix m = load_matrix_csv(dir / "m.csv");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.find("s", "t")->provenance, Provenance::automatic);
}

TEST(Iso8601, RoundTrip) {
  EXPECT_EQ(iso8601_utc(0), "1970-01-01T00:00:00Z");
  EXPECT_EQ(parse_iso8601_utc("2021-03-04T05:06:07Z"), 1614834367);
  EXPECT_EQ(parse_iso8601_utc("2021-03-04 05:06:07"), 1614834367);
  for (std::int64_t t : {0LL, 1LL, 951782400LL, 1614834367LL, 4102444799LL})
    EXPECT_EQ(parse_iso8601_utc(iso8601_utc(t)), t);
  EXPECT_THROW(parse_iso8601_utc("yesterday"), Error);
}
