// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tracelab/error.hpp"
#include "tracelab/explain.hpp"

using namespace tracelab;
using namespace tracelab::explain;
using testsupport::artifact;

namespace {

const char* kHitspRequirement =
    "The system shall provide the ability to retrieve, display, store, and export a HITSP C/48 "
    "document.";

std::vector<GlossaryEntry> hitsp_glossary() {
  return {{"HITSP", std::string("Healthcare Information Technology Standards Panel"),
           "Standards body for health IT interoperability", GlossarySource::project_glossary},
          {"system", std::nullopt, "The software under discussion", GlossarySource::manual}};
}

// The three edges of the path shown for the HITSP example; the last edge
// names the entry rather than the bare word so the path is connected.
KnowledgeGraph hitsp_graph() {
  KnowledgeGraph g;
  g.add({"HITSP C/48", "contains", "Medical Summary Document", Relation::hierarchical});
  g.add({"Medical Summary Document", "contains", "Allergy Concern Entry", Relation::hierarchical});
  g.add({"Allergy Concern Entry", "is_a", "Risk", Relation::hierarchical});
  return g;
}

}  // namespace

TEST(Annotate, HitspAndBlacklist) {
  Artifact a = artifact("CCHIT-1", kHitspRequirement);
  auto glossary = hitsp_glossary();
  auto all = annotate_terms(a, glossary);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].term, "system");
  EXPECT_EQ(all[1].term, "HITSP");
  EXPECT_EQ(a.content().substr(all[1].begin, all[1].end - all[1].begin), "HITSP");
  EXPECT_NE(all[1].explanation.find("Healthcare Information Technology Standards Panel"),
            std::string::npos);

  auto filtered = annotate_terms(a, glossary, {"system"});
  ASSERT_EQ(filtered.size(), 1u);
  EXPECT_EQ(filtered[0].term, "HITSP");
  EXPECT_TRUE(annotate_terms(a, {}).empty());
}

TEST(Annotate, LongestFirstWordBoundedNoOverlap) {
  std::vector<GlossaryEntry> g{{"error", std::nullopt, "e", GlossarySource::manual},
                               {"error queue", std::nullopt, "eq", GlossarySource::manual},
                               {"queue", std::nullopt, "q", GlossarySource::manual},
                               {"err", std::nullopt, "short", GlossarySource::manual}};
  Artifact a = artifact("x", "Errors go to the Error Queue; the queue drains.");
  auto spans = annotate_terms(a, g);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].term, "error queue");
  EXPECT_EQ(spans[1].term, "queue");
  for (std::size_t i = 1; i < spans.size(); ++i) EXPECT_LE(spans[i - 1].end, spans[i].begin);
}

TEST(Triplets, Examples) {
  auto t = extract_triplets("Allergy is a Risk");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (Triplet{"allergy", "is_a", "risk", Relation::hierarchical}));

  t = extract_triplets("HITSP C/48 contains Medical Summary Document");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (Triplet{"hitsp c/48", "contains", "medical summary document",
                           Relation::hierarchical}));

  EXPECT_TRUE(extract_triplets("The pump runs quickly").empty());
  EXPECT_TRUE(extract_triplets("").empty());

  t = extract_triplets("A ward includes beds. Dosage equals the prescribed amount");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].subject, "ward");
  EXPECT_EQ(t[1].relation, Relation::equivalent);
}

TEST(Triplets, WhitespaceInvariant) {
  for (const char* text : {"Allergy is a Risk", "HITSP C/48 contains Medical Summary Document",
                           "A ward includes beds; dosage means amount"}) {
    auto base = extract_triplets(text);
    EXPECT_EQ(extract_triplets(std::string("  \n\t") + text + "   \n"), base);
  }
}

TEST(Graph, HitspPath) {
  KnowledgeGraph g = hitsp_graph();
  auto path = explain_relation(g, "HITSP C/48", "risk");
  ASSERT_TRUE(path);
  ASSERT_EQ(path->size(), 3u);
  EXPECT_EQ((*path)[0].verb, "contains");
  EXPECT_EQ((*path)[1].verb, "contains");
  EXPECT_EQ((*path)[2].verb, "is_a");
  EXPECT_EQ((*path)[0].subject, "hitsp c/48");
  EXPECT_EQ((*path)[2].object, "risk");

  // Reverse query keeps the stored orientation of each edge.
  auto back = explain_relation(g, "risk", "hitsp c/48");
  ASSERT_TRUE(back);
  EXPECT_EQ((*back)[0].verb, "is_a");
  EXPECT_EQ((*back)[0].subject, "allergy concern entry");

  auto same = explain_relation(g, "risk", "Risk");
  ASSERT_TRUE(same);
  EXPECT_TRUE(same->empty());
  g.add({"pump", "has", "valve", Relation::hierarchical});
  EXPECT_FALSE(explain_relation(g, "pump", "risk"));
  EXPECT_FALSE(explain_relation(g, "unknown", "risk"));
}

TEST(Graph, RejectsSelfLoopsAndDuplicates) {
  KnowledgeGraph g;
  EXPECT_TRUE(g.add({"A", "is_a", "B", Relation::hierarchical}));
  EXPECT_FALSE(g.add({" a ", "is_a", "b", Relation::hierarchical}));
  EXPECT_FALSE(g.add({"c", "is_a", "C", Relation::hierarchical}));
  EXPECT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.nodes(), (std::vector<std::string>{"a", "b"}));
}

TEST(Graph, ShortestPathIsMinimal) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = 2 + rng() % 7;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    KnowledgeGraph g;
    for (std::size_t e = 0; e < n + rng() % n; ++e) {
      std::size_t a = rng() % n, b = rng() % n;
      if (a == b) continue;
      bool equal = rng() % 2;
      if (g.add({"n" + std::to_string(a), equal ? "equals" : "contains", "n" + std::to_string(b),
                 equal ? Relation::equivalent : Relation::hierarchical}))
        edges.push_back({a, b});
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        auto want = testsupport::oracle::shortest_path_length(n, edges, a, b);
        std::string na = "n" + std::to_string(a), nb = "n" + std::to_string(b);
        if (!g.contains(na) || !g.contains(nb)) continue;
        auto got = g.shortest_path(na, nb);
        ASSERT_EQ(got.has_value(), want.has_value());
        if (!got) continue;
        EXPECT_EQ(got->size(), *want);
        // Consecutive edges share a node, starting at a and ending at b.
        std::string at = na;
        for (const auto& t : *got) {
          ASSERT_TRUE(t.subject == at || t.object == at);
          at = t.subject == at ? t.object : t.subject;
        }
        EXPECT_EQ(at, nb);
      }
  }
}

TEST(Rationale, MonitorDetectingOcclusion) {
  KnowledgeGraph g;
  g.add({"upstream occlusion", "is_a", "occlusion", Relation::hierarchical});
  ActionFrame a{"monitor", "detect", "upstream occlusion"};
  ActionFrame b{"monitor", "detect", "occlusion"};
  EXPECT_EQ(render_rationale(a, b, g), "Both artifacts involve monitor detecting occlusion");
  EXPECT_EQ(render_rationale(a, a, g), "Both artifacts involve monitor detecting upstream occlusion");
  EXPECT_EQ(g.more_general("pump", "valve"), "pump/valve");
  EXPECT_THROW(render_rationale({"monitor", "", "x"}, b, g), Error);
}

TEST(Rationale, IngForm) {
  EXPECT_EQ(ing_form("store"), "storing");
  EXPECT_EQ(ing_form("detect"), "detecting");
  EXPECT_EQ(ing_form("see"), "seeing");
}

TEST(Rationale, GeneralityFollowsEdgeDirection) {
  KnowledgeGraph g;
  g.add({"record", "contains", "allergy list", Relation::hierarchical});
  g.add({"allergy list", "equals", "allergy register", Relation::equivalent});
  EXPECT_EQ(g.more_general("allergy list", "record"), "record");
  EXPECT_EQ(g.more_general("record", "allergy register"), "record");
}

TEST(Prompt, DpuExampleByteExact) {
  Artifact src = artifact(
      "SRS5.12.3.5",
      "The DPU-TMALI shall utilize SCM-DCI-SR, along with ERRNO provided by DPU-DCI to decode "
      "errors and place them on an error queue for DPU-CCM.");
  Artifact tgt = artifact(
      "ccm_err",
      "Error Collection and Reporting: At boot time, no error queue exists because it has yet to "
      "be created.  Errors that occur in this early stage of error reporting are assigned directly "
      "to the global task variable errno.  If errno is set after the error queues are created, it "
      "is queued to the Error Queue by calling ccmErrEnq().");
  const std::string expected =
      "Below are artifacts from the same software system. Is there a traceability link between "
      "(1) and (2)?\n"
      "\n"
      "(1) The DPU-TMALI shall utilize SCM-DCI-SR, along with ERRNO provided by DPU-DCI to decode "
      "errors and place them on an error queue for DPU-CCM.\n"
      "\n"
      "(2) Error Collection and Reporting: At boot time, no error queue exists because it has yet "
      "to be created.  Errors that occur in this early stage of error reporting are assigned "
      "directly to the global task variable errno.  If errno is set after the error queues are "
      "created, it is queued to the Error Queue by calling ccmErrEnq().\n";
  EXPECT_EQ(render_llm_prompt(src, tgt), expected);
}

TEST(Prompt, StructureHolds) {
  Artifact empty_a = artifact("a", "");
  empty_a.title = "";
  Artifact x = artifact("x", "line one\n(2) looks like a marker\nline three");
  Artifact y = artifact("y", "plain");
  for (const auto& [s, t] : {std::pair{x, y}, std::pair{y, x}}) {
    std::string p = render_llm_prompt(s, t);
    int ones = 0, twos = 0;
    std::size_t pos = 0;
    while (pos < p.size()) {
      std::size_t eol = p.find('\n', pos);
      std::string line = p.substr(pos, eol - pos);
      ones += line.rfind("(1)", 0) == 0 ? 1 : 0;
      twos += line.rfind("(2)", 0) == 0 ? 1 : 0;
      pos = eol == std::string::npos ? p.size() : eol + 1;
    }
    EXPECT_EQ(ones, 1);
    EXPECT_EQ(twos, 1);
  }
  EXPECT_NE(render_llm_prompt(empty_a, empty_a).find("\n\n(1) \n\n(2) \n"), std::string::npos);
}

TEST(ExplainLink, CombinesResources) {
  Resources r;
  r.glossary = hitsp_glossary();
  r.blacklist = {"system"};
  r.graph = hitsp_graph();
  r.frames["a"] = {"system", "store", "HITSP C/48 document"};
  r.frames["b"] = {"system", "store", "risk"};
  Artifact a = artifact("a", kHitspRequirement);
  Artifact b = artifact("b",
                        "The system shall have the capability to capture and store risk, social, "
                        "and medical factors for each new patient. CCHIT applies.");
  auto e = explain_link(a, b, r, "healthcare");
  ASSERT_EQ(e.source_terms.size(), 1u);
  ASSERT_TRUE(e.path);
  EXPECT_EQ(e.path->size(), 3u);
  EXPECT_EQ(e.source_concept, "hitsp c/48");
  EXPECT_EQ(e.target_concept, "risk");
  ASSERT_TRUE(e.rationale);
  EXPECT_EQ(e.rationale->rfind("Both artifacts involve system storing ", 0), 0u);
  EXPECT_EQ(e.research_queries, (std::vector<std::string>{"what is inbody:CCHIT in healthcare"}));
  EXPECT_EQ(e.prompt, render_llm_prompt(a, b));
}

TEST(Loaders, FilesParse) {
  testsupport::TempDir dir;
  testsupport::write_file(dir / "g.csv",
                          "term,expansion,definition,source\n"
                          "HITSP,Healthcare Information Technology Standards Panel,Standards body,"
                          "project_glossary\n");
  testsupport::write_file(dir / "t.csv",
                          "subject,verb,object\nHITSP C/48,contains,Medical Summary Document\n");
  testsupport::write_file(dir / "bad.csv", "subject,verb,object\na,likes,b\n");
  testsupport::write_file(dir / "f.csv", "artifact_id,agent,action,theme\nx,monitor,detect,occlusion\n");
  testsupport::write_file(dir / "b.txt", "# general words\nsystem\n\nDisplay\n");
  auto g = load_glossary(dir / "g.csv");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].expansion, "Healthcare Information Technology Standards Panel");
  auto t = load_triplets(dir / "t.csv");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].verb, "contains");
  EXPECT_THROW(load_triplets(dir / "bad.csv"), Error);
  EXPECT_EQ(load_frames(dir / "f.csv").at("x"), (ActionFrame{"monitor", "detect", "occlusion"}));
  auto bl = load_blacklist(dir / "b.txt");
  EXPECT_TRUE(bl.count("system"));
  EXPECT_EQ(bl.size(), 2u);
}
