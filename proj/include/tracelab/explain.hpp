// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tracelab/corpus.hpp"

namespace tracelab::explain {

enum class GlossarySource { project_glossary, domain_corpus, manual };

const char* to_string(GlossarySource s);
GlossarySource glossary_source_from_string(std::string_view s);

struct GlossaryEntry {
  std::string term;
  std::optional<std::string> expansion;
  std::string definition;
  GlossarySource source = GlossarySource::project_glossary;
};

struct Annotation {
  std::size_t begin = 0;  // byte offsets into Artifact::content()
  std::size_t end = 0;
  std::string term;  // glossary term that matched
  std::string explanation;

  bool operator==(const Annotation&) const = default;
};

/// Case-insensitive, word-bounded, longest term first; spans never overlap.
/// Blacklisted terms (case-insensitive) are skipped. Sorted by position.
std::vector<Annotation> annotate_terms(const Artifact& artifact,
                                       std::span<const GlossaryEntry> glossary,
                                       const std::set<std::string>& blacklist = {});

enum class Relation { hierarchical, equivalent };

const char* to_string(Relation r);

struct Triplet {
  std::string subject;
  std::string verb;  // is_a, contains, includes, has, equals, is, means
  std::string object;
  Relation relation = Relation::hierarchical;

  bool operator==(const Triplet&) const = default;
};

/// Maps a surface verb ("is a", "contain", "Equals", ...) to its canonical
/// form and relation; nullopt when the verb is not a relation verb.
std::optional<std::pair<std::string, Relation>> relation_verb(std::string_view verb);

/// Lowercase, trimmed, inner whitespace collapsed.
std::string normalize_concept(std::string_view s);

/// Pattern-based "X <verb> Y" extraction, one triplet per clause at most.
/// Leading determiners are dropped and concepts normalized.
std::vector<Triplet> extract_triplets(std::string_view text);

class KnowledgeGraph {
 public:
  /// Normalizes both concepts; self-loops and exact duplicates are ignored.
  /// Returns whether an edge was added.
  bool add(Triplet t);

  bool contains(std::string_view concept_name) const;
  const std::vector<Triplet>& edges() const { return edges_; }
  std::size_t node_count() const { return adjacency_.size(); }
  /// Sorted concept names.
  std::vector<std::string> nodes() const;

  /// Breadth-first shortest path, every edge traversable both ways; triplets
  /// keep their stored orientation. Empty for a == b; nullopt when either
  /// concept is unknown or no path exists.
  std::optional<std::vector<Triplet>> shortest_path(std::string_view a,
                                                    std::string_view b) const;

  /// The more general of two concepts: is_a points to the more general
  /// object, contains/includes/has to the more general subject, equivalence
  /// edges are followed both ways. "a/b" when neither generalizes the other.
  std::string more_general(std::string_view a, std::string_view b) const;

 private:
  std::vector<Triplet> edges_;
  std::map<std::string, std::vector<std::size_t>> adjacency_;  // node -> edge ids
};

std::optional<std::vector<Triplet>> explain_relation(const KnowledgeGraph& graph,
                                                     std::string_view concept_a,
                                                     std::string_view concept_b);

struct ActionFrame {
  std::string agent;
  std::string action;
  std::string theme;

  bool operator==(const ActionFrame&) const = default;
};

/// Naive "+ing": a final 'e' is dropped unless the word ends in "ee".
std::string ing_form(std::string_view verb);

/// "Both artifacts involve " + G(agents) + " " + ing(action of a) + " " +
/// G(themes). Throws Error(invalid_argument) on an incomplete frame.
std::string render_rationale(const ActionFrame& a, const ActionFrame& b,
                             const KnowledgeGraph& graph);

/// Best-effort frame for "<agent> shall <verb> <theme>" sentences: the agent
/// precedes the first modal, the action is the first content word after it,
/// the theme runs to the next conjunction or punctuation. Not role labeling.
std::optional<ActionFrame> naive_action_frame(std::string_view text);

/// Prompt asking whether two artifacts are linked. Newlines inside artifact
/// content are replaced by spaces so each marker starts exactly one line.
std::string render_llm_prompt(const Artifact& source, const Artifact& target);

/// Search-engine query suggested for manual research of an unknown concept.
std::string research_query(std::string_view concept_name, std::string_view domain);

/// Everything a link explanation can draw on; any part may be empty.
struct Resources {
  std::vector<GlossaryEntry> glossary;
  std::set<std::string> blacklist;
  KnowledgeGraph graph;
  std::map<std::string, ActionFrame> frames;  // by artifact id
  bool naive_frames = false;  // fall back to naive_action_frame
};

struct LinkExplanation {
  std::vector<Annotation> source_terms;
  std::vector<Annotation> target_terms;
  /// Shortest path between a graph concept mentioned in the source and one
  /// mentioned in the target; the shortest over all such pairs, ties broken
  /// by concept names.
  std::optional<std::vector<Triplet>> path;
  std::string source_concept;
  std::string target_concept;
  std::optional<std::string> rationale;
  std::string prompt;
  /// Queries for all-caps tokens that no glossary term covers.
  std::vector<std::string> research_queries;
};

LinkExplanation explain_link(const Artifact& source, const Artifact& target,
                             const Resources& resources, std::string_view domain);

std::vector<GlossaryEntry> load_glossary(const std::filesystem::path& path);
/// CSV subject,verb,object.
std::vector<Triplet> load_triplets(const std::filesystem::path& path);
/// CSV artifact_id,agent,action,theme.
std::map<std::string, ActionFrame> load_frames(const std::filesystem::path& path);
/// One term per line; '#' starts a comment.
std::set<std::string> load_blacklist(const std::filesystem::path& path);

}  // namespace tracelab::explain
