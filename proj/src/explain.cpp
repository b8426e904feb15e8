// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/explain.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "tracelab/csv.hpp"
#include "tracelab/error.hpp"
#include "tracelab/text.hpp"

namespace tracelab::explain {

const char* to_string(GlossarySource s) {
  switch (s) {
    case GlossarySource::project_glossary: return "project_glossary";
    case GlossarySource::domain_corpus: return "domain_corpus";
    case GlossarySource::manual: return "manual";
  }
  return "project_glossary";
}

GlossarySource glossary_source_from_string(std::string_view s) {
  if (s.empty() || s == "project_glossary") return GlossarySource::project_glossary;
  if (s == "domain_corpus") return GlossarySource::domain_corpus;
  if (s == "manual") return GlossarySource::manual;
  throw Error(ErrorCode::invalid_argument, "unknown glossary source '" + std::string(s) + "'");
}

const char* to_string(Relation r) {
  return r == Relation::hierarchical ? "hierarchical" : "equivalent";
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || static_cast<unsigned char>(c) >= 0x80;
}

const std::set<std::string>& determiners() {
  static const std::set<std::string> d{"the", "a", "an", "this", "that", "these",
                                       "those", "each", "every", "all", "some", "any"};
  return d;
}

const std::set<std::string>& modals() {
  static const std::set<std::string> m{"shall", "will", "must", "should", "can",
                                       "may", "could", "would", "not"};
  return m;
}

std::vector<std::string> words(std::string_view clause) {
  std::vector<std::string> out;
  std::istringstream in{std::string(clause)};
  std::string w;
  while (in >> w) {
    std::size_t b = 0, e = w.size();
    while (b < e && std::string_view("\"'()[]{}").find(w[b]) != std::string_view::npos) ++b;
    while (e > b && std::string_view("\"'()[]{}").find(w[e - 1]) != std::string_view::npos) --e;
    if (e > b) out.push_back(to_lower(w.substr(b, e - b)));
  }
  return out;
}

std::vector<std::string> clauses(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool cut = c == ';' || c == ',' || c == '!' || c == '?' || c == '\n' || c == ':';
    if (c == '.' && (i + 1 == text.size() ||
                     std::isspace(static_cast<unsigned char>(text[i + 1])) != 0))
      cut = true;
    if (cut) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

// Joins words[b, e) after dropping leading determiners; empty if the run
// contains a modal.
std::string phrase(const std::vector<std::string>& w, std::size_t b, std::size_t e) {
  while (b < e && determiners().count(w[b]) > 0) ++b;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (modals().count(w[i]) > 0) return {};
    if (!out.empty()) out += ' ';
    out += w[i];
  }
  return out;
}

}  // namespace

std::string normalize_concept(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::optional<std::pair<std::string, Relation>> relation_verb(std::string_view verb) {
  std::string v = normalize_concept(verb);
  std::replace(v.begin(), v.end(), '_', ' ');
  if (v == "is a" || v == "is an" || v == "are a" || v == "are an")
    return std::pair{std::string("is_a"), Relation::hierarchical};
  if (v == "contains" || v == "contain") return std::pair{std::string("contains"), Relation::hierarchical};
  if (v == "includes" || v == "include") return std::pair{std::string("includes"), Relation::hierarchical};
  if (v == "has" || v == "have") return std::pair{std::string("has"), Relation::hierarchical};
  if (v == "equals" || v == "equal") return std::pair{std::string("equals"), Relation::equivalent};
  if (v == "is" || v == "are") return std::pair{std::string("is"), Relation::equivalent};
  if (v == "means" || v == "mean") return std::pair{std::string("means"), Relation::equivalent};
  return std::nullopt;
}

std::vector<Annotation> annotate_terms(const Artifact& artifact,
                                       std::span<const GlossaryEntry> glossary,
                                       const std::set<std::string>& blacklist) {
  const std::string content = artifact.content();
  const std::string lower = to_lower(content);
  std::set<std::string> banned;
  for (const auto& b : blacklist) banned.insert(normalize_concept(b));

  std::vector<const GlossaryEntry*> terms;
  for (const auto& g : glossary)
    if (!g.term.empty() && banned.count(normalize_concept(g.term)) == 0) terms.push_back(&g);
  std::stable_sort(terms.begin(), terms.end(), [](const GlossaryEntry* a, const GlossaryEntry* b) {
    if (a->term.size() != b->term.size()) return a->term.size() > b->term.size();
    return to_lower(a->term) < to_lower(b->term);
  });

  std::vector<bool> taken(content.size(), false);
  std::vector<Annotation> out;
  for (const GlossaryEntry* g : terms) {
    const std::string needle = to_lower(g->term);
    for (std::size_t pos = lower.find(needle); pos != std::string::npos;
         pos = lower.find(needle, pos + 1)) {
      const std::size_t end = pos + needle.size();
      if (pos > 0 && is_word_char(lower[pos - 1]) && is_word_char(needle.front())) continue;
      if (end < lower.size() && is_word_char(lower[end]) && is_word_char(needle.back())) continue;
      if (std::any_of(taken.begin() + pos, taken.begin() + end, [](bool t) { return t; }))
        continue;
      std::fill(taken.begin() + pos, taken.begin() + end, true);
      std::string expl = g->definition;
      if (g->expansion && !g->expansion->empty())
        expl = expl.empty() ? *g->expansion : *g->expansion + ": " + expl;
      out.push_back({pos, end, g->term, std::move(expl)});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Annotation& a, const Annotation& b) { return a.begin < b.begin; });
  return out;
}

std::vector<Triplet> extract_triplets(std::string_view text) {
  std::vector<Triplet> out;
  for (const auto& clause : clauses(text)) {
    const auto w = words(clause);
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
      std::optional<std::pair<std::string, Relation>> rel;
      std::size_t obj = i + 1;
      if ((w[i] == "is" || w[i] == "are") && (w[i + 1] == "a" || w[i + 1] == "an")) {
        rel = relation_verb("is a");
        obj = i + 2;
      } else {
        rel = relation_verb(w[i]);
      }
      if (!rel || obj >= w.size()) continue;
      std::string subject = phrase(w, 0, i);
      std::string object = phrase(w, obj, w.size());
      if (subject.empty() || object.empty()) continue;
      out.push_back({std::move(subject), rel->first, std::move(object), rel->second});
      break;
    }
  }
  return out;
}

bool KnowledgeGraph::add(Triplet t) {
  t.subject = normalize_concept(t.subject);
  t.object = normalize_concept(t.object);
  if (t.subject.empty() || t.object.empty() || t.subject == t.object) return false;
  if (std::find(edges_.begin(), edges_.end(), t) != edges_.end()) return false;
  const std::size_t id = edges_.size();
  adjacency_[t.subject].push_back(id);
  adjacency_[t.object].push_back(id);
  edges_.push_back(std::move(t));
  return true;
}

std::vector<std::string> KnowledgeGraph::nodes() const {
  std::vector<std::string> out;
  for (const auto& [node, edges] : adjacency_) out.push_back(node);
  return out;
}

bool KnowledgeGraph::contains(std::string_view concept_name) const {
  return adjacency_.count(normalize_concept(concept_name)) > 0;
}

std::optional<std::vector<Triplet>> KnowledgeGraph::shortest_path(std::string_view a,
                                                                  std::string_view b) const {
  const std::string from = normalize_concept(a), to = normalize_concept(b);
  if (adjacency_.count(from) == 0 || adjacency_.count(to) == 0) return std::nullopt;
  if (from == to) return std::vector<Triplet>{};
  std::map<std::string, std::size_t> via;  // node -> edge used to reach it
  std::deque<std::string> queue{from};
  via.emplace(from, edges_.size());
  while (!queue.empty()) {
    std::string node = queue.front();
    queue.pop_front();
    for (std::size_t e : adjacency_.at(node)) {
      const Triplet& t = edges_[e];
      const std::string& next = t.subject == node ? t.object : t.subject;
      if (!via.emplace(next, e).second) continue;
      if (next == to) {
        std::vector<Triplet> path;
        for (std::string cur = to; cur != from;) {
          const Triplet& step = edges_[via.at(cur)];
          path.push_back(step);
          cur = step.subject == cur ? step.object : step.subject;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

std::string KnowledgeGraph::more_general(std::string_view a, std::string_view b) const {
  const std::string na = normalize_concept(a), nb = normalize_concept(b);
  if (na == nb) return na;
  // Concepts reachable from `start` by moving to more general or equivalent
  // concepts.
  auto generalizations = [&](const std::string& start) {
    std::set<std::string> seen{start};
    std::deque<std::string> queue{start};
    while (!queue.empty()) {
      std::string node = queue.front();
      queue.pop_front();
      auto it = adjacency_.find(node);
      if (it == adjacency_.end()) continue;
      for (std::size_t e : it->second) {
        const Triplet& t = edges_[e];
        std::string next;
        if (t.relation == Relation::equivalent)
          next = t.subject == node ? t.object : t.subject;
        else if (t.verb == "is_a" && t.subject == node)
          next = t.object;
        else if (t.verb != "is_a" && t.object == node)
          next = t.subject;
        if (!next.empty() && seen.insert(next).second) queue.push_back(next);
      }
    }
    return seen;
  };
  if (generalizations(nb).count(na) > 0) return na;
  if (generalizations(na).count(nb) > 0) return nb;
  return na + "/" + nb;
}

std::optional<std::vector<Triplet>> explain_relation(const KnowledgeGraph& graph,
                                                     std::string_view concept_a,
                                                     std::string_view concept_b) {
  return graph.shortest_path(concept_a, concept_b);
}

std::string ing_form(std::string_view verb) {
  std::string v = to_lower(std::string(verb));
  if (v.size() > 1 && v.back() == 'e' && !v.ends_with("ee")) v.pop_back();
  return v + "ing";
}

std::string render_rationale(const ActionFrame& a, const ActionFrame& b,
                             const KnowledgeGraph& graph) {
  for (const ActionFrame* f : {&a, &b})
    if (trim(f->agent).empty() || trim(f->action).empty() || trim(f->theme).empty())
      throw Error(ErrorCode::invalid_argument, "action frame needs agent, action and theme");
  return "Both artifacts involve " + graph.more_general(a.agent, b.agent) + " " +
         ing_form(trim(a.action)) + " " + graph.more_general(a.theme, b.theme);
}

std::optional<ActionFrame> naive_action_frame(std::string_view text) {
  static const std::set<std::string> helpers{"be", "able", "to", "provide", "the",
                                             "ability", "have", "capability", "allow",
                                             "support", "also"};
  static const std::set<std::string> stops{"and", "or", "for", "with", "by", "from",
                                           "at", "in", "on", "to", "if", "when"};
  for (const auto& clause : clauses(text)) {
    const auto w = words(clause);
    std::size_t m = 0;
    while (m < w.size() && (modals().count(w[m]) == 0 || w[m] == "not")) ++m;
    if (m == 0 || m >= w.size()) continue;
    ActionFrame f;
    for (std::size_t i = 0; i < m; ++i)
      if (determiners().count(w[i]) == 0) f.agent += (f.agent.empty() ? "" : " ") + w[i];
    std::size_t i = m + 1;
    while (i < w.size() && (helpers.count(w[i]) > 0 || modals().count(w[i]) > 0)) ++i;
    if (i >= w.size()) continue;
    f.action = w[i++];
    while (i < w.size() && determiners().count(w[i]) > 0) ++i;
    for (; i < w.size() && stops.count(w[i]) == 0; ++i)
      f.theme += (f.theme.empty() ? "" : " ") + w[i];
    if (f.agent.empty() || f.theme.empty()) continue;
    return f;
  }
  return std::nullopt;
}

std::string render_llm_prompt(const Artifact& source, const Artifact& target) {
  auto flat = [](std::string s) {
    for (char& c : s)
      if (c == '\n' || c == '\r') c = ' ';
    // Files usually end in a newline; it must not leak into the template.
    auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return std::string();
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
  };
  return "Below are artifacts from the same software system. Is there a traceability "
         "link between (1) and (2)?\n\n(1) " +
         flat(source.content()) + "\n\n(2) " + flat(target.content()) + "\n";
}

std::string research_query(std::string_view concept_name, std::string_view domain) {
  return "what is inbody:" + std::string(concept_name) + " in " + std::string(domain);
}

namespace {

// Graph concepts occurring in `text` as whole words, case-insensitively.
std::vector<std::string> mentioned_concepts(const std::string& text,
                                            const KnowledgeGraph& graph) {
  const std::string lower = normalize_concept(text);
  std::vector<std::string> out;
  for (const auto& node : graph.nodes()) {
    for (std::size_t pos = lower.find(node); pos != std::string::npos;
         pos = lower.find(node, pos + 1)) {
      const std::size_t end = pos + node.size();
      if (pos > 0 && is_word_char(lower[pos - 1])) continue;
      if (end < lower.size() && is_word_char(lower[end])) continue;
      out.push_back(node);
      break;
    }
  }
  return out;
}

std::optional<ActionFrame> frame_for(const Artifact& a, const Resources& r) {
  auto it = r.frames.find(a.id);
  if (it != r.frames.end()) return it->second;
  if (r.naive_frames) return naive_action_frame(a.content());
  return std::nullopt;
}

}  // namespace

LinkExplanation explain_link(const Artifact& source, const Artifact& target,
                             const Resources& resources, std::string_view domain) {
  LinkExplanation x;
  x.source_terms = annotate_terms(source, resources.glossary, resources.blacklist);
  x.target_terms = annotate_terms(target, resources.glossary, resources.blacklist);

  for (const auto& a : mentioned_concepts(source.content(), resources.graph)) {
    for (const auto& b : mentioned_concepts(target.content(), resources.graph)) {
      auto p = resources.graph.shortest_path(a, b);
      if (p && (!x.path || p->size() < x.path->size())) {
        x.path = std::move(p);
        x.source_concept = a;
        x.target_concept = b;
      }
    }
  }

  auto fa = frame_for(source, resources);
  auto fb = frame_for(target, resources);
  if (fa && fb) {
    try {
      x.rationale = render_rationale(*fa, *fb, resources.graph);
    } catch (const Error&) {
      // Incomplete frames leave the rationale out.
    }
  }
  x.prompt = render_llm_prompt(source, target);

  std::set<std::string> queried;
  for (const auto* pair : {&source, &target}) {
    const std::string text = pair->content();
    const auto& covered = pair == &source ? x.source_terms : x.target_terms;
    std::size_t i = 0;
    while (i < text.size()) {
      if (!is_word_char(text[i]) && text[i] != '-' && text[i] != '/') { ++i; continue; }
      std::size_t j = i;
      while (j < text.size() && (is_word_char(text[j]) || text[j] == '-' || text[j] == '/')) ++j;
      std::string token = text.substr(i, j - i);
      while (!token.empty() && (token.back() == '-' || token.back() == '/')) token.pop_back();
      int upper = 0;
      bool lower_seen = false;
      for (char c : token) {
        if (std::isupper(static_cast<unsigned char>(c))) ++upper;
        if (std::islower(static_cast<unsigned char>(c))) lower_seen = true;
      }
      bool is_covered = std::any_of(covered.begin(), covered.end(), [&](const Annotation& a) {
        return a.begin <= i && i < a.end;
      });
      if (upper >= 2 && !lower_seen && !is_covered && queried.insert(token).second)
        x.research_queries.push_back(research_query(token, domain));
      i = j;
    }
  }
  return x;
}

namespace {

void require_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::load, "missing file: " + path.string());
}

std::string cell(const csv::Row& row, int c) {
  return c >= 0 && c < static_cast<int>(row.size()) ? row[c] : std::string();
}

}  // namespace

std::vector<GlossaryEntry> load_glossary(const std::filesystem::path& path) {
  require_file(path);
  csv::Row header;
  auto rows = csv::read_file(path, {"term", "definition"}, &header);
  const int t = csv::column(header, "term"), e = csv::column(header, "expansion"),
            d = csv::column(header, "definition"), s = csv::column(header, "source");
  std::vector<GlossaryEntry> out;
  for (const auto& row : rows) {
    GlossaryEntry g;
    g.term = trim(cell(row, t));
    if (g.term.empty()) throw Error(ErrorCode::load, path.string() + ": empty glossary term");
    if (std::string x = cell(row, e); !x.empty()) g.expansion = x;
    g.definition = cell(row, d);
    g.source = glossary_source_from_string(cell(row, s));
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Triplet> load_triplets(const std::filesystem::path& path) {
  require_file(path);
  csv::Row header;
  auto rows = csv::read_file(path, {"subject", "verb", "object"}, &header);
  const int s = csv::column(header, "subject"), v = csv::column(header, "verb"),
            o = csv::column(header, "object");
  std::vector<Triplet> out;
  for (const auto& row : rows) {
    auto rel = relation_verb(cell(row, v));
    if (!rel)
      throw Error(ErrorCode::load, path.string() + ": unsupported verb '" + cell(row, v) + "'");
    out.push_back({normalize_concept(cell(row, s)), rel->first,
                   normalize_concept(cell(row, o)), rel->second});
  }
  return out;
}

std::map<std::string, ActionFrame> load_frames(const std::filesystem::path& path) {
  require_file(path);
  csv::Row header;
  auto rows = csv::read_file(path, {"artifact_id", "agent", "action", "theme"}, &header);
  const int id = csv::column(header, "artifact_id"), ag = csv::column(header, "agent"),
            ac = csv::column(header, "action"), th = csv::column(header, "theme");
  std::map<std::string, ActionFrame> out;
  for (const auto& row : rows)
    out[cell(row, id)] = {cell(row, ag), cell(row, ac), cell(row, th)};
  return out;
}

std::set<std::string> load_blacklist(const std::filesystem::path& path) {
  require_file(path);
  std::ifstream in(path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.insert(normalize_concept(t));
  }
  return out;
}

}  // namespace tracelab::explain
