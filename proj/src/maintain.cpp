// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/maintain.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "tracelab/csv.hpp"
#include "tracelab/error.hpp"

namespace tracelab::maintain {

const char* to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::added: return "added";
    case ChangeKind::removed: return "removed";
    case ChangeKind::modified: return "modified";
  }
  return "modified";
}

const char* to_string(Side s) { return s == Side::source ? "source" : "target"; }

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::new_functionality_added: return "new_functionality_added";
    case Scenario::artifact_removed: return "artifact_removed";
    case Scenario::artifact_refined: return "artifact_refined";
    case Scenario::link_retarget: return "link_retarget";
  }
  return "artifact_refined";
}

std::string content_hash(const Artifact& a) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(ir::fnv1a(a.content())));
  return buf;
}

namespace {

void diff_side(const ArtifactSet& before, const ArtifactSet& after, Side side,
               std::vector<ChangeEvent>& out) {
  for (const auto& a : before) {
    const Artifact* b = after.find(a.id);
    if (b == nullptr) {
      out.push_back({ChangeKind::removed, a.id, side, content_hash(a), std::nullopt});
      continue;
    }
    std::string h0 = content_hash(a), h1 = content_hash(*b);
    if (h0 != h1) out.push_back({ChangeKind::modified, a.id, side, h0, h1});
  }
  for (const auto& b : after)
    if (!before.contains(b.id))
      out.push_back({ChangeKind::added, b.id, side, std::nullopt, content_hash(b)});
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct SideChanges {
  std::set<std::string> removed;
  std::set<std::string> changed;  // modified or added
  std::map<std::string, std::string> renamed;  // removed id -> added id
};

SideChanges collect(std::span<const ChangeEvent> events, Side side,
                    const ArtifactSet& now) {
  SideChanges c;
  std::map<std::string, std::vector<std::string>> removed_by_hash, added_by_hash;
  for (const auto& e : events) {
    if (e.side != side) continue;
    switch (e.kind) {
      case ChangeKind::removed:
        if (now.contains(e.artifact_id))
          throw Error(ErrorCode::validation, "removed " + std::string(to_string(side)) +
                                                 " '" + e.artifact_id + "' is still present");
        c.removed.insert(e.artifact_id);
        if (e.old_text_hash) removed_by_hash[*e.old_text_hash].push_back(e.artifact_id);
        break;
      case ChangeKind::added:
      case ChangeKind::modified:
        if (!now.contains(e.artifact_id))
          throw Error(ErrorCode::validation, std::string(to_string(e.kind)) + " " +
                                                 to_string(side) + " '" + e.artifact_id +
                                                 "' is missing from the new dataset");
        c.changed.insert(e.artifact_id);
        if (e.kind == ChangeKind::added && e.new_text_hash)
          added_by_hash[*e.new_text_hash].push_back(e.artifact_id);
        break;
    }
  }
  for (const auto& [hash, olds] : removed_by_hash) {
    auto it = added_by_hash.find(hash);
    if (olds.size() == 1 && it != added_by_hash.end() && it->second.size() == 1)
      c.renamed.emplace(olds.front(), it->second.front());
  }
  return c;
}

std::string unique_link_id(const TraceMatrix& m, const std::string& base) {
  if (m.find_by_id(base) == nullptr) return base;
  for (int n = 2;; ++n) {
    std::string id = base + "#" + std::to_string(n);
    if (m.find_by_id(id) == nullptr) return id;
  }
}

}  // namespace

std::vector<ChangeEvent> detect_changes(const Dataset& old_dataset,
                                        const Dataset& new_dataset) {
  std::vector<ChangeEvent> out;
  diff_side(old_dataset.sources, new_dataset.sources, Side::source, out);
  diff_side(old_dataset.targets, new_dataset.targets, Side::target, out);
  return out;
}

MaintenanceResult apply_maintenance(const TraceMatrix& matrix,
                                    std::span<const ChangeEvent> events,
                                    const Dataset& new_dataset,
                                    const MaintenanceConfig& cfg) {
  if (!cfg.threshold)
    throw Error(ErrorCode::invalid_argument, "maintenance needs a threshold");
  const double threshold = *cfg.threshold;
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::invalid_argument, "threshold must lie in [0, 1]");

  SideChanges src = collect(events, Side::source, new_dataset.sources);
  SideChanges tgt = collect(events, Side::target, new_dataset.targets);

  MaintenanceResult r{matrix, {}};
  auto note = [&](TraceLink& link, std::string event) {
    link.history.push_back({cfg.now, std::move(event)});
  };
  auto log = [&](const std::string& id, Scenario s, std::string text) {
    r.log.push_back({cfg.now, id, s, std::move(text)});
  };

  // Removals and renames.
  for (const auto& key : matrix.pairs()) {
    const bool s_gone = src.removed.count(key.first) > 0;
    const bool t_gone = tgt.removed.count(key.second) > 0;
    if (!s_gone && !t_gone) continue;
    TraceLink link = *r.matrix.find(key.first, key.second);
    std::string what = s_gone ? "source '" + key.first + "'" : "target '" + key.second + "'";
    if (link.is_protected) {
      if (link.flags.count("dangling") > 0) continue;
      link.flags.insert("dangling");
      note(link, "flagged dangling: " + what + " removed");
      log(link.id, Scenario::artifact_removed,
          "protected link kept and flagged dangling because " + what + " was removed");
      r.matrix.update(key, std::move(link));
      continue;
    }
    std::string ns = key.first, nt = key.second;
    bool renamed = true;
    if (s_gone) {
      auto it = src.renamed.find(key.first);
      if (it == src.renamed.end()) renamed = false; else ns = it->second;
    }
    if (t_gone) {
      auto it = tgt.renamed.find(key.second);
      if (it == tgt.renamed.end()) renamed = false; else nt = it->second;
    }
    if (renamed && !r.matrix.contains(ns, nt)) {
      std::string from = make_link_id(key.first, key.second);
      std::string to = make_link_id(ns, nt);
      link.source_id = ns;
      link.target_id = nt;
      note(link, "retargeted from " + from + " to " + to);
      log(link.id, Scenario::link_retarget,
          "endpoint renamed with identical content; link moved from " + from + " to " + to);
      r.matrix.update(key, std::move(link));
      continue;
    }
    r.matrix.erase(key);
    log(link.id, Scenario::artifact_removed,
        "automatic link removed because " + what + " was deleted");
  }

  // Re-scoring of pairs that touch modified or added artifacts.
  if ((src.changed.empty() && tgt.changed.empty()) || new_dataset.sources.empty() ||
      new_dataset.targets.empty())
    return r;
  tlr::RecoveryConfig ec = cfg.engine;
  ec.mode = tlr::RecoveryMode::full_matrix;
  ec.threshold.reset();
  ec.top_k.reset();
  tlr::Engine engine(new_dataset, ec);
  std::map<TraceMatrix::Key, double> scores;
  for (const auto& s : new_dataset.sources) {
    const bool s_changed = src.changed.count(s.id) > 0;
    if (!s_changed && tgt.changed.empty()) continue;
    for (const auto& t : engine.rank(s))
      if (s_changed || tgt.changed.count(t.target_id) > 0)
        scores.emplace(TraceMatrix::Key{s.id, t.target_id}, t.score);
  }
  for (const auto& [key, score] : scores) {
    const TraceLink* existing = r.matrix.find(key.first, key.second);
    if (existing == nullptr) {
      if (score < threshold) continue;
      TraceLink link = make_link(key.first, key.second, Provenance::automatic, score);
      link.id = unique_link_id(r.matrix, link.id);
      note(link, "created with score " + format_double(score));
      log(link.id, Scenario::new_functionality_added,
          "similarity " + format_double(score) + " >= threshold " +
              format_double(threshold) + " after a change to " + key.first + " or " +
              key.second);
      r.matrix.insert(std::move(link));
      continue;
    }
    TraceLink link = *existing;
    std::vector<std::string> changes;
    if (!link.is_protected && link.score != score) {
      link.score = score;
      changes.push_back("rescored to " + format_double(score));
    }
    const bool below = score < threshold;
    if (below && link.flags.insert("below_threshold").second)
      changes.push_back("flagged below_threshold (" + format_double(score) + " < " +
                        format_double(threshold) + ")");
    if (!below && link.flags.erase("below_threshold") > 0)
      changes.push_back("cleared below_threshold");
    if (changes.empty()) continue;
    std::string text;
    for (const auto& c : changes) {
      if (!text.empty()) text += "; ";
      text += c;
      note(link, c);
    }
    log(link.id, Scenario::artifact_refined, text);
    r.matrix.update(key, std::move(link));
  }
  return r;
}

void append_log(const std::filesystem::path& path,
                std::span<const Justification> entries) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::io, "cannot append to " + path.string());
  for (const auto& e : entries)
    out << iso8601_utc(e.timestamp) << '\t' << e.link_id << '\t' << to_string(e.scenario)
        << '\t' << e.text << '\n';
}

bool Tim::allows(std::string_view source_kind, std::string_view target_kind,
                 const std::optional<std::string>& label) const {
  for (const auto& rule : rules) {
    if (rule.source_kind != "*" && rule.source_kind != source_kind) continue;
    if (rule.target_kind != "*" && rule.target_kind != target_kind) continue;
    if (rule.labels.empty() || (label && rule.labels.count(*label) > 0)) return true;
  }
  return false;
}

Tim Tim::permissive() { return Tim{{{"*", "*", {}}}}; }

Tim Tim::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::load, "missing file: " + path.string());
  csv::Row header;
  auto rows = csv::read_file(path, {"source_kind", "target_kind"}, &header);
  const int sc = csv::column(header, "source_kind");
  const int tc = csv::column(header, "target_kind");
  const int lc = csv::column(header, "labels");
  Tim tim;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) <= std::max(sc, tc))
      throw Error(ErrorCode::load, path.string() + ": short row");
    Rule rule{row[sc], row[tc], {}};
    if (lc >= 0 && lc < static_cast<int>(row.size())) {
      const std::string& l = row[lc];
      std::size_t start = 0;
      while (start <= l.size()) {
        std::size_t end = l.find('|', start);
        if (end == std::string::npos) end = l.size();
        if (end > start) rule.labels.insert(l.substr(start, end - start));
        start = end + 1;
      }
    }
    tim.rules.push_back(std::move(rule));
  }
  if (tim.rules.empty()) throw Error(ErrorCode::validation, path.string() + ": TIM has no rules");
  return tim;
}

ConsistencyReport consistency(const TraceMatrix& matrix, const Dataset& dataset,
                              const Tim& tim, const VettedPairs* vetted,
                              const ConsistencyWeights& weights) {
  if (!(weights.validity >= 0 && weights.completeness >= 0 && weights.correctness >= 0))
    throw Error(ErrorCode::invalid_argument, "consistency weights must be non-negative");
  ConsistencyReport rep;

  std::size_t valid = 0;
  std::set<std::string> linked_sources, linked_targets;
  std::size_t vetted_n = 0, vetted_ok = 0;
  for (const auto& [key, link] : matrix) {
    const Artifact* s = dataset.sources.find(key.first);
    const Artifact* t = dataset.targets.find(key.second);
    if (s) linked_sources.insert(key.first);
    if (t) linked_targets.insert(key.second);
    if (s && t && tim.allows(s->kind, t->kind, link.type_label)) ++valid;
    if (vetted) {
      auto it = vetted->find(key);
      if (it != vetted->end()) {
        ++vetted_n;
        if (it->second) ++vetted_ok;
      }
    }
  }
  rep.validity = matrix.empty() ? 1.0 : static_cast<double>(valid) / matrix.size();
  const std::size_t total = dataset.sources.size() + dataset.targets.size();
  rep.completeness =
      total == 0 ? 0.0
                 : static_cast<double>(linked_sources.size() + linked_targets.size()) / total;
  if (vetted_n > 0) rep.correctness = static_cast<double>(vetted_ok) / vetted_n;

  double num = weights.validity * rep.validity + weights.completeness * rep.completeness;
  double den = weights.validity + weights.completeness;
  if (rep.correctness) {
    num += weights.correctness * *rep.correctness;
    den += weights.correctness;
  }
  if (den <= 0.0)
    throw Error(ErrorCode::invalid_argument, "consistency weights of the known components are all zero");
  rep.combined = num / den;
  return rep;
}

}  // namespace tracelab::maintain
