// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/vet.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "tracelab/error.hpp"
#include "tracelab/tlr.hpp"
#include "vet_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tracelab::vet {

const char* to_string(Decision d) {
  switch (d) {
    case Decision::accept: return "accept";
    case Decision::reject: return "reject";
    case Decision::skip: return "skip";
  }
  return "skip";
}

Decision decision_from_string(std::string_view s) {
  if (s == "accept") return Decision::accept;
  if (s == "reject") return Decision::reject;
  if (s == "skip") return Decision::skip;
  throw Error(ErrorCode::invalid_argument, "unknown decision '" + std::string(s) + "'");
}

namespace {

json annotations_json(const std::vector<explain::Annotation>& v) {
  json out = json::array();
  for (const auto& a : v)
    out.push_back({{"begin", a.begin}, {"end", a.end}, {"term", a.term},
                   {"explanation", a.explanation}});
  return out;
}

std::vector<explain::Annotation> annotations_from(const json& j) {
  std::vector<explain::Annotation> out;
  for (const auto& a : j)
    out.push_back({a.at("begin").get<std::size_t>(), a.at("end").get<std::size_t>(),
                   a.at("term").get<std::string>(), a.at("explanation").get<std::string>()});
  return out;
}

}  // namespace

json to_json(const Candidate& c) {
  return {{"link_id", c.link_id},
          {"source_id", c.source_id},
          {"target_id", c.target_id},
          {"score", c.score},
          {"source_text", c.source_text},
          {"target_text", c.target_text},
          {"source_annotations", annotations_json(c.source_annotations)},
          {"target_annotations", annotations_json(c.target_annotations)},
          {"rationale", c.rationale ? json(*c.rationale) : json(nullptr)}};
}

Candidate candidate_from_json(const json& j) {
  Candidate c;
  c.link_id = j.at("link_id").get<std::string>();
  c.source_id = j.at("source_id").get<std::string>();
  c.target_id = j.at("target_id").get<std::string>();
  c.score = j.at("score").get<double>();
  c.source_text = j.at("source_text").get<std::string>();
  c.target_text = j.at("target_text").get<std::string>();
  c.source_annotations = annotations_from(j.at("source_annotations"));
  c.target_annotations = annotations_from(j.at("target_annotations"));
  if (!j.at("rationale").is_null()) c.rationale = j.at("rationale").get<std::string>();
  return c;
}

json to_json(const DecisionRecord& d) {
  return {{"link_id", d.link_id},
          {"decision", to_string(d.decision)},
          {"analyst", d.analyst},
          {"timestamp", iso8601_utc(d.timestamp)}};
}

DecisionRecord decision_from_json(const json& j) {
  return {j.at("link_id").get<std::string>(),
          decision_from_string(j.at("decision").get<std::string>()),
          j.at("analyst").get<std::string>(),
          parse_iso8601_utc(j.at("timestamp").get<std::string>())};
}

json to_json(const SessionStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"total", s.total},
          {"vetted", s.vetted},
          {"accepts", s.accepts},
          {"rejects", s.rejects},
          {"skips", s.skips},
          {"decisions", s.decisions},
          {"acceptance_rate", opt(s.acceptance_rate)},
          {"precision_so_far", opt(s.precision_so_far)}};
}

json to_json(const TraceLink& link) {
  json history = json::array();
  for (const auto& h : link.history)
    history.push_back({{"timestamp", iso8601_utc(h.timestamp)}, {"event", h.event}});
  return {{"id", link.id},
          {"source_id", link.source_id},
          {"target_id", link.target_id},
          {"score", link.score ? json(*link.score) : json(nullptr)},
          {"provenance", to_string(link.provenance)},
          {"protected", link.is_protected},
          {"history", history}};
}

std::vector<Candidate> build_queue(const SessionRequest& request) {
  Dataset d = load_dataset(request.dataset, request.format);
  tlr::RecoveryConfig rc = recovery_config(request.config);
  explain::Resources res = explain_resources(request.config);
  const std::string domain = request.config.get_or("domain", "software engineering");
  TraceMatrix links;
  if (!d.sources.empty() && !d.targets.empty()) links = tlr::recover(d, rc);
  else if (!rc.threshold && !rc.top_k)
    throw Error(ErrorCode::invalid_argument, "no selection rule: set a threshold and/or top_k");
  std::vector<Candidate> queue;
  for (const auto& [key, link] : links) {
    const Artifact& s = *d.sources.find(key.first);
    const Artifact& t = *d.targets.find(key.second);
    auto x = explain::explain_link(s, t, res, domain);
    queue.push_back({link.id, s.id, t.id, link.score.value_or(0.0), s.content(), t.content(),
                     std::move(x.source_terms), std::move(x.target_terms),
                     std::move(x.rationale)});
  }
  std::stable_sort(queue.begin(), queue.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.source_id != b.source_id) return a.source_id < b.source_id;
    return a.target_id < b.target_id;
  });
  return queue;
}

struct VettingStore::Session {
  std::string id;
  fs::path dir;
  std::vector<Candidate> queue;
  std::map<std::string, std::size_t> by_link;
  std::vector<DecisionRecord> log;
  std::map<std::string, DecisionRecord> current;
  mutable std::mutex mutex;

  void apply(DecisionRecord d) {
    current[d.link_id] = d;
    log.push_back(std::move(d));
  }

  SessionStats stats() const {
    SessionStats s;
    s.total = queue.size();
    s.decisions = log.size();
    for (const auto& [link, d] : current) {
      ++s.vetted;
      switch (d.decision) {
        case Decision::accept: ++s.accepts; break;
        case Decision::reject: ++s.rejects; break;
        case Decision::skip: ++s.skips; break;
      }
    }
    if (s.vetted > 0) s.acceptance_rate = static_cast<double>(s.accepts) / s.vetted;
    if (s.accepts + s.rejects > 0)
      s.precision_so_far = static_cast<double>(s.accepts) / (s.accepts + s.rejects);
    return s;
  }
};

VettingStore::VettingStore(fs::path dir, Clock clock) : dir_(std::move(dir)), clock_(std::move(clock)) {
  if (!clock_)
    clock_ = [] {
      return static_cast<std::int64_t>(std::chrono::duration_cast<std::chrono::seconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count());
    };
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create store " + dir_.string() + ": " + ec.message());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.is_directory() && fs::exists(e.path() / "session.json")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) load_session(d);
}

VettingStore::~VettingStore() = default;

void VettingStore::load_session(const fs::path& dir) {
  auto s = std::make_unique<Session>();
  s->dir = dir;
  try {
    std::ifstream in(dir / "session.json");
    json j = json::parse(in);
    if (j.value("format", "") != "tracelab-vet-session" || j.value("version", 0) != 1)
      throw Error(ErrorCode::version_mismatch, (dir / "session.json").string() +
                                                   ": unsupported session format");
    s->id = j.at("id").get<std::string>();
    for (const auto& c : j.at("queue")) {
      s->by_link.emplace(c.at("link_id").get<std::string>(), s->queue.size());
      s->queue.push_back(candidate_from_json(c));
    }
    std::ifstream log(dir / "decisions.log");
    std::string line;
    int n = 0;
    while (std::getline(log, line)) {
      ++n;
      if (line.empty()) continue;
      DecisionRecord d = decision_from_json(json::parse(line));
      if (s->by_link.count(d.link_id) == 0)
        throw Error(ErrorCode::validation, (dir / "decisions.log").string() + ":" +
                                               std::to_string(n) + ": unknown link '" +
                                               d.link_id + "'");
      s->apply(std::move(d));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::load, dir.string() + ": " + e.what());
  }
  if (s->id.rfind("sess-", 0) == 0) {
    try {
      next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(s->id.substr(5)) + 1);
    } catch (const std::exception&) {
    }
  }
  std::string id = s->id;
  sessions_.emplace(std::move(id), std::move(s));
}

std::string VettingStore::create_session(const SessionRequest& request) {
  std::vector<Candidate> queue = build_queue(request);
  std::lock_guard lock(mutex_);
  auto s = std::make_unique<Session>();
  s->id = "sess-" + std::to_string(next_id_);
  s->dir = dir_ / s->id;
  json config = json::object();
  for (const auto& [k, v] : request.config.values()) config[k] = v;
  json q = json::array();
  for (const auto& c : queue) q.push_back(to_json(c));
  json doc = {{"format", "tracelab-vet-session"},
              {"version", 1},
              {"id", s->id},
              {"created_at", iso8601_utc(clock_())},
              {"request",
               {{"dataset", request.dataset},
                {"format", request.format == DatasetFormat::coest_dir ? "coest_dir" : "csv_pair"},
                {"config", config}}},
              {"queue", q}};
  std::error_code ec;
  fs::create_directories(s->dir, ec);
  std::ofstream out(s->dir / "session.json", std::ios::binary);
  if (ec || !out) throw Error(ErrorCode::io, "cannot write session " + s->dir.string());
  out << doc.dump(2) << '\n';
  out.close();
  if (!out) throw Error(ErrorCode::io, "cannot write session " + s->dir.string());
  for (std::size_t i = 0; i < queue.size(); ++i) s->by_link.emplace(queue[i].link_id, i);
  s->queue = std::move(queue);
  ++next_id_;
  std::string id = s->id;
  sessions_.emplace(id, std::move(s));
  return id;
}

VettingStore::Session& VettingStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session '" + id + "'");
  return *it->second;
}

std::vector<std::string> VettingStore::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

std::size_t VettingStore::queue_size(const std::string& session_id) const {
  return get(session_id).queue.size();
}

std::vector<Candidate> VettingStore::candidates(const std::string& session_id,
                                                std::size_t offset, std::size_t limit) const {
  const Session& s = get(session_id);
  if (offset >= s.queue.size()) return {};
  auto end = s.queue.begin() + static_cast<std::ptrdiff_t>(std::min(s.queue.size(), offset + limit));
  return {s.queue.begin() + static_cast<std::ptrdiff_t>(offset), end};
}

std::map<std::string, DecisionRecord> VettingStore::current_decisions(
    const std::string& session_id) const {
  const Session& s = get(session_id);
  std::lock_guard lock(s.mutex);
  return s.current;
}

std::vector<DecisionRecord> VettingStore::history(const std::string& session_id,
                                                  const std::string& link_id) const {
  const Session& s = get(session_id);
  std::lock_guard lock(s.mutex);
  std::vector<DecisionRecord> out;
  for (const auto& d : s.log)
    if (d.link_id == link_id) out.push_back(d);
  return out;
}

SessionStats VettingStore::record_decision(const std::string& session_id,
                                           const std::string& link_id, Decision decision,
                                           const std::string& analyst) {
  Session& s = get(session_id);
  std::lock_guard lock(s.mutex);
  if (s.by_link.count(link_id) == 0)
    throw Error(ErrorCode::not_found,
                "unknown link '" + link_id + "' in session '" + session_id + "'");
  DecisionRecord d{link_id, decision, analyst, clock_()};
  std::ofstream out(s.dir / "decisions.log", std::ios::binary | std::ios::app);
  out << to_json(d).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::io, "cannot append to " + (s.dir / "decisions.log").string());
  s.apply(std::move(d));
  return s.stats();
}

TraceMatrix VettingStore::export_matrix(const std::string& session_id) const {
  const Session& s = get(session_id);
  std::lock_guard lock(s.mutex);
  TraceMatrix m;
  for (const auto& [link_id, d] : s.current) {
    if (d.decision != Decision::accept) continue;
    const Candidate& c = s.queue[s.by_link.at(link_id)];
    TraceLink link = make_link(c.source_id, c.target_id, Provenance::vetted_accept, c.score);
    link.id = c.link_id;
    for (const auto& h : s.log)
      if (h.link_id == link_id)
        link.history.push_back(
            {h.timestamp, std::string(to_string(h.decision)) + " by " + h.analyst});
    m.insert(std::move(link));
  }
  return m;
}

SessionStats VettingStore::stats(const std::string& session_id) const {
  const Session& s = get(session_id);
  std::lock_guard lock(s.mutex);
  return s.stats();
}

}  // namespace tracelab::vet
