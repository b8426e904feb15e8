// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/config.hpp"
#include "tracelab/corpus.hpp"
#include "tracelab/explain.hpp"

namespace tracelab::vet {

enum class Decision { accept, reject, skip };

const char* to_string(Decision d);
Decision decision_from_string(std::string_view s);

struct Candidate {
  std::string link_id;
  std::string source_id;
  std::string target_id;
  double score = 0.0;
  std::string source_text;
  std::string target_text;
  std::vector<explain::Annotation> source_annotations;
  std::vector<explain::Annotation> target_annotations;
  std::optional<std::string> rationale;
};

struct DecisionRecord {
  std::string link_id;
  Decision decision = Decision::skip;
  std::string analyst;
  std::int64_t timestamp = 0;
};

/// vetted counts links with a current decision of any kind (skips
/// included). acceptance_rate = accepts / vetted; precision_so_far =
/// accepts / (accepts + rejects); both are unset when their denominator is 0.
struct SessionStats {
  std::size_t total = 0;
  std::size_t vetted = 0;
  std::size_t accepts = 0;
  std::size_t rejects = 0;
  std::size_t skips = 0;
  std::size_t decisions = 0;  // every recorded decision, overwrites included
  std::optional<double> acceptance_rate;
  std::optional<double> precision_so_far;

  bool operator==(const SessionStats&) const = default;
};

struct SessionRequest {
  std::string dataset;
  DatasetFormat format = DatasetFormat::coest_dir;
  /// Recovery and explanation settings (engine, top_k, glossary, ...).
  RunConfig config;
};

/// Builds the candidate queue: tlr::recover ordered by descending score,
/// then source and target id, each enriched with glossary annotations and,
/// when frames are available, a rationale.
std::vector<Candidate> build_queue(const SessionRequest& request);

/// Directory-backed session store. Each session lives in <dir>/<id>/ as
/// session.json (request and queue, written once) and decisions.log (one
/// JSON object per line, append-only). Opening a store replays every log.
/// Decisions on one session are serialized; sessions are independent.
class VettingStore {
 public:
  using Clock = std::function<std::int64_t()>;

  /// Default clock: system time in whole seconds.
  explicit VettingStore(std::filesystem::path dir, Clock clock = {});
  ~VettingStore();

  VettingStore(const VettingStore&) = delete;
  VettingStore& operator=(const VettingStore&) = delete;

  /// Ids are "sess-1", "sess-2", ... Recovery errors propagate.
  std::string create_session(const SessionRequest& request);

  std::vector<std::string> session_ids() const;
  std::size_t queue_size(const std::string& session_id) const;
  std::vector<Candidate> candidates(const std::string& session_id, std::size_t offset,
                                    std::size_t limit) const;
  /// Current decision per link id.
  std::map<std::string, DecisionRecord> current_decisions(const std::string& session_id) const;
  std::vector<DecisionRecord> history(const std::string& session_id,
                                      const std::string& link_id) const;

  /// Throws Error(not_found) for an unknown session or link.
  SessionStats record_decision(const std::string& session_id, const std::string& link_id,
                               Decision decision, const std::string& analyst);
  /// Accepted links: provenance vetted_accept, protected, decision history.
  TraceMatrix export_matrix(const std::string& session_id) const;
  SessionStats stats(const std::string& session_id) const;

 private:
  struct Session;
  Session& get(const std::string& id) const;
  void load_session(const std::filesystem::path& dir);

  std::filesystem::path dir_;
  Clock clock_;
  mutable std::mutex mutex_;  // guards sessions_ and next_id_
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// HTTP+JSON front end over a store.
///   POST /sessions                  {dataset, format?, config?} -> {session_id}
///   GET  /sessions/{id}/candidates  ?offset&limit
///   POST /sessions/{id}/decisions   {link_id, decision, analyst} -> stats
///   GET  /sessions/{id}/matrix
///   GET  /sessions/{id}/stats
class Server {
 public:
  explicit Server(VettingStore& store);
  ~Server();

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port. Throws Error(io) when binding fails.
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tracelab::vet
