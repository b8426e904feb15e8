// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tracelab/text.hpp"

namespace tracelab {

/// One traceable unit of text.
struct Artifact {
  std::string id;
  std::string kind;
  std::string title;
  std::string text;
  std::map<std::string, std::string> metadata;
  std::optional<std::int64_t> created_at;  // seconds since epoch

  /// Title and body joined by a newline; what the engines index.
  std::string content() const;

  bool operator==(const Artifact&) const = default;
};

/// Insertion-ordered artifact collection with unique ids.
class ArtifactSet {
 public:
  ArtifactSet() = default;
  explicit ArtifactSet(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  /// Throws Error(validation) on an empty/duplicate id or when both title
  /// and text are empty.
  void add(Artifact artifact);

  const Artifact* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  std::size_t size() const { return artifacts_.size(); }
  bool empty() const { return artifacts_.empty(); }
  const Artifact& operator[](std::size_t i) const { return artifacts_[i]; }
  auto begin() const { return artifacts_.begin(); }
  auto end() const { return artifacts_.end(); }

  bool operator==(const ArtifactSet& other) const {
    return name_ == other.name_ && artifacts_ == other.artifacts_;
  }

 private:
  std::string name_;
  std::vector<Artifact> artifacts_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

enum class Provenance { manual, automatic, vetted_accept, vetted_reject };

const char* to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct HistoryEntry {
  std::int64_t timestamp = 0;
  std::string event;

  bool operator==(const HistoryEntry&) const = default;
};

struct TraceLink {
  std::string id;
  std::string source_id;
  std::string target_id;
  std::optional<std::string> type_label;
  std::optional<double> score;
  Provenance provenance = Provenance::automatic;
  bool is_protected = false;
  std::vector<HistoryEntry> history;
  /// Review markers such as "dangling" or "below_threshold".
  std::set<std::string> flags;

  bool operator==(const TraceLink&) const = default;
};

/// Deterministic link id for a (source, target) pair.
std::string make_link_id(std::string_view source_id, std::string_view target_id);

/// Builds a link with provenance defaults applied: manual links are
/// protected.
TraceLink make_link(std::string source_id, std::string target_id,
                    Provenance provenance,
                    std::optional<double> score = std::nullopt);

/// A set of trace links with at most one link per (source, target) pair.
/// Iteration order is by (source_id, target_id).
class TraceMatrix {
 public:
  using Key = std::pair<std::string, std::string>;

  /// Throws Error(validation) if the pair is taken or the score is outside
  /// [0, 1].
  void insert(TraceLink link);
  /// Replaces the link stored under `key`, moving it if its endpoints
  /// changed. Throws if the new endpoints collide with another link.
  void update(const Key& key, TraceLink link);
  bool erase(const Key& key);

  const TraceLink* find(std::string_view source_id,
                        std::string_view target_id) const;
  const TraceLink* find_by_id(std::string_view link_id) const;
  bool contains(std::string_view source_id, std::string_view target_id) const {
    return find(source_id, target_id) != nullptr;
  }

  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  auto begin() const { return links_.begin(); }
  auto end() const { return links_.end(); }

  std::set<Key> pairs() const;

  bool operator==(const TraceMatrix& other) const {
    return links_ == other.links_;
  }

 private:
  std::map<Key, TraceLink> links_;
};

struct Dataset {
  ArtifactSet sources{"sources"};
  ArtifactSet targets{"targets"};
  TraceMatrix answers;

  /// Throws Error(validation) listing every answer link with an unknown id.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

enum class DatasetFormat { coest_dir, csv_pair };

DatasetFormat dataset_format_from_string(std::string_view s);

/// Loads a dataset laid out as documented in the README.
Dataset load_dataset(const std::filesystem::path& root, DatasetFormat format);

/// Writes a dataset so that load_dataset(root, format) reproduces it.
/// coest_dir keeps ids and text only.
void save_dataset(const Dataset& dataset, const std::filesystem::path& root,
                  DatasetFormat format);

/// Reads an answers/links file: whitespace pairs (coest answers.txt) or a
/// CSV with source_id,target_id[,type_label] columns.
TraceMatrix load_answer_links(const std::filesystem::path& path);

struct Vocabulary {
  std::vector<std::string> terms;  // sorted
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return terms.size(); }
  std::optional<std::size_t> find(std::string_view term) const;
};

/// Full matrix CSV: id,source_id,target_id,type_label,score,provenance,
/// protected,flags,history. Flags are ';'-separated; history is a JSON array
/// of [timestamp, event] pairs.
void write_matrix_csv(std::ostream& out, const TraceMatrix& matrix);
void save_matrix_csv(const TraceMatrix& matrix, const std::filesystem::path& path);
/// Only source_id and target_id are required; provenance defaults to
/// automatic and protected to the provenance default.
TraceMatrix load_matrix_csv(const std::filesystem::path& path);

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string iso8601_utc(std::int64_t seconds_since_epoch);
/// Inverse of iso8601_utc; also accepts a space instead of 'T' and a missing
/// 'Z'. Throws Error(invalid_argument) on other input.
std::int64_t parse_iso8601_utc(std::string_view text);

Vocabulary build_vocabulary(const std::vector<const ArtifactSet*>& sets,
                            const PreprocessConfig& cfg);
Vocabulary make_vocabulary(std::vector<std::string> terms);

}  // namespace tracelab
