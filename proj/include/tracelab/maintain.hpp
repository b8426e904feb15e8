// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/corpus.hpp"
#include "tracelab/tlr.hpp"

namespace tracelab::maintain {

enum class ChangeKind { added, removed, modified };
enum class Side { source, target };

const char* to_string(ChangeKind k);
const char* to_string(Side s);

struct ChangeEvent {
  ChangeKind kind = ChangeKind::modified;
  std::string artifact_id;
  Side side = Side::source;
  std::optional<std::string> old_text_hash;
  std::optional<std::string> new_text_hash;

  bool operator==(const ChangeEvent&) const = default;
};

/// Hex FNV-1a of Artifact::content().
std::string content_hash(const Artifact& a);

/// Sources first, then targets; within a side removed and modified events in
/// old order, then additions in new order.
std::vector<ChangeEvent> detect_changes(const Dataset& old_dataset,
                                        const Dataset& new_dataset);

enum class Scenario { new_functionality_added, artifact_removed, artifact_refined, link_retarget };

const char* to_string(Scenario s);

struct Justification {
  std::int64_t timestamp = 0;
  std::string link_id;
  Scenario scenario = Scenario::artifact_refined;
  std::string text;

  bool operator==(const Justification&) const = default;
};

struct MaintenanceConfig {
  std::optional<double> threshold;  // required
  /// Engine used to re-score pairs touching changed artifacts. Selection
  /// fields (threshold, top_k, mode) are ignored.
  tlr::RecoveryConfig engine;
  std::int64_t now = 0;  // timestamp written into history and the log
};

struct MaintenanceResult {
  TraceMatrix matrix;
  std::vector<Justification> log;
};

/// Scenario-driven update of `matrix` after `events`. Protected links are
/// never removed or retargeted; a protected link whose endpoint disappears
/// is flagged "dangling". A removed artifact whose content reappears under
/// exactly one new id on the same side is treated as a rename and its
/// automatic links are retargeted in place. Existing links whose re-scored
/// similarity drops below the threshold are flagged "below_threshold".
/// Applying the same events to the result changes nothing.
MaintenanceResult apply_maintenance(const TraceMatrix& matrix,
                                    std::span<const ChangeEvent> events,
                                    const Dataset& new_dataset,
                                    const MaintenanceConfig& cfg);

/// Appends "timestamp<TAB>link id<TAB>scenario<TAB>justification" lines.
void append_log(const std::filesystem::path& path,
                std::span<const Justification> entries);

/// Traceability information model: allowed (source kind, target kind,
/// labels) triples. "*" matches any kind; an empty label set allows any
/// label including none.
struct Tim {
  struct Rule {
    std::string source_kind;
    std::string target_kind;
    std::set<std::string> labels;
  };
  std::vector<Rule> rules;

  bool allows(std::string_view source_kind, std::string_view target_kind,
              const std::optional<std::string>& label) const;

  /// A single rule allowing everything.
  static Tim permissive();
  /// CSV source_kind,target_kind,labels with labels '|'-separated. Throws
  /// Error(validation) when no rule is present.
  static Tim load(const std::filesystem::path& path);
};

struct ConsistencyWeights {
  double validity = 1.0;
  double completeness = 1.0;
  double correctness = 1.0;
};

struct ConsistencyReport {
  double validity = 1.0;
  double completeness = 0.0;
  std::optional<double> correctness;  // nullopt = unknown
  double combined = 0.0;
};

using VettedPairs = std::map<TraceMatrix::Key, bool>;

/// validity: links with both endpoints present and allowed by the TIM (1 for
/// an empty matrix). completeness: sources and targets touched by at least
/// one link (0 for an empty dataset). correctness: vetted links of the
/// matrix marked correct. combined: weighted mean of the known components.
ConsistencyReport consistency(const TraceMatrix& matrix, const Dataset& dataset,
                              const Tim& tim, const VettedPairs* vetted = nullptr,
                              const ConsistencyWeights& weights = {});

}  // namespace tracelab::maintain
