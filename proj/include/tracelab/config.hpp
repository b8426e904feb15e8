// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tracelab/explain.hpp"
#include "tracelab/tlr.hpp"

namespace tracelab {

/// Flat key=value run configuration. Later assignments override earlier
/// ones; '#' starts a comment line. Unknown keys are rejected.
class RunConfig {
 public:
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(std::string_view text);

  /// Throws Error(invalid_argument) for an unknown key.
  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  /// Throws Error(invalid_argument) naming the key when it is missing.
  std::string require(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Sorted "key=value" lines.
  std::string to_text() const;
  const std::map<std::string, std::string>& values() const { return values_; }

  static bool known_key(std::string_view key);

 private:
  std::map<std::string, std::string> values_;
};

PreprocessConfig preprocess_config(const RunConfig& c);
tlr::RecoveryConfig recovery_config(const RunConfig& c);
/// Glossary, blacklist, triplets and frames named by the config; missing
/// keys leave the matching part empty.
explain::Resources explain_resources(const RunConfig& c);
/// `timestamp` key, else $SOURCE_DATE_EPOCH, else 0.
std::int64_t run_timestamp(const RunConfig& c);

}  // namespace tracelab
