// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tracelab/corpus.hpp"

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// Directory holding the checked-in fixtures (tests/data).
std::filesystem::path data_dir();

tracelab::Artifact artifact(std::string id, std::string text, std::string kind = "");

/// n sources and n targets; source i and target i share one token that
/// occurs nowhere else. Every text also carries a few filler words drawn
/// from a small common pool. Answers are the n diagonal pairs.
tracelab::Dataset planted_dataset(std::size_t n, std::uint64_t seed);

/// Documents of 1..max_len tokens over a vocabulary of `terms` words.
std::vector<std::vector<std::string>> random_corpus(std::mt19937_64& rng, std::size_t docs,
                                                    std::size_t terms, std::size_t max_len);

namespace oracle {

/// tf = count / length, idf = log2(n / df), by explicit loops.
std::vector<std::map<std::string, double>> tfidf(
    const std::vector<std::vector<std::string>>& docs);

using Pair = std::pair<std::string, std::string>;

struct PRF {
  double p, r, f;
};
PRF prf(const std::set<Pair>& predicted, const std::set<Pair>& gold, double beta);

/// AP of one ranking over the source's gold targets.
double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& gold_targets);
/// For every true link: number of non-gold entries ranked above it (the
/// whole list when it is missing). Returns the per-link counts.
std::vector<double> lag_counts(const std::vector<std::string>& ranking,
                               const std::set<std::string>& gold_targets);
double dcg(const std::vector<std::string>& ranking, const std::set<std::string>& gold_targets,
           std::size_t k);

struct ClassMetrics {
  double macro, micro, weighted, accuracy;
};
/// Confusion-matrix computation; macro/weighted average over gold labels.
ClassMetrics class_metrics(const std::vector<std::string>& pred,
                           const std::vector<std::string>& gold);

/// Length of the shortest undirected path by exhaustive enumeration of
/// simple paths; nullopt when disconnected.
std::optional<std::size_t> shortest_path_length(
    std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
    std::size_t from, std::size_t to);

}  // namespace oracle

}  // namespace testsupport
