// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "support.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace testsupport {

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "tracelab-test-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path data_dir() { return TRACELAB_TEST_DATA_DIR; }

tracelab::Artifact artifact(std::string id, std::string text, std::string kind) {
  tracelab::Artifact a;
  a.id = std::move(id);
  a.text = std::move(text);
  a.kind = std::move(kind);
  return a;
}

tracelab::Dataset planted_dataset(std::size_t n, std::uint64_t seed) {
  static const char* filler[] = {"system", "module", "data", "value", "process",
                                 "signal", "report", "status", "control", "interface"};
  std::mt19937_64 rng(seed);
  auto words = [&](std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) out += std::string(filler[rng() % 10]) + " ";
    return out;
  };
  tracelab::Dataset d;
  auto id = [](const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < n; ++i) {
    // Letters only, so no stage of the default pipeline alters the token.
    std::string token = "zq";
    for (std::size_t v = i + 1; v > 0; v /= 26) token += static_cast<char>('a' + v % 26);
    token += "x";
    d.sources.add(artifact(id("S", i), words(6) + token + " " + words(4), "requirement"));
    d.targets.add(artifact(id("T", i), words(5) + token + " " + words(5), "design"));
    d.answers.insert(tracelab::make_link(id("S", i), id("T", i), tracelab::Provenance::manual));
  }
  return d;
}

std::vector<std::vector<std::string>> random_corpus(std::mt19937_64& rng, std::size_t docs,
                                                    std::size_t terms, std::size_t max_len) {
  std::vector<std::vector<std::string>> out(docs);
  for (auto& doc : out) {
    std::size_t len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i) doc.push_back("w" + std::to_string(rng() % terms));
  }
  return out;
}

namespace oracle {

std::vector<std::map<std::string, double>> tfidf(
    const std::vector<std::vector<std::string>>& docs) {
  const double n = static_cast<double>(docs.size());
  std::vector<std::map<std::string, double>> out(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& term : docs[d]) {
      if (out[d].count(term)) continue;
      double count = 0;
      for (const auto& t : docs[d]) count += t == term ? 1 : 0;
      double df = 0;
      for (const auto& other : docs) {
        bool has = false;
        for (const auto& t : other) has = has || t == term;
        df += has ? 1 : 0;
      }
      out[d][term] = count / static_cast<double>(docs[d].size()) * std::log2(n / df);
    }
  }
  return out;
}

PRF prf(const std::set<Pair>& predicted, const std::set<Pair>& gold, double beta) {
  double tp = 0;
  for (const auto& p : predicted) tp += gold.count(p) ? 1 : 0;
  double p = predicted.empty() ? (gold.empty() ? 1.0 : 0.0) : tp / predicted.size();
  double r = gold.empty() ? 1.0 : tp / gold.size();
  double b2 = beta * beta;
  double f = (p + r) == 0 ? 0.0 : (1 + b2) * p * r / (b2 * p + r);
  return {p, r, f};
}

double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& gold_targets) {
  if (gold_targets.empty()) return 0.0;
  double sum = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!gold_targets.count(ranking[i])) continue;
    double hits = 0;
    for (std::size_t j = 0; j <= i; ++j) hits += gold_targets.count(ranking[j]) ? 1 : 0;
    sum += hits / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(gold_targets.size());
}

std::vector<double> lag_counts(const std::vector<std::string>& ranking,
                               const std::set<std::string>& gold_targets) {
  std::vector<double> out;
  for (const auto& g : gold_targets) {
    double fp = 0;
    bool found = false;
    for (const auto& t : ranking) {
      if (t == g) {
        found = true;
        break;
      }
      if (!gold_targets.count(t)) ++fp;
    }
    if (!found) {
      fp = 0;
      for (const auto& t : ranking) fp += gold_targets.count(t) ? 0 : 1;
    }
    out.push_back(fp);
  }
  return out;
}

double dcg(const std::vector<std::string>& ranking, const std::set<std::string>& gold_targets,
           std::size_t k) {
  double s = 0;
  for (std::size_t rank = 1; rank <= std::min(k, ranking.size()); ++rank)
    if (gold_targets.count(ranking[rank - 1])) s += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
  return s;
}

ClassMetrics class_metrics(const std::vector<std::string>& pred,
                           const std::vector<std::string>& gold) {
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(pred.begin(), pred.end());
  std::map<std::pair<std::string, std::string>, double> confusion;  // (gold, pred)
  for (std::size_t i = 0; i < gold.size(); ++i) confusion[{gold[i], pred[i]}] += 1;
  auto cell = [&](const std::string& g, const std::string& p) {
    auto it = confusion.find({g, p});
    return it == confusion.end() ? 0.0 : it->second;
  };
  double tp_all = 0, fp_all = 0, fn_all = 0, macro = 0, weighted = 0, n_gold_labels = 0;
  for (const auto& l : labels) {
    double tp = cell(l, l), fp = 0, fn = 0;
    for (const auto& o : labels) {
      if (o == l) continue;
      fp += cell(o, l);
      fn += cell(l, o);
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    double support = tp + fn;
    if (support == 0) continue;
    double p = tp + fp == 0 ? 0 : tp / (tp + fp);
    double r = tp / support;
    double f = p + r == 0 ? 0 : 2 * p * r / (p + r);
    macro += f;
    weighted += f * support;
    n_gold_labels += 1;
  }
  double mp = tp_all / (tp_all + fp_all), mr = tp_all / (tp_all + fn_all);
  double micro = mp + mr == 0 ? 0 : 2 * mp * mr / (mp + mr);
  return {macro / n_gold_labels, micro, weighted / static_cast<double>(gold.size()),
          tp_all / static_cast<double>(gold.size())};
}

std::optional<std::size_t> shortest_path_length(
    std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
    std::size_t from, std::size_t to) {
  if (from == to) return 0;
  std::optional<std::size_t> best;
  std::vector<bool> on_path(nodes, false);
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t node, std::size_t len) {
    if (node == to) {
      if (!best || len < *best) best = len;
      return;
    }
    on_path[node] = true;
    for (const auto& [a, b] : edges) {
      std::size_t next;
      if (a == node) next = b;
      else if (b == node) next = a;
      else continue;
      if (!on_path[next]) walk(next, len + 1);
    }
    on_path[node] = false;
  };
  walk(from, 0);
  return best;
}

}  // namespace oracle

}  // namespace testsupport
