// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "tracelab/error.hpp"
#include "tracelab/learn.hpp"

namespace tracelab::learn {
namespace {

// Fisher-Yates driven directly by mt19937_64 so the permutation is the same
// on every standard library.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

BalanceStrategy balance_strategy_from_string(std::string_view s) {
  if (s == "undersample") return BalanceStrategy::undersample;
  if (s == "oversample") return BalanceStrategy::oversample;
  throw Error(ErrorCode::invalid_argument,
              "unknown balancing strategy '" + std::string(s) + "'");
}

std::vector<std::size_t> balance_indices(std::span<const Label> labels,
                                         BalanceStrategy strategy,
                                         std::uint64_t seed) {
  std::vector<std::size_t> links, others;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == Label::link ? links : others).push_back(i);
  if (links.empty() || others.empty())
    throw Error(ErrorCode::invalid_argument,
                "balancing needs both classes (link=" + std::to_string(links.size()) +
                    ", no_link=" + std::to_string(others.size()) + ")");

  const bool links_minor = links.size() <= others.size();
  std::vector<std::size_t>& minority = links_minor ? links : others;
  std::vector<std::size_t>& majority = links_minor ? others : links;
  std::mt19937_64 rng(seed);

  std::vector<std::size_t> out;
  if (strategy == BalanceStrategy::undersample) {
    std::vector<std::size_t> pool = majority;
    shuffle(pool, rng);
    pool.resize(minority.size());
    out = minority;
    out.insert(out.end(), pool.begin(), pool.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  out.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = i;
  for (std::size_t extra = majority.size() - minority.size(); extra > 0; --extra)
    out.push_back(minority[static_cast<std::size_t>(rng() % minority.size())]);
  return out;
}

std::vector<LabeledPair> balance(const std::vector<LabeledPair>& pairs,
                                 BalanceStrategy strategy, std::uint64_t seed) {
  std::vector<Label> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) labels.push_back(p.label);
  std::vector<LabeledPair> out;
  for (std::size_t i : balance_indices(labels, strategy, seed)) out.push_back(pairs[i]);
  return out;
}

std::vector<Fold> stratified_kfold(std::span<const int> strata, int k,
                                   std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::invalid_argument, "k-fold needs k >= 2");
  if (static_cast<std::size_t>(k) > strata.size())
    throw Error(ErrorCode::invalid_argument,
                "k=" + std::to_string(k) + " exceeds the " +
                    std::to_string(strata.size()) + " available items");

  std::map<int, std::vector<std::size_t>> by_stratum;
  for (std::size_t i = 0; i < strata.size(); ++i) by_stratum[strata[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> tests(static_cast<std::size_t>(k));
  // Dealing continues across strata so fold sizes stay within one.
  std::size_t next = 0;
  for (auto& [stratum, members] : by_stratum) {
    shuffle(members, rng);
    for (std::size_t idx : members) {
      tests[next].push_back(idx);
      next = (next + 1) % tests.size();
    }
  }

  std::vector<Fold> folds(tests.size());
  for (std::size_t f = 0; f < tests.size(); ++f) {
    std::sort(tests[f].begin(), tests[f].end());
    folds[f].test = tests[f];
    std::vector<char> in_test(strata.size(), 0);
    for (std::size_t idx : tests[f]) in_test[idx] = 1;
    for (std::size_t i = 0; i < strata.size(); ++i)
      if (!in_test[i]) folds[f].train.push_back(i);
  }
  return folds;
}

Fold timestamp_split(std::span<const std::pair<std::string, std::string>> pair_ids,
                     const TimestampLookup& created_at, std::int64_t cutoff) {
  std::set<std::string> missing;
  Fold fold;
  for (std::size_t i = 0; i < pair_ids.size(); ++i) {
    auto a = created_at(pair_ids[i].first);
    auto b = created_at(pair_ids[i].second);
    if (!a) missing.insert(pair_ids[i].first);
    if (!b) missing.insert(pair_ids[i].second);
    if (!a || !b) continue;
    (std::max(*a, *b) < cutoff ? fold.train : fold.test).push_back(i);
  }
  if (!missing.empty()) {
    std::string msg = "timestamp split: artifacts without created_at:";
    for (const auto& id : missing) msg += " " + id;
    throw Error(ErrorCode::validation, msg);
  }
  return fold;
}

std::vector<Fold> split(const PairTable& table, const SplitPlan& plan,
                        const Dataset* dataset) {
  if (plan.kind == SplitKind::kfold) {
    std::vector<int> strata;
    strata.reserve(table.size());
    for (const auto& p : table.pairs) strata.push_back(static_cast<int>(p.label));
    return stratified_kfold(strata, plan.k, plan.seed);
  }
  if (dataset == nullptr)
    throw Error(ErrorCode::invalid_argument, "timestamp split needs the dataset");
  std::vector<std::pair<std::string, std::string>> ids;
  ids.reserve(table.size());
  for (const auto& p : table.pairs) ids.emplace_back("s:" + p.source_id, "t:" + p.target_id);
  auto lookup = [dataset](const std::string& key) -> std::optional<std::int64_t> {
    const Artifact* a = key[0] == 's' ? dataset->sources.find(key.substr(2))
                                      : dataset->targets.find(key.substr(2));
    return a ? a->created_at : std::nullopt;
  };
  try {
    return {timestamp_split(ids, lookup, plan.cutoff)};
  } catch (const Error& e) {
    // strip the side prefixes from the listed ids
    std::string msg = e.what();
    for (std::string p : {" s:", " t:"}) {
      for (auto pos = msg.find(p); pos != std::string::npos; pos = msg.find(p))
        msg.replace(pos, p.size(), " ");
    }
    throw Error(e.code(), msg);
  }
}

}  // namespace tracelab::learn
