// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/tlr.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <variant>

#include "tracelab/csv.hpp"
#include "tracelab/error.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab::tlr {

const char* to_string(EngineKind e) {
  switch (e) {
    case EngineKind::vsm: return "vsm";
    case EngineKind::lsi: return "lsi";
    case EngineKind::lda: return "lda";
    case EngineKind::classifier: return "classifier";
  }
  return "vsm";
}

EngineKind engine_from_string(std::string_view s) {
  if (s == "vsm") return EngineKind::vsm;
  if (s == "lsi") return EngineKind::lsi;
  if (s == "lda") return EngineKind::lda;
  if (s == "classifier") return EngineKind::classifier;
  throw Error(ErrorCode::invalid_argument, "unknown engine '" + std::string(s) + "'");
}

RecoveryMode mode_from_string(std::string_view s) {
  if (s == "per_source") return RecoveryMode::per_source;
  if (s == "full_matrix") return RecoveryMode::full_matrix;
  throw Error(ErrorCode::invalid_argument, "unknown mode '" + std::string(s) + "'");
}

void RecoveryConfig::validate() const {
  preprocess.validate();
  if (threshold && !(*threshold >= 0.0 && *threshold <= 1.0))
    throw Error(ErrorCode::invalid_argument, "threshold must lie in [0, 1]");
  if (top_k && *top_k < 1)
    throw Error(ErrorCode::invalid_argument, "top_k must be >= 1");
  if (mode == RecoveryMode::per_source && source_id.empty())
    throw Error(ErrorCode::invalid_argument, "per_source mode needs a source id");
  const bool distribution = ir::is_distribution_measure(measure);
  switch (engine) {
    case EngineKind::vsm:
    case EngineKind::lsi:
      if (distribution)
        throw Error(ErrorCode::incompatible,
                    std::string(ir::to_string(measure)) + " needs the lda engine");
      break;
    case EngineKind::lda:
      if (measure == ir::Measure::jaccard)
        throw Error(ErrorCode::incompatible, "jaccard is not available for lda");
      break;
    case EngineKind::classifier:
      break;
  }
}

namespace {

// Classifier engine: a link classifier trained on the dataset's own answer
// matrix; the score of a pair is P(link).
struct ClassifierEngine {
  learn::PairTable table;
  std::map<std::string, std::size_t> source_row;  // first row of each source
  std::size_t n_targets = 0;
  std::vector<std::string> target_ids;
  learn::Classifier clf;
};

ClassifierEngine fit_classifier(const Dataset& d, const RecoveryConfig& cfg) {
  learn::PairFeatureConfig pf;
  pf.preprocess = cfg.preprocess;
  pf.lsi_k = cfg.lsi_k;
  pf.lda = cfg.lda;
  pf.lda.iterations = std::min(pf.lda.iterations, 200);
  ClassifierEngine e{learn::make_pairs(d, learn::FeatureMode::similarity_features, pf),
                     {}, d.targets.size(), {}, {}};
  for (std::size_t s = 0; s < d.sources.size(); ++s)
    e.source_row.emplace(d.sources[s].id, s * d.targets.size());
  for (const auto& t : d.targets) e.target_ids.push_back(t.id);
  auto labels = e.table.labels();
  auto rows = learn::balance_indices(labels, learn::BalanceStrategy::undersample, cfg.seed);
  learn::TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  e.clf = learn::train(e.table, rows, cfg.classifier, tc);
  return e;
}

}  // namespace

struct Engine::Impl {
  std::variant<ir::TermDocMatrix, ir::LsiModel, ir::LdaModel, ClassifierEngine> model;
  ir::Measure measure;
};

Engine::Engine(const Dataset& dataset, const RecoveryConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  impl_->measure = cfg.measure;
  switch (cfg.engine) {
    case EngineKind::vsm:
      impl_->model = ir::build_index(dataset.targets, cfg.preprocess, cfg.weighting);
      break;
    case EngineKind::lsi: {
      auto index = ir::build_index(dataset.targets, cfg.preprocess, cfg.weighting);
      int k = cfg.lsi_k > 0 ? cfg.lsi_k : ir::default_lsi_rank(index.n_terms(), index.n_docs());
      impl_->model = ir::lsi_fit(index, k);
      break;
    }
    case EngineKind::lda: {
      auto index = ir::build_index(dataset.targets, cfg.preprocess, ir::Weighting::bag_of_words);
      ir::LdaConfig lc = cfg.lda;
      lc.seed = cfg.seed;
      impl_->model = ir::lda_fit(index, lc);
      break;
    }
    case EngineKind::classifier:
      impl_->model = fit_classifier(dataset, cfg);
      break;
  }
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

std::vector<ir::ScoredTarget> Engine::rank(const Artifact& source) const {
  return std::visit(
      [&](const auto& m) -> std::vector<ir::ScoredTarget> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ClassifierEngine>) {
          auto it = m.source_row.find(source.id);
          if (it == m.source_row.end())
            throw Error(ErrorCode::not_found,
                        "classifier engine only scores dataset sources; unknown '" +
                            source.id + "'");
          std::vector<ir::ScoredTarget> out;
          for (std::size_t t = 0; t < m.n_targets; ++t)
            out.push_back({m.target_ids[t],
                           m.clf.predict_proba(m.table.pairs[it->second + t].features)[1]});
          ir::sort_ranking(out);
          return out;
        } else {
          return ir::rank_targets(source, m, impl_->measure);
        }
      },
      impl_->model);
}

std::vector<eval::RankedResult> score(const Dataset& dataset,
                                      const RecoveryConfig& cfg) {
  cfg.validate();
  std::vector<const Artifact*> queries;
  if (cfg.mode == RecoveryMode::per_source) {
    const Artifact* a = dataset.sources.find(cfg.source_id);
    if (a == nullptr)
      throw Error(ErrorCode::not_found, "unknown source artifact '" + cfg.source_id + "'");
    queries.push_back(a);
  } else {
    for (const auto& a : dataset.sources) queries.push_back(&a);
  }
  std::vector<eval::RankedResult> results(queries.size());
  if (dataset.targets.empty()) {
    for (std::size_t i = 0; i < queries.size(); ++i) results[i].source_id = queries[i]->id;
    return results;
  }
  Engine engine(dataset, cfg);
  parallel_for(queries.size(), cfg.jobs, [&](std::size_t i) {
    results[i].source_id = queries[i]->id;
    results[i].ranked_targets = engine.rank(*queries[i]);
  });
  return results;
}

TraceMatrix select_links(const std::vector<eval::RankedResult>& rankings,
                         const RecoveryConfig& cfg) {
  if (!cfg.threshold && !cfg.top_k)
    throw Error(ErrorCode::invalid_argument,
                "no selection rule: set a threshold and/or top_k");
  TraceMatrix out;
  for (const auto& r : rankings) {
    std::size_t limit = r.ranked_targets.size();
    if (cfg.top_k) limit = std::min(limit, *cfg.top_k);
    for (std::size_t i = 0; i < limit; ++i) {
      const auto& t = r.ranked_targets[i];
      if (cfg.threshold && t.score < *cfg.threshold) continue;
      out.insert(make_link(r.source_id, t.target_id, Provenance::automatic, t.score));
    }
  }
  return out;
}

TraceMatrix recover(const Dataset& dataset, const RecoveryConfig& cfg) {
  if (!cfg.threshold && !cfg.top_k)
    throw Error(ErrorCode::invalid_argument,
                "no selection rule: set a threshold and/or top_k");
  return select_links(score(dataset, cfg), cfg);
}

std::string format_score(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_candidates_csv(std::ostream& out, const TraceMatrix& candidates,
                          EngineKind engine) {
  std::vector<const TraceLink*> rows;
  for (const auto& [key, link] : candidates) rows.push_back(&link);
  std::stable_sort(rows.begin(), rows.end(), [](const TraceLink* a, const TraceLink* b) {
    if (a->source_id != b->source_id) return a->source_id < b->source_id;
    double sa = a->score.value_or(0.0), sb = b->score.value_or(0.0);
    if (sa != sb) return sa > sb;
    return a->target_id < b->target_id;
  });
  csv::write_row(out, {"source_id", "target_id", "score", "engine"});
  for (const TraceLink* l : rows)
    csv::write_row(out, {l->source_id, l->target_id, format_score(l->score.value_or(0.0)),
                         to_string(engine)});
}

Predictions read_predictions(const std::filesystem::path& path) {
  Predictions p;
  std::map<std::string, std::vector<ir::ScoredTarget>> grouped;
  if (path.extension() == ".csv") {
    csv::Row header;
    auto rows = csv::read_file(path, {"source_id", "target_id"}, &header);
    int si = csv::column(header, "source_id");
    int ti = csv::column(header, "target_id");
    int sc = csv::column(header, "score");
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) <= std::max(si, ti))
        throw Error(ErrorCode::load, path.string() + ": short row");
      double score = 1.0;
      if (sc >= 0 && sc < static_cast<int>(row.size()) && !row[sc].empty()) {
        const std::string& f = row[sc];
        auto res = std::from_chars(f.data(), f.data() + f.size(), score);
        if (res.ec != std::errc() || res.ptr != f.data() + f.size())
          throw Error(ErrorCode::load, path.string() + ": bad score '" + f + "'");
        score = std::clamp(score, 0.0, 1.0);
      }
      if (p.links.contains(row[si], row[ti])) continue;
      p.links.insert(make_link(row[si], row[ti], Provenance::automatic, score));
      grouped[row[si]].push_back({row[ti], score});
    }
  } else {
    TraceMatrix pairs = load_answer_links(path);
    for (const auto& [key, link] : pairs) {
      p.links.insert(make_link(key.first, key.second, Provenance::automatic, 1.0));
      grouped[key.first].push_back({key.second, 1.0});
    }
  }
  for (auto& [source, ranked] : grouped) {
    ir::sort_ranking(ranked);
    p.rankings.push_back({source, std::move(ranked)});
  }
  return p;
}

}  // namespace tracelab::tlr
