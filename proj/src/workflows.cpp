// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/workflows.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tracelab/csv.hpp"
#include "tracelab/error.hpp"
#include "tracelab/evalkit.hpp"
#include "tracelab/linktype.hpp"
#include "tracelab/maintain.hpp"
#include "tracelab/parallel.hpp"
#include "tracelab/tlr.hpp"
#include "tracelab/vet.hpp"

namespace fs = std::filesystem;

namespace tracelab::workflows {

namespace {

using tlr::format_score;

void set_default(RunConfig& c, const char* key, std::string value) {
  if (!c.has(key)) c.set(key, std::move(value));
}

// Defaults shared by every command that builds an engine.
RunConfig resolve_recovery(RunConfig c) {
  set_default(c, "format", "coest_dir");
  set_default(c, "engine", "vsm");
  set_default(c, "measure", "cosine");
  set_default(c, "mode", "full_matrix");
  set_default(c, "weighting", "tfidf");
  set_default(c, "lowercase", "true");
  set_default(c, "split_identifiers", "true");
  set_default(c, "remove_stopwords", "true");
  set_default(c, "stem", "true");
  set_default(c, "min_token_len", "2");
  set_default(c, "seed", "1");
  set_default(c, "jobs", std::to_string(resolve_jobs(static_cast<int>(c.get_int("jobs", 0)))));
  const std::string engine = c.get_or("engine", "vsm");
  if (engine == "lda" || engine == "classifier") {
    ir::LdaConfig d;
    set_default(c, "lda_topics", std::to_string(d.topics));
    set_default(c, "lda_iterations", std::to_string(d.iterations));
    set_default(c, "lda_beta", format_score(d.beta));
    set_default(c, "lda_inference_iterations", std::to_string(d.inference_iterations));
  }
  if (engine == "classifier") {
    learn::TrainConfig t;
    set_default(c, "classifier", "logistic_regression");
    set_default(c, "learning_rate", format_score(t.learning_rate));
    set_default(c, "epochs", std::to_string(t.epochs));
    set_default(c, "l2", format_score(t.l2));
    set_default(c, "standardize", "true");
  }
  return c;
}

fs::path prepare_out(RunConfig& c) {
  set_default(c, "out", "out");
  fs::path out = c.get_or("out", "out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + out.string() + ": " + ec.message());
  return out;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream f(path, std::ios::binary | std::ios::out | mode);
  if (!f) throw Error(ErrorCode::io, "cannot write " + path.string());
  return f;
}

void write_config(const fs::path& out, const RunConfig& c) {
  auto f = open_out(out / "run_config.txt");
  f << c.to_text();
}

void require_path(const RunConfig& c, const char* key) {
  fs::path p = c.require(key);
  if (!fs::exists(p)) throw Error(ErrorCode::load, key + std::string(": no such file or directory: ") + p.string());
}

Dataset dataset_from(const RunConfig& c, const char* key = "dataset") {
  require_path(c, key);
  Dataset d = load_dataset(c.require(key), dataset_format_from_string(c.get_or("format", "coest_dir")));
  d.validate();
  return d;
}

}  // namespace

std::string recover(const RunConfig& config) {
  RunConfig c = resolve_recovery(config);
  fs::path out = prepare_out(c);
  Dataset d = dataset_from(c);
  tlr::RecoveryConfig rc = recovery_config(c);
  TraceMatrix links = tlr::recover(d, rc);
  auto f = open_out(out / "candidates.csv");
  tlr::write_candidates_csv(f, links, rc.engine);
  write_config(out, c);
  std::ostringstream msg;
  msg << "recover: " << links.size() << " candidate links over " << d.sources.size()
      << " sources -> " << (out / "candidates.csv").string();
  return msg.str();
}

std::string eval(const RunConfig& config) {
  RunConfig c = config;
  fs::path out = prepare_out(c);
  require_path(c, "pred");
  require_path(c, "gold");
  set_default(c, "k", "10");
  set_default(c, "beta", "2");
  const double beta = c.get_double("beta", 2.0);
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be > 0");
  const std::int64_t k = c.get_int("k", 10);
  if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be >= 1");

  tlr::Predictions pred = tlr::read_predictions(c.require("pred"));
  TraceMatrix gold_links = load_answer_links(c.require("gold"));
  eval::PairSet gold = eval::pairs_of(gold_links);
  eval::PairSet predicted = eval::pairs_of(pred.links);

  // Gold sources missing from the predictions still count, with an empty
  // ranking.
  std::map<std::string, eval::RankedResult> by_source;
  for (auto& r : pred.rankings) by_source.emplace(r.source_id, r);
  for (const auto& [s, t] : gold) by_source.try_emplace(s, eval::RankedResult{s, {}});
  std::vector<eval::RankedResult> results;
  for (auto& [s, r] : by_source) results.push_back(r);

  auto f1 = eval::precision_recall_f(predicted, gold, 1.0);
  auto f2 = eval::precision_recall_f(predicted, gold, 2.0);
  auto fb = eval::precision_recall_f(predicted, gold, beta);
  std::size_t tp = 0;
  for (const auto& p : predicted) tp += gold.count(p);

  auto per = open_out(out / "eval_per_source.csv");
  csv::write_row(per, {"source_id", "n_gold", "n_predicted", "ap", "lag", "dcg_at_k",
                       "precision_at_k", "recall_at_k"});
  double dcg_sum = 0.0, p_sum = 0.0, r_sum = 0.0;
  std::size_t with_gold = 0;
  for (const auto& r : results) {
    std::size_t n_gold = 0;
    for (auto it = gold.lower_bound({r.source_id, ""}); it != gold.end() && it->first == r.source_id; ++it)
      ++n_gold;
    const double dcg = eval::dcg_at_k(r, gold, static_cast<std::size_t>(k));
    const double pk = eval::precision_at_k(r, gold, static_cast<std::size_t>(k));
    const double rk = eval::recall_at_k(r, gold, static_cast<std::size_t>(k));
    std::string ap = n_gold > 0 ? format_score(eval::average_precision(r, gold)) : "";
    std::string lg = n_gold > 0 ? format_score(eval::lag(std::span(&r, 1), gold)) : "";
    if (n_gold > 0) {
      ++with_gold;
      dcg_sum += dcg;
      p_sum += pk;
      r_sum += rk;
    }
    csv::write_row(per, {r.source_id, std::to_string(n_gold), std::to_string(r.ranked_targets.size()),
                         ap, lg, format_score(dcg), format_score(pk), format_score(rk)});
  }
  auto mean = [&](double s) { return with_gold == 0 ? 0.0 : s / static_cast<double>(with_gold); };
  const double map = eval::mean_average_precision(results, gold);
  const double lag = eval::lag(results, gold);

  auto rep = open_out(out / "eval_report.txt");
  rep << "n_predicted=" << predicted.size() << "\n"
      << "n_gold=" << gold.size() << "\n"
      << "true_positives=" << tp << "\n"
      << "precision=" << format_score(f1.precision) << "\n"
      << "recall=" << format_score(f1.recall) << "\n"
      << "f1=" << format_score(f1.f_beta) << "\n"
      << "f2=" << format_score(f2.f_beta) << "\n"
      << "beta=" << format_score(beta) << "\n"
      << "f_beta=" << format_score(fb.f_beta) << "\n"
      << "map=" << format_score(map) << "\n"
      << "lag=" << format_score(lag) << "\n"
      << "k=" << k << "\n"
      << "mean_dcg_at_k=" << format_score(mean(dcg_sum)) << "\n"
      << "mean_precision_at_k=" << format_score(mean(p_sum)) << "\n"
      << "mean_recall_at_k=" << format_score(mean(r_sum)) << "\n";
  write_config(out, c);
  std::ostringstream msg;
  msg << "eval: precision=" << format_score(f1.precision) << " recall=" << format_score(f1.recall)
      << " f1=" << format_score(f1.f_beta) << " map=" << format_score(map);
  return msg.str();
}

namespace {

maintain::VettedPairs load_vetted(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::load, "missing file: " + path.string());
  csv::Row header;
  auto rows = csv::read_file(path, {"source_id", "target_id", "correct"}, &header);
  const int s = csv::column(header, "source_id"), t = csv::column(header, "target_id"),
            k = csv::column(header, "correct");
  maintain::VettedPairs out;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) <= std::max({s, t, k}))
      throw Error(ErrorCode::load, path.string() + ": short row");
    out[{row[s], row[t]}] = row[k] == "true" || row[k] == "1" || row[k] == "yes";
  }
  return out;
}

void write_consistency(std::ostream& f, const char* prefix, const maintain::ConsistencyReport& r) {
  f << prefix << "validity=" << format_score(r.validity) << "\n"
    << prefix << "completeness=" << format_score(r.completeness) << "\n"
    << prefix << "correctness=" << (r.correctness ? format_score(*r.correctness) : "unknown") << "\n"
    << prefix << "combined=" << format_score(r.combined) << "\n";
}

}  // namespace

std::string maintain(const RunConfig& config) {
  RunConfig c = resolve_recovery(config);
  fs::path out = prepare_out(c);
  if (!c.has("threshold")) throw Error(ErrorCode::invalid_argument, "maintain needs --threshold");
  Dataset before = dataset_from(c, "old");
  Dataset after = dataset_from(c, "new");
  require_path(c, "matrix");
  TraceMatrix matrix = load_matrix_csv(c.require("matrix"));
  maintain::Tim tim = c.has("tim") ? maintain::Tim::load(c.require("tim")) : maintain::Tim::permissive();
  std::optional<maintain::VettedPairs> vetted;
  if (c.has("vetted")) vetted = load_vetted(c.require("vetted"));
  maintain::ConsistencyWeights w{c.get_double("weight_validity", 1.0),
                                 c.get_double("weight_completeness", 1.0),
                                 c.get_double("weight_correctness", 1.0)};

  auto events = maintain::detect_changes(before, after);
  maintain::MaintenanceConfig mc;
  mc.threshold = c.get_double("threshold");
  mc.engine = recovery_config(c);
  mc.now = run_timestamp(c);
  auto result = maintain::apply_maintenance(matrix, events, after, mc);

  {
    auto f = open_out(out / "changes.csv");
    csv::write_row(f, {"kind", "side", "artifact_id", "old_text_hash", "new_text_hash"});
    for (const auto& e : events)
      csv::write_row(f, {maintain::to_string(e.kind), maintain::to_string(e.side), e.artifact_id,
                         e.old_text_hash.value_or(""), e.new_text_hash.value_or("")});
  }
  save_matrix_csv(result.matrix, out / "matrix.csv");
  maintain::append_log(out / "justifications.log", result.log);
  {
    auto f = open_out(out / "consistency.txt");
    const maintain::VettedPairs* v = vetted ? &*vetted : nullptr;
    write_consistency(f, "before_", maintain::consistency(matrix, before, tim, v, w));
    write_consistency(f, "after_", maintain::consistency(result.matrix, after, tim, v, w));
  }
  write_config(out, c);
  std::ostringstream msg;
  msg << "maintain: " << events.size() << " change events, " << result.log.size()
      << " link updates, " << result.matrix.size() << " links -> " << (out / "matrix.csv").string();
  return msg.str();
}

std::string classify_types(const RunConfig& config) {
  RunConfig c = config;
  fs::path out = prepare_out(c);
  set_default(c, "split", "kfold");
  set_default(c, "folds", "5");
  set_default(c, "seed", "1");
  set_default(c, "class_weights", "false");
  set_default(c, "jobs", std::to_string(resolve_jobs(static_cast<int>(c.get_int("jobs", 0)))));
  require_path(c, "issues");
  require_path(c, "links");

  ArtifactSet issues = linktype::load_issues(c.require("issues"));
  auto raw = linktype::load_issue_links(c.require("links"));
  auto canon = c.has("label_rules") ? linktype::LabelCanonicalizer::load(c.require("label_rules"))
                                    : linktype::LabelCanonicalizer::defaults();
  auto pairs = linktype::make_typed_pairs(issues, raw, canon);

  learn::SplitPlan plan;
  const std::string split = c.get_or("split", "kfold");
  if (split == "kfold") {
    plan.kind = learn::SplitKind::kfold;
  } else if (split == "timestamp") {
    plan.kind = learn::SplitKind::timestamp;
    const std::string cutoff = c.require("cutoff");
    try {
      plan.cutoff = c.get_int("cutoff", 0);
    } catch (const Error&) {
      plan.cutoff = parse_iso8601_utc(cutoff);
    }
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown split '" + split + "'");
  }
  plan.k = static_cast<int>(c.get_int("folds", 5));
  plan.seed = static_cast<std::uint64_t>(c.get_int("seed", 1));

  linktype::EncodingConfig enc;
  enc.preprocess = preprocess_config(c);
  enc.text = c.get_bool("text_features", true);
  enc.metadata = c.get_bool("metadata_features", true);
  enc.relational = c.get_bool("relational_features", true);
  linktype::TypeTrainConfig tc;
  tc.train.learning_rate = c.get_double("learning_rate", tc.train.learning_rate);
  tc.train.epochs = static_cast<int>(c.get_int("epochs", tc.train.epochs));
  tc.train.l2 = c.get_double("l2", tc.train.l2);
  tc.train.standardize = c.get_bool("standardize", tc.train.standardize);
  tc.train.seed = plan.seed;
  tc.class_weights = c.get_bool("class_weights", false);

  auto x = linktype::run_type_experiment(issues, pairs, plan, enc, tc,
                                         static_cast<int>(c.get_int("jobs", 1)));
  {
    auto f = open_out(out / "type_predictions.csv");
    csv::write_row(f, {"source_id", "target_id", "gold", "predicted"});
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      const auto& p = pairs[x.rows[i]];
      csv::write_row(f, {p.source_id, p.target_id, x.gold[i], x.predicted[i]});
    }
  }
  {
    auto f = open_out(out / "type_report.txt");
    f << "n_pairs=" << pairs.size() << "\n"
      << "n_tested=" << x.rows.size() << "\n"
      << "macro_f1=" << format_score(x.report.macro_f1) << "\n"
      << "micro_f1=" << format_score(x.report.micro_f1) << "\n"
      << "weighted_f1=" << format_score(x.report.weighted_f1) << "\n"
      << "accuracy=" << format_score(x.report.accuracy) << "\n";
  }
  {
    auto f = open_out(out / "type_per_class.csv");
    csv::write_row(f, {"label", "precision", "recall", "f1", "support"});
    for (const auto& s : x.report.per_class)
      csv::write_row(f, {s.label, format_score(s.precision), format_score(s.recall),
                         format_score(s.f1), std::to_string(s.support)});
  }
  write_config(out, c);
  std::ostringstream msg;
  msg << "classify-types: " << x.rows.size() << " pairs tested, macro_f1="
      << format_score(x.report.macro_f1) << " micro_f1=" << format_score(x.report.micro_f1);
  return msg.str();
}

std::string explain(const RunConfig& config) {
  RunConfig c = config;
  fs::path out = prepare_out(c);
  set_default(c, "format", "coest_dir");
  set_default(c, "domain", "software engineering");
  Dataset d = dataset_from(c);
  explain::Resources res = explain_resources(c);

  std::vector<TraceMatrix::Key> pairs;
  if (c.has("pred")) {
    require_path(c, "pred");
    for (const auto& [key, link] : tlr::read_predictions(c.require("pred")).links) pairs.push_back(key);
  } else if (c.has("source_id") || c.has("target_id")) {
    pairs.push_back({c.require("source_id"), c.require("target_id")});
  } else {
    for (const auto& [key, link] : d.answers) pairs.push_back(key);
  }

  auto f = open_out(out / "explanations.jsonl");
  using nlohmann::json;
  for (const auto& [sid, tid] : pairs) {
    const Artifact* s = d.sources.find(sid);
    const Artifact* t = d.targets.find(tid);
    if (!s) throw Error(ErrorCode::not_found, "unknown source artifact '" + sid + "'");
    if (!t) throw Error(ErrorCode::not_found, "unknown target artifact '" + tid + "'");
    auto x = explain::explain_link(*s, *t, res, c.get_or("domain", ""));
    auto terms = [](const std::vector<explain::Annotation>& v) {
      json a = json::array();
      for (const auto& t : v)
        a.push_back({{"begin", t.begin}, {"end", t.end}, {"term", t.term},
                     {"explanation", t.explanation}});
      return a;
    };
    json path = nullptr;
    if (x.path) {
      path = json::array();
      for (const auto& e : *x.path)
        path.push_back({{"subject", e.subject}, {"verb", e.verb}, {"object", e.object},
                        {"relation", explain::to_string(e.relation)}});
    }
    json row = {{"source_id", sid},
                {"target_id", tid},
                {"source_terms", terms(x.source_terms)},
                {"target_terms", terms(x.target_terms)},
                {"source_concept", x.path ? json(x.source_concept) : json(nullptr)},
                {"target_concept", x.path ? json(x.target_concept) : json(nullptr)},
                {"path", path},
                {"rationale", x.rationale ? json(*x.rationale) : json(nullptr)},
                {"research_queries", x.research_queries},
                {"prompt", x.prompt}};
    f << row.dump() << '\n';
  }
  write_config(out, c);
  std::ostringstream msg;
  msg << "explain: " << pairs.size() << " links -> " << (out / "explanations.jsonl").string();
  return msg.str();
}

void serve(const RunConfig& config) {
  RunConfig c = config;
  vet::VettingStore store(c.get_or("store", "vet-store"));
  vet::Server server(store);
  const std::string host = c.get_or("host", "127.0.0.1");
  const int port = static_cast<int>(c.get_int("port", 8080));
  server.run(host, port);
}

}  // namespace tracelab::workflows
