// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/linktype.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tracelab/csv.hpp"
#include "tracelab/error.hpp"
#include "tracelab/parallel.hpp"
#include "tracelab/text.hpp"

namespace tracelab::linktype {

LabelCanonicalizer::LabelCanonicalizer(std::vector<Rule> rules,
                                       std::set<std::string> keep_distinct)
    : rules_(std::move(rules)) {
  for (const auto& k : keep_distinct) keep_.insert(to_lower(trim(k)));
  for (const auto& r : rules_) {
    try {
      compiled_.emplace_back(r.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::invalid_argument,
                  "bad label pattern '" + r.pattern + "': " + e.what());
    }
    if (r.canonical.empty() || to_lower(r.canonical) != r.canonical)
      throw Error(ErrorCode::invalid_argument,
                  "canonical label '" + r.canonical + "' must be non-empty lowercase");
  }
  for (const auto& r : rules_)
    if (canonicalize(r.canonical) != r.canonical)
      throw Error(ErrorCode::invalid_argument, "canonical label '" + r.canonical +
                                                   "' is rewritten by an earlier rule");
}

LabelCanonicalizer LabelCanonicalizer::defaults() {
  return LabelCanonicalizer(
      {{"(is )?relat.*", "related"},
       {"(is )?duplicat.*", "duplicates"},
       {"(is )?block.*", "blocks"},
       {"(is )?depend.*", "depends"},
       {"(is )?requir.*", "requires"},
       {"(is )?clon.*", "clone"},
       {"(is )?(a )?sub-?tasks?( of)?", "subtask"},
       {"(is )?caus.*", "cause"}},
      {"clone"});
}

LabelCanonicalizer LabelCanonicalizer::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::load, "missing file: " + path.string());
  csv::Row header;
  auto rows = csv::read_file(path, {"pattern", "canonical"}, &header);
  const int p = csv::column(header, "pattern"), c = csv::column(header, "canonical"),
            k = csv::column(header, "keep_distinct");
  std::vector<Rule> rules;
  std::set<std::string> keep;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) <= std::max(p, c))
      throw Error(ErrorCode::load, path.string() + ": short row");
    rules.push_back({row[p], row[c]});
    if (k >= 0 && k < static_cast<int>(row.size()) && (row[k] == "true" || row[k] == "1"))
      keep.insert(row[c]);
  }
  return LabelCanonicalizer(std::move(rules), std::move(keep));
}

std::string LabelCanonicalizer::canonicalize(std::string_view raw_label) const {
  std::string label = to_lower(trim(raw_label));
  if (keep_.count(label) > 0) return label;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (std::regex_match(label, compiled_[i])) return rules_[i].canonical;
  return label;
}

namespace {

std::optional<std::int64_t> parse_time(const std::string& s, const std::string& where) {
  std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec == std::errc() && res.ptr == t.data() + t.size()) return v;
  try {
    return parse_iso8601_utc(t);
  } catch (const Error&) {
    throw Error(ErrorCode::load, where + ": bad created_at '" + t + "'");
  }
}

Artifact make_issue(std::map<std::string, std::string> f, const std::string& where) {
  Artifact a;
  a.id = f["id"];
  a.kind = "issue";
  a.title = f["title"];
  a.text = f["description"];
  for (const char* key : {"issue_type", "reporter", "assignee"})
    if (!f[key].empty()) a.metadata[key] = f[key];
  a.created_at = parse_time(f["created_at"], where);
  if (a.title.empty() && a.text.empty()) a.title = a.id;
  return a;
}

}  // namespace

ArtifactSet load_issues(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::load, "missing file: " + path.string());
  ArtifactSet issues("issues");
  static const char* fields[] = {"id", "title", "description", "issue_type",
                                 "reporter", "assignee", "created_at"};
  if (path.extension() == ".csv") {
    csv::Row header;
    auto rows = csv::read_file(path, {"id"}, &header);
    for (const auto& row : rows) {
      std::map<std::string, std::string> f;
      for (const char* name : fields) {
        int c = csv::column(header, name);
        if (c >= 0 && c < static_cast<int>(row.size())) f[name] = row[c];
      }
      issues.add(make_issue(std::move(f), path.string()));
    }
    return issues;
  }
  std::ifstream in(path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string where = path.string() + ":" + std::to_string(line_no);
    std::map<std::string, std::string> f;
    try {
      auto j = nlohmann::json::parse(line);
      for (const char* name : fields) {
        if (!j.contains(name) || j[name].is_null()) continue;
        f[name] = j[name].is_string() ? j[name].get<std::string>() : j[name].dump();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::load, where + ": " + e.what());
    }
    issues.add(make_issue(std::move(f), where));
  }
  return issues;
}

std::vector<RawIssueLink> load_issue_links(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorCode::load, "missing file: " + path.string());
  csv::Row header;
  auto rows = csv::read_file(path, {"source_id", "target_id", "raw_label"}, &header);
  const int s = csv::column(header, "source_id"), t = csv::column(header, "target_id"),
            l = csv::column(header, "raw_label");
  std::vector<RawIssueLink> out;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) <= std::max({s, t, l}))
      throw Error(ErrorCode::load, path.string() + ": short row");
    out.push_back({row[s], row[t], row[l]});
  }
  return out;
}

std::vector<TypedPair> make_typed_pairs(const ArtifactSet& issues,
                                        std::span<const RawIssueLink> links,
                                        const LabelCanonicalizer& canon) {
  std::vector<std::string> unknown;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<TypedPair> out;
  for (const auto& l : links) {
    if (!issues.contains(l.source_id) || !issues.contains(l.target_id)) {
      unknown.push_back(l.source_id + " " + l.target_id);
      continue;
    }
    if (!seen.emplace(l.source_id, l.target_id).second) continue;
    out.push_back({l.source_id, l.target_id, canon.canonicalize(l.raw_label)});
  }
  if (!unknown.empty()) {
    std::string msg = "issue links reference unknown issues:";
    for (const auto& u : unknown) msg += "\n  " + u;
    throw Error(ErrorCode::validation, msg);
  }
  return out;
}

TypedPairEncoder TypedPairEncoder::fit(const std::vector<const Artifact*>& issues,
                                       const EncodingConfig& cfg) {
  TypedPairEncoder e;
  e.cfg_ = cfg;
  if (cfg.text) {
    std::vector<std::string> ids, texts;
    for (const Artifact* a : issues) {
      ids.push_back(a->id);
      texts.push_back(a->content());
    }
    e.vectorizer_ = ir::build_index(ids, texts, cfg.preprocess, ir::Weighting::tfidf).vectorizer;
    for (const char* side : {"s", "t"})
      for (const auto& term : e.vectorizer_.vocabulary.terms)
        e.names_.push_back(std::string(side) + ":text:" + term);
  }
  if (cfg.metadata) {
    for (const auto& field : cfg.metadata_fields) {
      std::set<std::string> values;
      for (const Artifact* a : issues) {
        auto it = a->metadata.find(field);
        if (it != a->metadata.end()) values.insert(it->second);
      }
      e.values_.emplace_back(values.begin(), values.end());
    }
    for (const char* side : {"s", "t"})
      for (std::size_t f = 0; f < cfg.metadata_fields.size(); ++f)
        for (const auto& v : e.values_[f])
          e.names_.push_back(std::string(side) + ":" + cfg.metadata_fields[f] + "=" + v);
  }
  if (cfg.relational) {
    e.names_.push_back("created_at_delta");
    e.names_.push_back("created_at_missing");
  }
  return e;
}

std::vector<double> TypedPairEncoder::encode(const Artifact& source,
                                             const Artifact& target) const {
  std::vector<double> out;
  out.reserve(names_.size());
  if (cfg_.text) {
    const std::size_t v = vectorizer_.vocabulary.size();
    for (const Artifact* a : {&source, &target}) {
      std::size_t base = out.size();
      out.resize(base + v, 0.0);
      for (const auto& entry : vectorizer_.weigh_text(a->content()))
        out[base + entry.index] = entry.value;
    }
  }
  if (cfg_.metadata) {
    for (const Artifact* a : {&source, &target}) {
      for (std::size_t f = 0; f < cfg_.metadata_fields.size(); ++f) {
        const auto& values = values_[f];
        std::size_t base = out.size();
        out.resize(base + values.size(), 0.0);
        auto it = a->metadata.find(cfg_.metadata_fields[f]);
        if (it == a->metadata.end()) continue;
        auto pos = std::lower_bound(values.begin(), values.end(), it->second);
        if (pos != values.end() && *pos == it->second) out[base + (pos - values.begin())] = 1.0;
      }
    }
  }
  if (cfg_.relational) {
    const bool known = source.created_at && target.created_at;
    out.push_back(known ? static_cast<double>(*target.created_at - *source.created_at) : 0.0);
    out.push_back(known ? 0.0 : 1.0);
  }
  return out;
}

std::vector<double> TypeModel::predict_proba(const Artifact& source,
                                             const Artifact& target) const {
  const auto x = encoder_.encode(source, target);
  std::vector<double> p(classes_.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < classes_.size(); ++c) sum += p[c] = one_vs_rest_[c].predict_proba(x)[1];
  for (double& v : p) v = sum > 0.0 ? v / sum : 1.0 / static_cast<double>(p.size());
  return p;
}

std::string TypeModel::predict(const Artifact& source, const Artifact& target) const {
  const auto p = predict_proba(source, target);
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c)
    if (p[c] > p[best]) best = c;
  return classes_[best];
}

namespace {

const Artifact& issue(const ArtifactSet& issues, const std::string& id) {
  const Artifact* a = issues.find(id);
  if (a == nullptr) throw Error(ErrorCode::not_found, "unknown issue '" + id + "'");
  return *a;
}

}  // namespace

TypeModel train_type_model(const ArtifactSet& issues, std::span<const TypedPair> pairs,
                           std::span<const std::size_t> rows, const EncodingConfig& enc,
                           const TypeTrainConfig& cfg) {
  std::map<std::string, std::size_t> counts;
  for (std::size_t r : rows) ++counts[pairs[r].label];
  if (counts.size() < 2)
    throw Error(ErrorCode::invalid_argument, "link type training needs at least two classes");
  if (std::count_if(counts.begin(), counts.end(), [](const auto& c) { return c.second >= 2; }) < 2)
    throw Error(ErrorCode::invalid_argument,
                "link type training needs two classes with at least two instances each");

  TypeModel m;
  for (const auto& [label, n] : counts) m.classes_.push_back(label);

  std::set<std::string> seen;
  std::vector<const Artifact*> train_issues;
  for (std::size_t r : rows)
    for (const auto* id : {&pairs[r].source_id, &pairs[r].target_id})
      if (seen.insert(*id).second) train_issues.push_back(&issue(issues, *id));
  m.encoder_ = TypedPairEncoder::fit(train_issues, enc);

  learn::FeatureMatrix x;
  x.names = m.encoder_.feature_names();
  for (std::size_t r : rows)
    x.add_row(m.encoder_.encode(issue(issues, pairs[r].source_id),
                                issue(issues, pairs[r].target_id)));
  std::vector<double> weights;
  if (cfg.class_weights) {
    const double n = static_cast<double>(rows.size());
    const double k = static_cast<double>(counts.size());
    for (std::size_t r : rows) weights.push_back(n / (k * counts[pairs[r].label]));
  }
  for (const auto& label : m.classes_) {
    std::vector<learn::Label> y;
    for (std::size_t r : rows)
      y.push_back(pairs[r].label == label ? learn::Label::link : learn::Label::no_link);
    m.one_vs_rest_.push_back(
        learn::train(x, y, learn::ClassifierKind::logistic_regression, cfg.train, weights));
  }
  return m;
}

TypeExperiment run_type_experiment(const ArtifactSet& issues,
                                   std::span<const TypedPair> pairs,
                                   const learn::SplitPlan& plan,
                                   const EncodingConfig& enc, const TypeTrainConfig& cfg,
                                   int jobs) {
  if (pairs.empty()) throw Error(ErrorCode::invalid_argument, "no typed pairs");
  std::vector<learn::Fold> folds;
  if (plan.kind == learn::SplitKind::kfold) {
    std::map<std::string, int> index;
    for (const auto& p : pairs) index.emplace(p.label, 0);
    int next = 0;
    for (auto& [label, i] : index) i = next++;
    std::vector<int> strata;
    for (const auto& p : pairs) strata.push_back(index[p.label]);
    folds = learn::stratified_kfold(strata, plan.k, plan.seed);
  } else {
    std::vector<std::pair<std::string, std::string>> ids;
    for (const auto& p : pairs) ids.emplace_back(p.source_id, p.target_id);
    folds.push_back(learn::timestamp_split(
        ids,
        [&](const std::string& id) -> std::optional<std::int64_t> {
          const Artifact* a = issues.find(id);
          return a ? a->created_at : std::nullopt;
        },
        plan.cutoff));
  }
  std::vector<std::vector<std::string>> predicted(folds.size());
  parallel_for(folds.size(), jobs, [&](std::size_t f) {
    TypeModel model = train_type_model(issues, pairs, folds[f].train, enc, cfg);
    for (std::size_t r : folds[f].test)
      predicted[f].push_back(
          model.predict(issue(issues, pairs[r].source_id), issue(issues, pairs[r].target_id)));
  });
  TypeExperiment out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t i = 0; i < folds[f].test.size(); ++i) {
      out.rows.push_back(folds[f].test[i]);
      out.gold.push_back(pairs[folds[f].test[i]].label);
      out.predicted.push_back(predicted[f][i]);
    }
  }
  if (out.rows.empty()) throw Error(ErrorCode::validation, "the split leaves no test pairs");
  out.report = eval::evaluate_types(out.predicted, out.gold);
  return out;
}

}  // namespace tracelab::linktype
