// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "tracelab/error.hpp"
#include "tracelab/text.hpp"

namespace tracelab {

namespace {

const std::set<std::string_view>& keys() {
  static const std::set<std::string_view> k{
      // shared
      "dataset", "format", "seed", "jobs", "out", "timestamp",
      // preprocessing
      "lowercase", "split_identifiers", "remove_stopwords", "stopwords_file", "stem",
      "min_token_len", "synonyms_file",
      // recovery
      "engine", "measure", "mode", "source_id", "target_id", "threshold", "top_k",
      "weighting", "lsi_k", "lda_topics", "lda_iterations", "lda_alpha", "lda_beta",
      "lda_inference_iterations", "classifier", "learning_rate", "epochs", "l2",
      "standardize",
      // eval
      "pred", "gold", "beta", "k",
      // maintain
      "old", "new", "matrix", "tim", "vetted", "weight_validity", "weight_completeness",
      "weight_correctness",
      // classify-types
      "issues", "links", "label_rules", "split", "folds", "cutoff", "class_weights",
      "text_features", "metadata_features", "relational_features",
      // explain
      "glossary", "blacklist", "triplets", "frames", "naive_frames", "domain",
      // serve
      "host", "port", "store"};
  return k;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::load, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

bool RunConfig::known_key(std::string_view key) { return keys().count(key) > 0; }

RunConfig RunConfig::load(const std::filesystem::path& path) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::invalid_argument,
                  "line " + std::to_string(n) + ": expected key=value");
    c.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return c;
}

void RunConfig::set(const std::string& key, std::string value) {
  if (!known_key(key)) throw Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
  values_[key] = std::move(value);
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string RunConfig::get_or(const std::string& key, std::string fallback) const {
  return get(key).value_or(std::move(fallback));
}

std::string RunConfig::require(const std::string& key) const {
  auto v = get(key);
  if (!v || v->empty()) throw Error(ErrorCode::invalid_argument, "missing required setting '" + key + "'");
  return *v;
}

std::optional<double> RunConfig::get_double(const std::string& key) const {
  auto v = get(key);
  if (!v || v->empty()) return std::nullopt;
  double out = 0.0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size())
    throw Error(ErrorCode::invalid_argument, key + ": not a number: '" + *v + "'");
  return out;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  return get_double(key).value_or(fallback);
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = get(key);
  if (!v || v->empty()) return fallback;
  std::int64_t out = 0;
  auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size())
    throw Error(ErrorCode::invalid_argument, key + ": not an integer: '" + *v + "'");
  return out;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v || v->empty()) return fallback;
  std::string s = to_lower(*v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::invalid_argument, key + ": not a boolean: '" + *v + "'");
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

PreprocessConfig preprocess_config(const RunConfig& c) {
  PreprocessConfig p = PreprocessConfig::defaults();
  p.lowercase = c.get_bool("lowercase", p.lowercase);
  p.split_identifiers = c.get_bool("split_identifiers", p.split_identifiers);
  p.remove_stopwords = c.get_bool("remove_stopwords", p.remove_stopwords);
  p.stem = c.get_bool("stem", p.stem);
  p.min_token_len = static_cast<int>(c.get_int("min_token_len", p.min_token_len));
  if (auto f = c.get("stopwords_file"); f && !f->empty()) {
    std::istringstream in(read_file(*f));
    p.stopwords.clear();
    std::string w;
    while (in >> w) p.stopwords.insert(to_lower(w));
  }
  if (auto f = c.get("synonyms_file"); f && !f->empty()) {
    std::istringstream in(read_file(*f));
    std::string line;
    while (std::getline(in, line)) {
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::load, *f + ": expected term=replacement");
      p.synonyms[to_lower(trim(t.substr(0, eq)))] = to_lower(trim(t.substr(eq + 1)));
    }
  }
  p.validate();
  return p;
}

tlr::RecoveryConfig recovery_config(const RunConfig& c) {
  tlr::RecoveryConfig r;
  r.engine = tlr::engine_from_string(c.get_or("engine", "vsm"));
  r.measure = ir::measure_from_string(c.get_or("measure", "cosine"));
  r.mode = tlr::mode_from_string(c.get_or("mode", "full_matrix"));
  r.source_id = c.get_or("source_id", "");
  r.threshold = c.get_double("threshold");
  if (auto k = c.get_int("top_k", 0); k != 0) {
    if (k < 0) throw Error(ErrorCode::invalid_argument, "top_k must be >= 1");
    r.top_k = static_cast<std::size_t>(k);
  }
  r.preprocess = preprocess_config(c);
  r.weighting = ir::weighting_from_string(c.get_or("weighting", "tfidf"));
  r.lsi_k = static_cast<int>(c.get_int("lsi_k", 0));
  r.lda.topics = static_cast<int>(c.get_int("lda_topics", r.lda.topics));
  r.lda.iterations = static_cast<int>(c.get_int("lda_iterations", r.lda.iterations));
  r.lda.alpha = c.get_double("lda_alpha", r.lda.alpha);
  r.lda.beta = c.get_double("lda_beta", r.lda.beta);
  r.lda.inference_iterations =
      static_cast<int>(c.get_int("lda_inference_iterations", r.lda.inference_iterations));
  r.classifier = learn::classifier_kind_from_string(c.get_or("classifier", "logistic_regression"));
  r.train.learning_rate = c.get_double("learning_rate", r.train.learning_rate);
  r.train.epochs = static_cast<int>(c.get_int("epochs", r.train.epochs));
  r.train.l2 = c.get_double("l2", r.train.l2);
  r.train.standardize = c.get_bool("standardize", r.train.standardize);
  r.seed = static_cast<std::uint64_t>(c.get_int("seed", 1));
  r.train.seed = r.seed;
  r.lda.seed = r.seed;
  r.jobs = static_cast<int>(c.get_int("jobs", 0));
  r.validate();
  return r;
}

explain::Resources explain_resources(const RunConfig& c) {
  explain::Resources r;
  if (auto f = c.get("glossary"); f && !f->empty()) r.glossary = explain::load_glossary(*f);
  if (auto f = c.get("blacklist"); f && !f->empty()) r.blacklist = explain::load_blacklist(*f);
  if (auto f = c.get("triplets"); f && !f->empty())
    for (auto& t : explain::load_triplets(*f)) r.graph.add(std::move(t));
  if (auto f = c.get("frames"); f && !f->empty()) r.frames = explain::load_frames(*f);
  r.naive_frames = c.get_bool("naive_frames", false);
  return r;
}

std::int64_t run_timestamp(const RunConfig& c) {
  if (c.has("timestamp")) return c.get_int("timestamp", 0);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    std::int64_t v = 0;
    std::string_view s(env);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
  }
  return 0;
}

}  // namespace tracelab
