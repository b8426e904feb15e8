// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <fstream>

#include <json.hpp>

#include "tracelab/error.hpp"
#include "tracelab/ir.hpp"

using nlohmann::json;

namespace tracelab::ir {
namespace {

constexpr const char* kFormat = "tracelab-ir-model";

json to_json(const PreprocessConfig& c) {
  return {{"lowercase", c.lowercase},
          {"split_identifiers", c.split_identifiers},
          {"remove_stopwords", c.remove_stopwords},
          {"stopwords", c.stopwords},
          {"stem", c.stem},
          {"min_token_len", c.min_token_len},
          {"synonyms", c.synonyms}};
}

PreprocessConfig preprocess_from_json(const json& j) {
  PreprocessConfig c;
  c.lowercase = j.at("lowercase").get<bool>();
  c.split_identifiers = j.at("split_identifiers").get<bool>();
  c.remove_stopwords = j.at("remove_stopwords").get<bool>();
  c.stopwords = j.at("stopwords").get<std::set<std::string>>();
  c.stem = j.at("stem").get<bool>();
  c.min_token_len = j.at("min_token_len").get<int>();
  c.synonyms = j.at("synonyms").get<std::map<std::string, std::string>>();
  return c;
}

json to_json(const Vectorizer& v) {
  return {{"preprocess", to_json(v.preprocess)},
          {"vocabulary", v.vocabulary.terms},
          {"idf", v.idf},
          {"weighting", to_string(v.weighting)}};
}

Vectorizer vectorizer_from_json(const json& j) {
  Vectorizer v;
  v.preprocess = preprocess_from_json(j.at("preprocess"));
  v.vocabulary = make_vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
  v.idf = j.at("idf").get<std::vector<double>>();
  v.weighting = weighting_from_string(j.at("weighting").get<std::string>());
  if (v.idf.size() != v.vocabulary.size())
    throw Error(ErrorCode::load, "model dump: idf/vocabulary size mismatch");
  return v;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  Eigen::MatrixXd m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const json& data = j.at("data");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const json& row = data.at(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json to_json(const SparseVector& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back({e.index, e.value});
  return out;
}

SparseVector sparse_from_json(const json& j) {
  SparseVector v;
  for (const auto& e : j) v.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
  return v;
}

void write(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write model to " + path.string());
  out << j.dump() << '\n';
}

json read(const std::filesystem::path& path, const std::string& kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::load, "cannot open model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::load, path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormat)
    throw Error(ErrorCode::version_mismatch, path.string() + " is not a model dump");
  int version = j.value("version", -1);
  if (version != kModelFormatVersion)
    throw Error(ErrorCode::version_mismatch,
                path.string() + ": model version " + std::to_string(version) +
                    ", expected " + std::to_string(kModelFormatVersion));
  if (j.value("kind", "") != kind)
    throw Error(ErrorCode::version_mismatch,
                path.string() + ": holds a '" + j.value("kind", "") +
                    "' model, expected '" + kind + "'");
  return j;
}

json header(const char* kind) {
  return {{"format", kFormat}, {"version", kModelFormatVersion}, {"kind", kind}};
}

}  // namespace

void save_model(const TermDocMatrix& index, const std::filesystem::path& path) {
  json j = header("vsm");
  j["vectorizer"] = to_json(index.vectorizer);
  j["doc_ids"] = index.doc_ids;
  j["doc_lengths"] = index.doc_lengths;
  json cols = json::array();
  json counts = json::array();
  for (const auto& c : index.columns) cols.push_back(to_json(c));
  for (const auto& c : index.counts) counts.push_back(to_json(c));
  j["columns"] = std::move(cols);
  j["counts"] = std::move(counts);
  write(j, path);
}

void save_model(const LsiModel& model, const std::filesystem::path& path) {
  json j = header("lsi");
  j["vectorizer"] = to_json(model.vectorizer);
  j["doc_ids"] = model.doc_ids;
  j["k"] = model.k;
  j["term_factors"] = to_json(model.term_factors);
  j["doc_factors"] = to_json(model.doc_factors);
  j["singular_values"] = to_json(Eigen::MatrixXd(model.singular_values));
  write(j, path);
}

void save_model(const LdaModel& model, const std::filesystem::path& path) {
  json j = header("lda");
  j["vectorizer"] = to_json(model.vectorizer);
  j["doc_ids"] = model.doc_ids;
  j["k"] = model.k;
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["iterations"] = model.iterations;
  j["inference_iterations"] = model.inference_iterations;
  j["seed"] = model.seed;
  j["theta"] = to_json(model.theta);
  j["phi"] = to_json(model.phi);
  write(j, path);
}

TermDocMatrix load_index(const std::filesystem::path& path) {
  json j = read(path, "vsm");
  TermDocMatrix m;
  m.vectorizer = vectorizer_from_json(j.at("vectorizer"));
  m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  m.doc_lengths = j.at("doc_lengths").get<std::vector<std::size_t>>();
  for (const auto& c : j.at("columns")) m.columns.push_back(sparse_from_json(c));
  for (const auto& c : j.at("counts")) m.counts.push_back(sparse_from_json(c));
  return m;
}

LsiModel load_lsi(const std::filesystem::path& path) {
  json j = read(path, "lsi");
  LsiModel m;
  m.vectorizer = vectorizer_from_json(j.at("vectorizer"));
  m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  m.k = j.at("k").get<int>();
  m.term_factors = matrix_from_json(j.at("term_factors"));
  m.doc_factors = matrix_from_json(j.at("doc_factors"));
  m.singular_values = matrix_from_json(j.at("singular_values")).col(0);
  return m;
}

LdaModel load_lda(const std::filesystem::path& path) {
  json j = read(path, "lda");
  LdaModel m;
  m.vectorizer = vectorizer_from_json(j.at("vectorizer"));
  m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  m.k = j.at("k").get<int>();
  m.alpha = j.at("alpha").get<double>();
  m.beta = j.at("beta").get<double>();
  m.iterations = j.at("iterations").get<int>();
  m.inference_iterations = j.at("inference_iterations").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.theta = matrix_from_json(j.at("theta"));
  m.phi = matrix_from_json(j.at("phi"));
  return m;
}

}  // namespace tracelab::ir
