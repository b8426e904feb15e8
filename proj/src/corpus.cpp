// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "tracelab/csv.hpp"
#include "tracelab/error.hpp"

namespace fs = std::filesystem;

namespace tracelab {

std::string Artifact::content() const {
  if (title.empty()) return text;
  if (text.empty()) return title;
  return title + "\n" + text;
}

void ArtifactSet::add(Artifact artifact) {
  if (artifact.id.empty())
    throw Error(ErrorCode::validation, "artifact with empty id in " + name_);
  if (artifact.text.empty() && artifact.title.empty())
    throw Error(ErrorCode::validation,
                "artifact '" + artifact.id + "' has neither title nor text");
  if (by_id_.count(artifact.id) > 0)
    throw Error(ErrorCode::validation,
                "duplicate artifact id '" + artifact.id + "' in " + name_);
  by_id_.emplace(artifact.id, artifacts_.size());
  artifacts_.push_back(std::move(artifact));
}

const Artifact* ArtifactSet::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &artifacts_[it->second];
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::manual: return "manual";
    case Provenance::automatic: return "automatic";
    case Provenance::vetted_accept: return "vetted_accept";
    case Provenance::vetted_reject: return "vetted_reject";
  }
  return "automatic";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "manual") return Provenance::manual;
  if (s == "automatic") return Provenance::automatic;
  if (s == "vetted_accept") return Provenance::vetted_accept;
  if (s == "vetted_reject") return Provenance::vetted_reject;
  throw Error(ErrorCode::invalid_argument,
              "unknown provenance '" + std::string(s) + "'");
}

std::string make_link_id(std::string_view source_id, std::string_view target_id) {
  std::string id;
  id.reserve(source_id.size() + target_id.size() + 2);
  id.append(source_id).append("->").append(target_id);
  return id;
}

TraceLink make_link(std::string source_id, std::string target_id,
                    Provenance provenance, std::optional<double> score) {
  TraceLink link;
  link.id = make_link_id(source_id, target_id);
  link.source_id = std::move(source_id);
  link.target_id = std::move(target_id);
  link.provenance = provenance;
  link.score = score;
  link.is_protected = provenance == Provenance::manual ||
                      provenance == Provenance::vetted_accept;
  return link;
}

namespace {

void check_score(const TraceLink& link) {
  if (link.score && !(*link.score >= 0.0 && *link.score <= 1.0))
    throw Error(ErrorCode::validation,
                "link '" + link.id + "' has score outside [0,1]");
}

}  // namespace

void TraceMatrix::insert(TraceLink link) {
  check_score(link);
  Key key{link.source_id, link.target_id};
  if (links_.count(key) > 0)
    throw Error(ErrorCode::validation, "duplicate trace link " +
                                           link.source_id + " -> " +
                                           link.target_id);
  links_.emplace(std::move(key), std::move(link));
}

void TraceMatrix::update(const Key& key, TraceLink link) {
  check_score(link);
  auto it = links_.find(key);
  if (it == links_.end())
    throw Error(ErrorCode::not_found,
                "no trace link " + key.first + " -> " + key.second);
  Key new_key{link.source_id, link.target_id};
  if (new_key == key) {
    it->second = std::move(link);
    return;
  }
  if (links_.count(new_key) > 0)
    throw Error(ErrorCode::validation, "duplicate trace link " +
                                           new_key.first + " -> " +
                                           new_key.second);
  links_.erase(it);
  links_.emplace(std::move(new_key), std::move(link));
}

bool TraceMatrix::erase(const Key& key) { return links_.erase(key) > 0; }

const TraceLink* TraceMatrix::find(std::string_view source_id,
                                   std::string_view target_id) const {
  auto it = links_.find(Key{std::string(source_id), std::string(target_id)});
  return it == links_.end() ? nullptr : &it->second;
}

const TraceLink* TraceMatrix::find_by_id(std::string_view link_id) const {
  for (const auto& [key, link] : links_)
    if (link.id == link_id) return &link;
  return nullptr;
}

std::set<TraceMatrix::Key> TraceMatrix::pairs() const {
  std::set<Key> out;
  for (const auto& [key, link] : links_) out.insert(key);
  return out;
}

void Dataset::validate() const {
  std::vector<std::string> offenders;
  for (const auto& [key, link] : answers) {
    if (!sources.contains(key.first) || !targets.contains(key.second))
      offenders.push_back(key.first + " " + key.second);
  }
  if (offenders.empty()) return;
  std::string msg = "answer links reference unknown artifacts:";
  for (const auto& o : offenders) msg += "\n  " + o;
  throw Error(ErrorCode::validation, msg);
}

DatasetFormat dataset_format_from_string(std::string_view s) {
  if (s == "coest_dir" || s == "coest") return DatasetFormat::coest_dir;
  if (s == "csv_pair" || s == "csv") return DatasetFormat::csv_pair;
  throw Error(ErrorCode::invalid_argument,
              "unknown dataset format '" + std::string(s) + "'");
}

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::load, "cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void require_exists(const fs::path& path) {
  if (!fs::exists(path))
    throw Error(ErrorCode::load, "missing file: " + path.string());
}

ArtifactSet load_text_dir(const fs::path& dir, const std::string& name) {
  require_exists(dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ArtifactSet set(name);
  for (const auto& file : files) {
    Artifact a;
    a.id = file.stem().string();
    a.kind = name == "sources" ? "source" : "target";
    a.text = read_text(file);
    if (a.text.empty()) a.title = a.id;
    set.add(std::move(a));
  }
  return set;
}

TraceMatrix parse_pair_lines(const std::string& content) {
  TraceMatrix m;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream fields(t);
    std::string s, g;
    fields >> s >> g;
    if (g.empty())
      throw Error(ErrorCode::load, "malformed answer line: '" + t + "'");
    if (m.contains(s, g)) continue;
    m.insert(make_link(s, g, Provenance::manual));
  }
  return m;
}

TraceMatrix parse_answer_csv(const fs::path& path) {
  csv::Row header;
  auto rows = csv::read_file(path, {"source_id", "target_id"}, &header);
  int si = csv::column(header, "source_id");
  int ti = csv::column(header, "target_id");
  int li = csv::column(header, "type_label");
  TraceMatrix m;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) <= std::max(si, ti))
      throw Error(ErrorCode::load, path.string() + ": short row");
    TraceLink link = make_link(row[si], row[ti], Provenance::manual);
    if (li >= 0 && li < static_cast<int>(row.size()) && !row[li].empty())
      link.type_label = row[li];
    if (m.contains(link.source_id, link.target_id)) continue;
    m.insert(std::move(link));
  }
  return m;
}

ArtifactSet load_csv_set(const fs::path& path, const std::string& name) {
  require_exists(path);
  csv::Row header;
  auto rows = csv::read_file(path, {"id", "title", "text", "created_at",
                                    "metadata_json"},
                             &header);
  int idc = csv::column(header, "id");
  int tc = csv::column(header, "title");
  int xc = csv::column(header, "text");
  int cc = csv::column(header, "created_at");
  int mc = csv::column(header, "metadata_json");
  ArtifactSet set(name);
  for (const auto& row : rows) {
    auto field = [&](int c) -> std::string {
      return c < static_cast<int>(row.size()) ? row[c] : std::string();
    };
    Artifact a;
    a.id = field(idc);
    a.title = field(tc);
    a.text = field(xc);
    std::string created = trim(field(cc));
    if (!created.empty()) {
      try {
        std::size_t used = 0;
        a.created_at = std::stoll(created, &used);
        if (used != created.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error(ErrorCode::load, path.string() + ": bad created_at '" +
                                         created + "' for " + a.id);
      }
    }
    std::string meta = trim(field(mc));
    if (!meta.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(meta);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::load,
                    path.string() + ": bad metadata_json for " + a.id + ": " +
                        e.what());
      }
      if (!j.is_object())
        throw Error(ErrorCode::load,
                    path.string() + ": metadata_json must be an object");
      for (auto it = j.begin(); it != j.end(); ++it) {
        a.metadata[it.key()] =
            it.value().is_string() ? it.value().get<std::string>()
                                   : it.value().dump();
      }
    }
    auto kind = a.metadata.find("kind");
    a.kind = kind != a.metadata.end() ? kind->second
                                      : (name == "sources" ? "source" : "target");
    set.add(std::move(a));
  }
  return set;
}

}  // namespace

TraceMatrix load_answer_links(const fs::path& path) {
  require_exists(path);
  if (path.extension() == ".csv") return parse_answer_csv(path);
  return parse_pair_lines(read_text(path));
}

Dataset load_dataset(const fs::path& root, DatasetFormat format) {
  if (!fs::is_directory(root))
    throw Error(ErrorCode::load, "dataset directory not found: " + root.string());
  Dataset d;
  if (format == DatasetFormat::coest_dir) {
    d.sources = load_text_dir(root / "sources", "sources");
    d.targets = load_text_dir(root / "targets", "targets");
    require_exists(root / "answers.txt");
    d.answers = parse_pair_lines(read_text(root / "answers.txt"));
  } else {
    d.sources = load_csv_set(root / "sources.csv", "sources");
    d.targets = load_csv_set(root / "targets.csv", "targets");
    require_exists(root / "answers.csv");
    d.answers = parse_answer_csv(root / "answers.csv");
  }
  d.validate();
  return d;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << content;
}

void save_csv_set(const ArtifactSet& set, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  csv::write_row(out, {"id", "title", "text", "created_at", "metadata_json"});
  for (const auto& a : set) {
    std::string meta;
    if (!a.metadata.empty()) {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& [k, v] : a.metadata) j[k] = v;
      meta = j.dump();
    }
    csv::write_row(out, {a.id, a.title, a.text,
                         a.created_at ? std::to_string(*a.created_at) : "",
                         meta});
  }
}

}  // namespace

void save_dataset(const Dataset& dataset, const fs::path& root,
                  DatasetFormat format) {
  fs::create_directories(root);
  if (format == DatasetFormat::coest_dir) {
    fs::create_directories(root / "sources");
    fs::create_directories(root / "targets");
    for (const auto& a : dataset.sources)
      write_file(root / "sources" / (a.id + ".txt"), a.text);
    for (const auto& a : dataset.targets)
      write_file(root / "targets" / (a.id + ".txt"), a.text);
    std::string answers;
    for (const auto& [key, link] : dataset.answers)
      answers += key.first + " " + key.second + "\n";
    write_file(root / "answers.txt", answers);
    return;
  }
  save_csv_set(dataset.sources, root / "sources.csv");
  save_csv_set(dataset.targets, root / "targets.csv");
  std::ofstream out(root / "answers.csv", std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write answers.csv");
  csv::write_row(out, {"source_id", "target_id", "type_label"});
  for (const auto& [key, link] : dataset.answers)
    csv::write_row(out, {key.first, key.second, link.type_label.value_or("")});
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
  auto it = index.find(std::string(term));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

Vocabulary make_vocabulary(std::vector<std::string> terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  Vocabulary v;
  v.terms = std::move(terms);
  for (std::size_t i = 0; i < v.terms.size(); ++i) v.index.emplace(v.terms[i], i);
  return v;
}

Vocabulary build_vocabulary(const std::vector<const ArtifactSet*>& sets,
                            const PreprocessConfig& cfg) {
  std::set<std::string> seen;
  for (const ArtifactSet* set : sets) {
    for (const auto& a : *set)
      for (auto& tok : preprocess(a.content(), cfg)) seen.insert(std::move(tok));
  }
  return make_vocabulary(std::vector<std::string>(seen.begin(), seen.end()));
}

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::load: return "load";
    case ErrorCode::validation: return "validation";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::io: return "io";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::incompatible: return "incompatible";
  }
  return "unknown";
}

}  // namespace tracelab

namespace tracelab {

void write_matrix_csv(std::ostream& out, const TraceMatrix& matrix) {
  csv::write_row(out, {"id", "source_id", "target_id", "type_label", "score",
                       "provenance", "protected", "flags", "history"});
  for (const auto& [key, link] : matrix) {
    std::string flags;
    for (const auto& f : link.flags) {
      if (!flags.empty()) flags += ';';
      flags += f;
    }
    nlohmann::json history = nlohmann::json::array();
    for (const auto& h : link.history) history.push_back({h.timestamp, h.event});
    std::string score;
    if (link.score) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, *link.score);
      score.assign(buf, res.ptr);
    }
    csv::write_row(out, {link.id, link.source_id, link.target_id,
                         link.type_label.value_or(""), score,
                         to_string(link.provenance), link.is_protected ? "true" : "false",
                         flags, history.dump()});
  }
}

void save_matrix_csv(const TraceMatrix& matrix, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  write_matrix_csv(out, matrix);
}

TraceMatrix load_matrix_csv(const fs::path& path) {
  require_exists(path);
  csv::Row header;
  auto rows = csv::read_file(path, {"source_id", "target_id"}, &header);
  auto col = [&](const char* name) { return csv::column(header, name); };
  const int idc = col("id"), sc = col("source_id"), tc = col("target_id"),
            lc = col("type_label"), scc = col("score"), pc = col("provenance"),
            prc = col("protected"), fc = col("flags"), hc = col("history");
  TraceMatrix m;
  for (const auto& row : rows) {
    auto field = [&](int c) -> std::string {
      return c >= 0 && c < static_cast<int>(row.size()) ? row[c] : std::string();
    };
    Provenance prov = field(pc).empty() ? Provenance::automatic
                                        : provenance_from_string(field(pc));
    TraceLink link = make_link(field(sc), field(tc), prov);
    if (link.source_id.empty() || link.target_id.empty())
      throw Error(ErrorCode::load, path.string() + ": row without endpoints");
    if (!field(idc).empty()) link.id = field(idc);
    if (!field(lc).empty()) link.type_label = field(lc);
    if (std::string s = field(scc); !s.empty()) {
      double v = 0.0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::load, path.string() + ": bad score '" + s + "'");
      link.score = v;
    }
    if (std::string p = field(prc); !p.empty()) link.is_protected = p == "true" || p == "1";
    if (std::string f = field(fc); !f.empty()) {
      std::size_t start = 0;
      while (start <= f.size()) {
        std::size_t end = f.find(';', start);
        if (end == std::string::npos) end = f.size();
        if (end > start) link.flags.insert(f.substr(start, end - start));
        start = end + 1;
      }
    }
    if (std::string h = field(hc); !h.empty()) {
      try {
        for (const auto& e : nlohmann::json::parse(h))
          link.history.push_back({e.at(0).get<std::int64_t>(), e.at(1).get<std::string>()});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::load, path.string() + ": bad history: " + e.what());
      }
    }
    m.insert(std::move(link));
  }
  return m;
}

std::string iso8601_utc(std::int64_t seconds_since_epoch) {
  std::time_t t = static_cast<std::time_t>(seconds_since_epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::int64_t parse_iso8601_utc(std::string_view text) {
  std::string t = trim(text);
  std::tm tm{};
  for (const char* fmt : {"%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"}) {
    std::istringstream in(t);
    in >> std::get_time(&tm, fmt);
    if (in.fail()) continue;
    std::string rest;
    std::getline(in, rest);
    if (rest.empty() || rest == "Z") return static_cast<std::int64_t>(timegm(&tm));
  }
  throw Error(ErrorCode::invalid_argument, "bad ISO-8601 timestamp '" + t + "'");
}

}  // namespace tracelab
