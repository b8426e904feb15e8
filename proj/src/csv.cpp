// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include "tracelab/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "tracelab/error.hpp"

namespace tracelab::csv {

std::vector<Row> parse(std::string_view content) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::load, "unterminated quoted CSV field");
  if (!field.empty() || !row.empty() || field_started) end_row();
  return rows;
}

std::vector<Row> read_file(const std::filesystem::path& path,
                           const std::vector<std::string>& required,
                           Row* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::load, "cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<Row> rows = parse(buf.str());
  if (rows.empty())
    throw Error(ErrorCode::load, "missing CSV header in " + path.string());
  Row head = std::move(rows.front());
  rows.erase(rows.begin());
  for (const auto& name : required) {
    if (column(head, name) < 0)
      throw Error(ErrorCode::load,
                  path.string() + ": missing column '" + name + "'");
  }
  if (header != nullptr) *header = std::move(head);
  return rows;
}

std::string escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

int column(const Row& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace tracelab::csv
