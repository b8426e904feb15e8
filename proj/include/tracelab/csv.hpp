// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tracelab::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// line breaks. A trailing CR on each record is dropped.
std::vector<Row> parse(std::string_view content);

/// Reads a file with a header row; fails if any header in `required` is
/// missing. Returns the rows (header excluded) and fills `header`.
std::vector<Row> read_file(const std::filesystem::path& path,
                           const std::vector<std::string>& required,
                           Row* header);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

/// Column index of `name` in `header`, or -1.
int column(const Row& header, std::string_view name);

}  // namespace tracelab::csv
