// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tracelab {

/// Text normalization settings shared by every engine.
///
/// Stages run in a fixed order: lowercase, identifier split, tokenization on
/// non-alphanumeric characters, stopword removal, synonym replacement, length
/// filter, stemming. Identifier boundaries (camelCase) are detected on the
/// original casing so that lowercasing does not erase them.
struct PreprocessConfig {
  bool lowercase = true;
  bool split_identifiers = true;
  bool remove_stopwords = true;
  std::set<std::string> stopwords;
  bool stem = true;
  int min_token_len = 2;
  /// Optional thesaurus: a token equal to a key is replaced by the value.
  std::map<std::string, std::string> synonyms;

  /// Defaults with the built-in English stopword list.
  static PreprocessConfig defaults();
  /// Every stage disabled except tokenization; min_token_len = 1.
  static PreprocessConfig raw();

  void validate() const;
};

const std::set<std::string>& default_stopwords();

std::vector<std::string> preprocess(std::string_view text,
                                    const PreprocessConfig& cfg);

/// Splits camelCase / PascalCase / snake_case boundaries by inserting spaces.
std::string split_identifiers(std::string_view text);

/// Porter (1980) suffix-stripping stemmer. Input is expected lowercase.
std::string porter_stem(std::string_view word);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace tracelab
