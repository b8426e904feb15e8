// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tracelab/error.hpp"
#include "tracelab/text.hpp"

namespace tracelab {
namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Non-ASCII bytes are kept inside tokens so UTF-8 words survive intact.
bool is_token_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

}  // namespace

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words{
      "a",       "about",   "above",  "after",   "again",   "against", "all",
      "also",    "am",      "an",     "and",     "any",     "are",     "as",
      "at",      "be",      "because", "been",   "before",  "being",   "below",
      "between", "both",    "but",    "by",      "can",     "could",   "did",
      "do",      "does",    "doing",  "down",    "during",  "each",    "either",
      "etc",     "few",     "for",    "from",    "further", "had",     "has",
      "have",    "having",  "he",     "her",     "here",    "hers",    "him",
      "his",     "how",     "i",      "if",      "in",      "into",    "is",
      "it",      "its",     "itself", "may",     "me",      "might",   "more",
      "most",    "must",    "my",     "no",      "nor",     "not",     "of",
      "off",     "on",      "once",   "only",    "or",      "other",   "our",
      "ours",    "out",     "over",   "own",     "same",    "shall",   "she",
      "should",  "so",      "some",   "such",    "than",    "that",    "the",
      "their",   "theirs",  "them",   "then",    "there",   "these",   "they",
      "this",    "those",   "through", "to",     "too",     "under",   "until",
      "up",      "upon",    "very",   "via",     "was",     "we",      "were",
      "what",    "when",    "where",  "whether", "which",   "while",   "who",
      "whom",    "why",     "will",   "with",    "within",  "would",   "you",
      "your",    "yours"};
  return words;
}

PreprocessConfig PreprocessConfig::defaults() {
  PreprocessConfig cfg;
  cfg.stopwords = default_stopwords();
  return cfg;
}

PreprocessConfig PreprocessConfig::raw() {
  PreprocessConfig cfg;
  cfg.lowercase = false;
  cfg.split_identifiers = false;
  cfg.remove_stopwords = false;
  cfg.stem = false;
  cfg.min_token_len = 1;
  return cfg;
}

void PreprocessConfig::validate() const {
  if (min_token_len < 1)
    throw Error(ErrorCode::invalid_argument, "min_token_len must be >= 1");
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string split_identifiers(std::string_view text) {
  std::string out;
  out.reserve(text.size() + text.size() / 4);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '_') {
      out.push_back(' ');
      continue;
    }
    if (i > 0 && is_upper(c)) {
      char prev = text[i - 1];
      bool next_lower = i + 1 < text.size() && is_lower(text[i + 1]);
      // fooBar, foo2Bar, HTTPServer -> HTTP Server
      if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower))
        out.push_back(' ');
    }
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> preprocess(std::string_view text,
                                    const PreprocessConfig& cfg) {
  cfg.validate();
  std::string buffer =
      cfg.split_identifiers ? split_identifiers(text) : std::string(text);
  if (cfg.lowercase) buffer = to_lower(buffer);

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < buffer.size()) {
    while (i < buffer.size() && !is_token_char(buffer[i])) ++i;
    std::size_t start = i;
    while (i < buffer.size() && is_token_char(buffer[i])) ++i;
    if (i == start) continue;
    std::string token = buffer.substr(start, i - start);

    if (cfg.remove_stopwords && cfg.stopwords.count(token) > 0) continue;
    if (auto it = cfg.synonyms.find(token); it != cfg.synonyms.end())
      token = it->second;
    if (static_cast<int>(token.size()) < cfg.min_token_len) continue;
    if (cfg.stem) token = porter_stem(token);
    tokens.push_back(std::move(token));
  }
  return tokens;
}

}  // namespace tracelab
