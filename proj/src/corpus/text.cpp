// Copyright 2026 The fliprag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fliprag/text.hpp"

#include <algorithm>
#include <unordered_set>

namespace fliprag {

namespace {

bool is_alnum_ascii(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

char lower_ascii(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                : static_cast<char>(c);
}

const std::unordered_set<std::string>& stopword_set() {
  static const std::unordered_set<std::string> set(stopwords().begin(),
                                                   stopwords().end());
  return set;
}

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_alnum_ascii(c)) {
      cur.push_back(lower_ascii(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_tokens(const TokenList& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

const std::vector<std::string>& stopwords() {
  static const std::vector<std::string> words = {
      "a",     "about", "above", "after", "all",   "also",  "an",    "and",
      "any",   "are",   "as",    "at",    "be",    "been",  "being", "but",
      "by",    "can",   "could", "do",    "does",  "for",   "from",  "had",
      "has",   "have",  "how",   "if",    "in",    "into",  "is",    "it",
      "its",   "may",   "more",  "most",  "must",  "no",    "not",   "of",
      "on",    "or",    "other", "our",   "should", "so",   "some",  "such",
      "than",  "that",  "the",   "their", "them",  "then",  "there", "these",
      "they",  "this",  "those", "to",    "under", "up",    "was",   "we",
      "were",  "what",  "when",  "which", "while", "who",   "will",  "with",
      "would", "you"};
  return words;
}

bool is_stopword(std::string_view token) {
  return stopword_set().count(std::string(token)) != 0;
}

TokenList content_tokens(const TokenList& tokens) {
  TokenList out;
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
               [](const std::string& t) { return !is_stopword(t); });
  return out;
}

}  // namespace fliprag
