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

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include "fliprag/corpus.hpp"
#include "fliprag/retrieval.hpp"

namespace fliprag {

enum class ResponsePolicy { stance_oracle, external_llm };
enum class LeakPolicy { leaks_verbatim, refuses };

// The context-extraction instruction an attacker appends to a query.
std::string leak_instruction(const std::string& query);

struct LeakVariant {
  std::string tag;
  std::string text;
};

// The instruction and three rewordings meant to slip past detectors:
// origin, benign_statement, simple, benign_simple.
std::vector<LeakVariant> leak_instruction_variants(const std::string& query);

// Patterns recognised as a request to reproduce the context. Matching is
// case-insensitive; the default set covers the copy instruction and its
// shortened and softened rewordings.
const std::vector<std::string>& default_leak_patterns();

// Plurality over context stances (unlabeled documents count as neutral).
// A tie for first place, in particular equal pro and con counts, gives
// neutral.
Stance stance_oracle(std::span<const Stance> stances);

std::string_view stance_word(Stance s);

struct HttpEndpoint {
  std::string url;
  std::string method = "POST";
  // "${NAME}" in a value is read from the environment at request time.
  std::map<std::string, std::string> headers;
  // JSON body; {{query}}, {{context}} and {{text}} are replaced by the
  // JSON-escaped values.
  std::string body_template;
  // JSON pointer to the reply text, e.g. "/choices/0/message/content".
  std::string response_path = "/text";
  int timeout_ms = 5000;
  std::size_t retries = 2;
};

struct ExternalConfig {
  HttpEndpoint chat;
  std::optional<HttpEndpoint> classifier;
  // Classifier label -> stance; labels are compared case-insensitively.
  std::map<std::string, Stance> labels = {{"con", kCon}, {"neutral", kNeutral},
                                          {"pro", kPro}};
};

struct RagConfig {
  std::size_t k = 3;
  std::size_t leak_k = 10;
  ResponsePolicy response_policy = ResponsePolicy::stance_oracle;
  LeakPolicy leak_policy = LeakPolicy::leaks_verbatim;
  std::vector<std::string> leak_patterns = default_leak_patterns();

  void validate() const;
};

struct RagResponse {
  std::string query;
  std::vector<std::string> context_ids;
  Stance stance = kNeutral;
  std::string text;
  std::optional<std::vector<std::string>> leaked_context;
  // Set when the stance could not be obtained and defaulted to neutral.
  bool stance_defaulted = false;
};

class RagInternals;

// Query-only RAG facade. Holders can ask questions and nothing else: the
// retriever and corpus behind it are not reachable through this type.
class RagSystem {
 public:
  // Copies share the (immutable) retriever.
  RagSystem(std::shared_ptr<const Retriever> retriever, RagConfig config);

  RagResponse answer(const std::string& query) const;
  RagResponse query_with_instruction(const std::string& query,
                                     const std::string& instruction) const;
  // Answers through the configured HTTP chat endpoint instead of the oracle.
  RagResponse external_answer(const std::string& query,
                              const ExternalConfig& endpoint,
                              const std::string& instruction = {}) const;

  std::size_t k() const { return config_.k; }
  std::size_t leak_k() const { return config_.leak_k; }
  LeakPolicy leak_policy() const { return config_.leak_policy; }
  bool is_leak_instruction(const std::string& instruction) const;

 private:
  friend class RagInternals;

  RagResponse respond(const std::string& query, const Ranking& top) const;
  void compile_patterns();

  std::shared_ptr<const Retriever> retriever_;
  RagConfig config_;
  std::vector<std::regex> patterns_;
};

// One request to `endpoint` with the template slots filled from `vars`;
// returns the string at the endpoint's response path. Transport failures and
// 5xx replies are retried, then raise RetryableError; other bad replies
// raise ProtocolError.
std::string http_complete(const HttpEndpoint& endpoint,
                          const std::map<std::string, std::string>& vars);

// Parses "[[ ... ]]" blocks of a reply; each block is split on blank lines
// into passages.
std::vector<std::string> parse_leaked_blocks(const std::string& reply);

}  // namespace fliprag
