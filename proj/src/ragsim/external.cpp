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

// HTTP bridge to an external chat model and stance classifier.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <regex>

#include "fliprag/error.hpp"
#include "fliprag/ragsim.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fliprag {

namespace {

using Vars = std::map<std::string, std::string>;

std::string json_escape(const std::string& s) {
  std::string d = nlohmann::json(s).dump();
  return d.substr(1, d.size() - 2);
}

std::string fill(std::string tpl, const Vars& vars) {
  for (const auto& [name, value] : vars) {
    const std::string slot = "{{" + name + "}}";
    const std::string escaped = json_escape(value);
    for (auto pos = tpl.find(slot); pos != std::string::npos;
         pos = tpl.find(slot, pos + escaped.size())) {
      tpl.replace(pos, slot.size(), escaped);
    }
  }
  return tpl;
}

// "${NAME}" in a header value is replaced by the environment variable NAME,
// so credentials stay out of config files.
std::string expand_env(const std::string& value) {
  static const std::regex kVar(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)\})");
  std::string out;
  auto begin = value.cbegin();
  std::smatch m;
  while (std::regex_search(begin, value.cend(), m, kVar)) {
    const char* env = std::getenv(m[1].str().c_str());
    if (!env) throw InvalidArgument("environment variable " + m[1].str() + " is not set");
    out.append(begin, m[0].first);
    out += env;
    begin = m[0].second;
  }
  out.append(begin, value.cend());
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Sends one request, retrying transport failures and 5xx replies, and
// returns the string found at the endpoint's response path.
std::string call(const HttpEndpoint& ep, const Vars& vars) {
  static const std::regex kUrl(R"(^(http://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(ep.url, m, kUrl)) {
    throw InvalidArgument("unsupported endpoint url '" + ep.url + "' (http:// only)");
  }
  const std::string path = m[2].matched ? m[2].str() : "/";
  httplib::Client cli(m[1].str());
  const auto secs = ep.timeout_ms / 1000;
  const auto usecs = (ep.timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  for (const auto& [k, v] : ep.headers) headers.emplace(k, expand_env(v));
  const std::string body = fill(ep.body_template, vars);

  std::string last;
  const std::size_t attempts = ep.retries + 1;
  for (std::size_t a = 0; a < attempts; ++a) {
    httplib::Result res = lower(ep.method) == "get"
                              ? cli.Get(path, headers)
                              : cli.Post(path, headers, body, "application/json");
    if (!res) {
      last = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status >= 400) {
      throw ProtocolError(ep.url + ": HTTP " + std::to_string(res->status));
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(ep.url + ": reply is not JSON: " + e.what());
    }
    try {
      const auto& v = doc.at(nlohmann::json::json_pointer(ep.response_path));
      if (!v.is_string()) throw ProtocolError(ep.url + ": " + ep.response_path + " is not a string");
      return v.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(ep.url + ": missing " + ep.response_path + ": " + e.what());
    }
  }
  throw RetryableError(ep.url + ": " + last, attempts);
}

}  // namespace

std::string http_complete(const HttpEndpoint& endpoint,
                          const std::map<std::string, std::string>& vars) {
  return call(endpoint, vars);
}

std::vector<std::string> parse_leaked_blocks(const std::string& reply) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = reply.find("[[", pos);
    if (open == std::string::npos) break;
    const auto close = reply.find("]]", open + 2);
    if (close == std::string::npos) break;
    const std::string block = reply.substr(open + 2, close - open - 2);
    std::size_t start = 0;
    while (start <= block.size()) {
      auto end = block.find("\n\n", start);
      if (end == std::string::npos) end = block.size();
      std::string piece = block.substr(start, end - start);
      const auto b = piece.find_first_not_of(" \t\n");
      if (b != std::string::npos) {
        const auto e = piece.find_last_not_of(" \t\n");
        out.push_back(piece.substr(b, e - b + 1));
      }
      start = end + 2;
    }
    pos = close + 2;
  }
  return out;
}

RagResponse RagSystem::external_answer(const std::string& query,
                                       const ExternalConfig& endpoint,
                                       const std::string& instruction) const {
  if (config_.response_policy != ResponsePolicy::external_llm) {
    throw InvalidArgument("external_answer needs response_policy = external_llm");
  }
  const Corpus& corpus = retriever_->corpus();
  if (corpus.empty()) throw InvalidArgument("corpus is empty");
  // A leak request puts the longer prefix into the prompt so the model can
  // reveal it; otherwise the model sees the usual top-k.
  const bool leak = !instruction.empty() && is_leak_instruction(instruction);
  const Ranking top = retriever_->rank(tokenize(query), leak ? config_.leak_k : config_.k);

  RagResponse r;
  r.query = query;
  std::string context;
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (i < config_.k) r.context_ids.push_back(top.entries[i].doc_id);
    if (!context.empty()) context += "\n\n";
    context += corpus.at(top.entries[i].doc_id).text();
  }
  const std::string prompt = instruction.empty() ? query : query + "\n" + instruction;
  r.text = call(endpoint.chat, {{"query", prompt}, {"context", context}});

  if (endpoint.classifier) {
    const std::string label =
        lower(call(*endpoint.classifier, {{"text", r.text}, {"query", query}}));
    bool found = false;
    for (const auto& [name, stance] : endpoint.labels) {
      if (lower(name) == label) {
        r.stance = stance;
        found = true;
      }
    }
    if (!found) throw ProtocolError("classifier returned unknown label '" + label + "'");
  } else {
    r.stance = kNeutral;
    r.stance_defaulted = true;
  }
  if (leak) {
    auto blocks = parse_leaked_blocks(r.text);
    if (!blocks.empty()) r.leaked_context = std::move(blocks);
  }
  return r;
}

}  // namespace fliprag
