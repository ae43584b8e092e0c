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

#include <algorithm>
#include <unordered_set>

#include "fliprag/defense.hpp"
#include "fliprag/error.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

std::string paraphrase_prompt(const std::string& query) {
  return "Paraphrase the following query and do not use the words in the original query: " +
         query;
}

std::string paraphrase_query(const std::string& query,
                             const std::map<std::string, std::vector<std::string>>& synonyms,
                             std::uint64_t seed) {
  const TokenList toks = tokenize(query);
  const std::unordered_set<std::string> original(toks.begin(), toks.end());
  Rng rng(derive_seed(seed, "defense.paraphrase"));
  TokenList out;
  for (const auto& t : toks) {
    if (is_stopword(t)) {
      out.push_back(t);
      continue;
    }
    std::vector<std::string> options;
    if (auto it = synonyms.find(t); it != synonyms.end()) {
      for (const auto& s : it->second) {
        if (!original.count(s)) options.push_back(s);
      }
    }
    // No usable synonym: the token is dropped.
    if (options.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    out.push_back(options[pick(rng)]);
  }
  return join_tokens(out);
}

std::string paraphrase_query_external(const std::string& query, const HttpEndpoint& endpoint) {
  if (endpoint.url.empty()) {
    throw InvalidArgument("no paraphrase endpoint configured; use the lexical_seeded mode");
  }
  return http_complete(endpoint, {{"query", paraphrase_prompt(query)}, {"context", ""}});
}

double content_overlap(const std::string& a, const std::string& b) {
  const TokenList ta = content_tokens(tokenize(a));
  const TokenList tb = content_tokens(tokenize(b));
  const std::unordered_set<std::string> sa(ta.begin(), ta.end());
  const std::unordered_set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& t : sa) shared += sb.count(t);
  return static_cast<double>(shared) / static_cast<double>(sa.size());
}

}  // namespace fliprag
