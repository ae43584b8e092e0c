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

#include <array>
#include <unordered_map>
#include <unordered_set>

#include "fliprag/defense.hpp"
#include "fliprag/error.hpp"
#include "fliprag/ragsim_internal.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

namespace {

Stance vote(const std::array<std::size_t, 3>& n) {
  if (n[kPro] > n[kCon] && n[kPro] > n[kNeutral]) return kPro;
  if (n[kCon] > n[kPro] && n[kCon] > n[kNeutral]) return kCon;
  return kNeutral;
}

std::string defended_text(const std::string& query, Stance s, const char* how) {
  return "Regarding \"" + query + "\", the " + how + " context leads to a " +
         std::string(stance_word(s)) + " answer.";
}

}  // namespace

std::vector<RagResponse> masked_smooth_answers(const RagSystem& system,
                                               const std::vector<std::string>& queries,
                                               double mask_rate, std::size_t ensemble_n,
                                               std::uint64_t seed) {
  if (ensemble_n < 1) throw InvalidArgument("ensemble_n must be >= 1");
  if (!(mask_rate >= 0.0 && mask_rate < 1.0)) {
    throw InvalidArgument("mask_rate must lie in [0, 1)");
  }
  std::vector<RagResponse> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(system.answer(q));
  // Nothing is masked, so every trial is the plain answer.
  if (mask_rate == 0.0) return out;

  // Masks depend on the trial only, so one masked corpus serves every query.
  const Corpus& corpus = RagInternals::corpus(system);
  std::vector<std::array<std::size_t, 3>> votes(queries.size());
  for (std::size_t trial = 0; trial < ensemble_n; ++trial) {
    Rng rng(derive_seed(seed, "defense.mask", trial));
    std::bernoulli_distribution drop(mask_rate);
    auto masked = std::make_shared<Corpus>();
    for (const auto& d : corpus.documents()) {
      TokenList kept;
      for (const auto& t : d.tokens()) {
        if (!drop(rng)) kept.push_back(t);
      }
      masked->add(Document(d.id(), join_tokens(kept), d.topic_id(), d.stance(),
                           d.provenance()));
    }
    RagSystem trial_system = RagInternals::rebind(system, masked);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      ++votes[i][static_cast<std::size_t>(trial_system.answer(queries[i]).stance)];
    }
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out[i].stance = vote(votes[i]);
    out[i].text = defended_text(queries[i], out[i].stance, "smoothed");
  }
  return out;
}

RagResponse masked_smooth_answer(const RagSystem& system, const std::string& query,
                                 double mask_rate, std::size_t ensemble_n,
                                 std::uint64_t seed) {
  return masked_smooth_answers(system, {query}, mask_rate, ensemble_n, seed).front();
}

RagResponse robust_aggregate_answer(const RagSystem& system, const std::string& query,
                                    const AggregateOptions& opt) {
  const Retriever& retriever = RagInternals::retriever(system);
  if (retriever.corpus().empty()) throw InvalidArgument("corpus is empty");
  const std::size_t depth = opt.depth == 0 ? system.k() : opt.depth;
  const Ranking top = retriever.rank(tokenize(query), depth);
  const TokenList qt = tokenize(query);
  const std::unordered_set<std::string> qset(qt.begin(), qt.end());

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& e : top.entries) {
    Ranking single;
    single.entries.push_back(e);
    const RagResponse iso = RagInternals::respond(system, query, single);
    std::unordered_set<std::string> keywords;
    for (const auto& t : content_tokens(tokenize(iso.text))) {
      if (!qset.count(t)) keywords.insert(t);
    }
    for (const auto& k : keywords) ++counts[k];
  }
  std::array<std::size_t, 3> votes{};
  for (Stance s : {kCon, kNeutral, kPro}) {
    auto it = counts.find(std::string(stance_word(s)));
    if (it != counts.end() && it->second >= opt.keyword_min_count) {
      votes[static_cast<std::size_t>(s)] = it->second;
    }
  }
  RagResponse r = system.answer(query);
  r.stance = vote(votes);
  r.text = defended_text(query, r.stance, "aggregated");
  return r;
}

}  // namespace fliprag
