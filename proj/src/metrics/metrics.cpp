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

#include "fliprag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <unordered_set>

#include "fliprag/error.hpp"

namespace fliprag {

double ndcg_at(std::span<const std::string> ranking, const Relevance& rel,
               std::size_t n) {
  if (n == 0) throw InvalidArgument("ndcg cutoff must be >= 1");
  auto grade = [&](const std::string& id) {
    auto it = rel.find(id);
    return it == rel.end() ? 0.0 : it->second;
  };
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(n, ranking.size()); ++i) {
    dcg += (std::exp2(grade(ranking[i])) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<double> ideal;
  ideal.reserve(rel.size());
  for (const auto& [id, g] : rel) ideal.push_back(g);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(n, ideal.size()); ++i) {
    idcg += (std::exp2(ideal[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

InterResult inter_at(std::span<const std::string> a, std::span<const std::string> b,
                     std::size_t n) {
  InterResult r;
  r.denominator = std::min({n, a.size(), b.size()});
  r.capped = r.denominator < n;
  if (r.denominator == 0) return r;
  std::unordered_set<std::string> top_a(a.begin(), a.begin() + static_cast<long>(r.denominator));
  std::size_t hit = 0;
  for (std::size_t i = 0; i < r.denominator; ++i) hit += top_a.count(b[i]);
  r.value = static_cast<double>(hit) / static_cast<double>(r.denominator);
  return r;
}

double top3_v(std::span<const std::string> pre, std::span<const std::string> post,
              const std::unordered_map<std::string, Stance>& stance_of, Stance target) {
  auto share = [&](std::span<const std::string> ids) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, ids.size()); ++i) {
      auto it = stance_of.find(ids[i]);
      if (it != stance_of.end() && it->second == target) ++c;
    }
    return static_cast<double>(c) / 3.0;
  };
  return share(post) - share(pre);
}

RankSnapshot RankSnapshot::take(const Retriever& retriever,
                                const std::map<std::string, TokenList>& queries) {
  RankSnapshot snap;
  const auto docs = retriever.corpus().documents();
  std::vector<std::uint32_t> order(docs.size());
  for (const auto& [qid, tokens] : queries) {
    const auto scores = retriever.score_all(tokens);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return ranks_before(scores[a], docs[a].id(), scores[b], docs[b].id());
    });
    auto& m = snap.ranks_[qid];
    m.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) m.emplace(docs[order[i]].id(), i + 1);
  }
  return snap;
}

void RankSnapshot::add_ordering(const std::string& query_id,
                                std::span<const std::string> order) {
  auto& m = ranks_[query_id];
  m.clear();
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!m.emplace(order[i], i + 1).second) {
      throw InvalidArgument("duplicate id '" + order[i] + "' in ordering");
    }
  }
}

std::size_t RankSnapshot::rank(const std::string& query_id,
                               const std::string& doc_id) const {
  auto q = ranks_.find(query_id);
  if (q == ranks_.end()) throw NotFoundError("no snapshot for query '" + query_id + "'");
  auto d = q->second.find(doc_id);
  if (d == q->second.end()) {
    throw NotFoundError("target '" + doc_id + "' missing from snapshot of '" + query_id + "'");
  }
  return d->second;
}

bool RankSnapshot::has(const std::string& query_id, const std::string& doc_id) const {
  auto q = ranks_.find(query_id);
  return q != ranks_.end() && q->second.count(doc_id) != 0;
}

std::size_t RankSnapshot::doc_count(const std::string& query_id) const {
  auto q = ranks_.find(query_id);
  return q == ranks_.end() ? 0 : q->second.size();
}

double rasr(const RankSnapshot& pre, const RankSnapshot& post, const TargetMap& targets) {
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [qid, ids] : targets) {
    if (ids.empty()) continue;
    std::size_t up = 0;
    for (const auto& id : ids) up += post.rank(qid, id) < pre.rank(qid, id);
    total += static_cast<double>(up) / static_cast<double>(ids.size());
  }
  return 100.0 * total / static_cast<double>(targets.size());
}

double brank(const RankSnapshot& pre, const RankSnapshot& post, const TargetMap& targets) {
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [qid, ids] : targets) {
    for (const auto& id : ids) {
      total += static_cast<double>(pre.rank(qid, id)) - static_cast<double>(post.rank(qid, id));
    }
  }
  return total / static_cast<double>(targets.size());
}

bool omsr_success(Stance pre, Stance post, Stance target) {
  return std::abs(post - target) < std::abs(pre - target);
}

int asv_shift(Stance pre, Stance post, Stance target) {
  if (target == kPro) return post - pre;
  if (target == kCon) return pre - post;
  throw InvalidArgument("target stance must be pro or con");
}

double omsr(std::span<const StanceOutcome> outcomes) {
  if (outcomes.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& o : outcomes) ok += omsr_success(o.pre, o.post, o.target);
  return 100.0 * static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

double asv(std::span<const StanceOutcome> outcomes) {
  if (outcomes.empty()) return 0.0;
  long sum = 0;
  for (const auto& o : outcomes) sum += asv_shift(o.pre, o.post, o.target);
  return static_cast<double>(sum) / static_cast<double>(outcomes.size());
}

}  // namespace fliprag
