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
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fliprag/corpus.hpp"
#include "fliprag/retrieval.hpp"
#include "json.hpp"

namespace fliprag {

// doc id -> graded relevance; absent ids have grade 0.
using Relevance = std::unordered_map<std::string, double>;

// DCG@n / IDCG@n with gain 2^g - 1 and discount log2(i + 1), i 1-based.
// The ideal ordering sorts every graded document in `rel`. Returns 0 when
// the ideal DCG is 0.
double ndcg_at(std::span<const std::string> ranking, const Relevance& rel,
               std::size_t n);

struct InterResult {
  double value = 0.0;
  std::size_t denominator = 0;  // min(n, shorter ranking)
  bool capped = false;          // denominator < n
};

// |top_n(a) intersect top_n(b)| / n, n capped at the shorter ranking.
InterResult inter_at(std::span<const std::string> a, std::span<const std::string> b,
                     std::size_t n);

// Share of stance-`target` documents in the post top-3 minus the pre top-3.
double top3_v(std::span<const std::string> pre, std::span<const std::string> post,
              const std::unordered_map<std::string, Stance>& stance_of, Stance target);

// Full 1-based rank of every document for a set of queries.
class RankSnapshot {
 public:
  RankSnapshot() = default;
  // Takes the ordering of `retriever` for each (query id, query tokens).
  static RankSnapshot take(const Retriever& retriever,
                           const std::map<std::string, TokenList>& queries);
  // Ranks given explicitly as a full ordering per query.
  void add_ordering(const std::string& query_id, std::span<const std::string> order);

  std::size_t rank(const std::string& query_id, const std::string& doc_id) const;
  bool has(const std::string& query_id, const std::string& doc_id) const;
  std::size_t doc_count(const std::string& query_id) const;

 private:
  std::map<std::string, std::unordered_map<std::string, std::size_t>> ranks_;
};

// query id -> target doc ids.
using TargetMap = std::map<std::string, std::vector<std::string>>;

// Mean over queries of the fraction of targets whose rank improved, x100.
double rasr(const RankSnapshot& pre, const RankSnapshot& post, const TargetMap& targets);
// Mean over queries of the summed rank improvement (pre - post).
double brank(const RankSnapshot& pre, const RankSnapshot& post, const TargetMap& targets);

// Post stance strictly closer to the target than the pre stance.
bool omsr_success(Stance pre, Stance post, Stance target);
// Signed shift toward the target: post - pre for pro, pre - post for con.
int asv_shift(Stance pre, Stance post, Stance target);

struct StanceOutcome {
  std::string topic_id;
  Stance target = kPro;
  Stance pre = kNeutral;
  Stance post = kNeutral;
};

double omsr(std::span<const StanceOutcome> outcomes);  // percent
double asv(std::span<const StanceOutcome> outcomes);

struct TopicRow {
  std::string topic_id;
  Stance target = kPro;
  Stance pre = kNeutral;
  Stance post = kNeutral;
  double top3_v = 0.0;
  std::optional<double> rasr_pct;
  std::optional<double> brank;
};

struct EvalSummary {
  std::string label;
  double top3_v = 0.0;
  std::optional<double> rasr_pct;
  std::optional<double> brank;
  double omsr_pct = 0.0;
  double asv = 0.0;
  std::optional<double> ndcg10;
  std::optional<double> inter10;
  std::vector<TopicRow> topics;

  // Recomputes the aggregate fields from `topics`.
  void aggregate();
};

nlohmann::ordered_json to_json(const EvalSummary& s);
// One row per topic plus a final "summary" row.
std::string to_csv(const EvalSummary& s);

}  // namespace fliprag
