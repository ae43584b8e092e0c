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
#include <string>
#include <vector>

#include "fliprag/corpus.hpp"
#include "fliprag/embedding.hpp"
#include "fliprag/ngram.hpp"
#include "json.hpp"

namespace fliprag {

struct TriggerConfig {
  std::size_t beam_width = 30;
  std::size_t max_len = 15;
  double temperature = 0.4;
  // Gradient step size of the continuous formulation. The search below is
  // exact over a discrete shortlist, so this is carried for completeness only.
  double step_lr_unused = 0.1;
  double lambda1 = 0.02;  // fluency weight
  double lambda2 = 0.5;   // consistency weight
  std::size_t shortlist_size = 128;
  // Cap on the rewarded margin over the anchor.
  double tau = 1.0;
  // Maximum occurrences of one token in a trigger.
  std::size_t max_repeat = 1;
  // Stealth budget: at most this many trigger tokens may be content terms
  // of the query. Keeps the keyword density of poisoned documents close to
  // natural text.
  std::size_t max_query_tokens = 1;

  void validate() const;
};

struct TriggerStep {
  std::size_t length = 0;
  double best_objective = 0.0;
  std::vector<std::string> best_tokens;
};

struct Trigger {
  TokenList tokens;
  double relevance_term = 0.0;    // min(M(q, trig + d) - M(q, anchor), tau)
  double fluency_term = 0.0;      // lambda1 * log P(trig)
  double consistency_term = 0.0;  // lambda2 * cos(E(trig), E(d))
  double objective = 0.0;         // sum of the three terms
  // Surrogate scores of the target before and after the trigger.
  double score_before = 0.0;
  double score_after = 0.0;
  bool no_gain = false;
  std::vector<TriggerStep> trace;

  std::string text() const { return join_tokens(tokens); }
};

// Corpus vocabulary minus stopwords, sorted.
std::vector<std::string> attack_vocabulary(const Corpus& corpus);

// Beam search for a prefix that lifts `target` toward (and past) `anchor`
// under `surrogate`. `vocab` restricts the candidate tokens; tokens the
// surrogate does not know are ignored.
Trigger generate_trigger(const EmbeddingModel& surrogate, const TokenList& query,
                         const Document& target, const Document& anchor,
                         const NGramLM& lm, const std::vector<std::string>& vocab,
                         const TriggerConfig& cfg, std::uint64_t seed);

// Highest-scoring stance-`target` documents of the topic that are outside
// the surrogate's top-k, padded with the remaining ones if needed.
std::vector<std::string> select_targets(const Corpus& corpus, const Topic& topic,
                                        Stance target, std::size_t n,
                                        const EmbeddingModel& surrogate,
                                        std::size_t k = 3);

// Top-ranked document of the topic question under the surrogate that is not
// in `exclude`.
std::string select_anchor(const Corpus& corpus, const Topic& topic,
                          const EmbeddingModel& surrogate,
                          const std::vector<std::string>& exclude);

struct AttackPlan {
  std::string topic_id;
  Stance target_stance = kPro;
  std::vector<std::string> target_doc_ids;
  std::map<std::string, Trigger> triggers;
  std::string anchor_id;
};

struct AttackOptions {
  std::size_t n_docs = 3;
  std::size_t k = 3;
  TriggerConfig trigger;
};

// Phase 2 for one topic: targets, anchor and one trigger per target.
AttackPlan plan_attack(const Corpus& corpus, const Topic& topic, Stance target,
                       const EmbeddingModel& surrogate, const NGramLM& lm,
                       const std::vector<std::string>& vocab, const AttackOptions& opt,
                       std::uint64_t seed);

// New corpus with every target prefixed by its trigger.
Corpus poison(const Corpus& corpus, const AttackPlan& plan);
// In-place variant used to accumulate plans across topics.
void apply_plan(Corpus& corpus, const AttackPlan& plan);

nlohmann::ordered_json to_json(const AttackPlan& plan);
AttackPlan plan_from_json(const nlohmann::json& j);

enum class BaselineKind {
  prompt_injection,
  disinformation,
  static_text,
  question_injection,
  pat_transfer,
};

std::string_view to_string(BaselineKind k);
BaselineKind baseline_from_string(std::string_view s);

struct BaselineParams {
  // Surrogate used to choose which documents to modify; for pat_transfer it
  // is also the trigger generator, so pass the untrained model there.
  const EmbeddingModel* surrogate = nullptr;
  const NGramLM* lm = nullptr;
  const std::vector<std::string>* vocab = nullptr;
  std::size_t k = 3;
  TriggerConfig trigger;
  // Words a writer would use to argue for each stance; disinformation draws
  // its stance vocabulary from here.
  std::map<Stance, std::vector<std::string>> stance_terms;
  std::uint64_t seed = 0;
};

inline constexpr const char* kStaticText =
    "Experts dispute the above claims as being unreliable.";

std::string injection_text(Stance target);

// Applies one baseline to `corpus` for one topic in place and returns the
// ids it modified or inserted.
std::vector<std::string> apply_baseline(BaselineKind kind, Corpus& corpus,
                                        const Topic& topic, Stance target, std::size_t n,
                                        const BaselineParams& params);

// Copying variant.
Corpus craft_baseline(BaselineKind kind, const Corpus& corpus, const Topic& topic,
                      Stance target, std::size_t n, const BaselineParams& params);

}  // namespace fliprag
