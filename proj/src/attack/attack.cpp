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

#include "fliprag/attack.hpp"
#include "fliprag/error.hpp"
#include "fliprag/retrieval.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

namespace {

// Topic documents with their surrogate score, best first.
std::vector<std::pair<double, const Document*>> scored_topic_docs(
    const Corpus& corpus, const Topic& topic, const EmbeddingModel& surrogate) {
  const auto q = embed_text(surrogate, tokenize(topic.question));
  std::vector<std::pair<double, const Document*>> out;
  for (const auto* d : topic_documents(corpus, topic.id)) {
    out.emplace_back(dot(q, embed_text(surrogate, d->tokens())), d);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return ranks_before(a.first, a.second->id(), b.first, b.second->id());
  });
  return out;
}

}  // namespace

std::vector<std::string> select_targets(const Corpus& corpus, const Topic& topic,
                                        Stance target, std::size_t n,
                                        const EmbeddingModel& surrogate, std::size_t k) {
  if (target != kPro && target != kCon) {
    throw InvalidArgument("target stance must be pro (2) or con (0)");
  }
  if (n < 1) throw InvalidArgument("N must be >= 1");
  const auto& pool = topic.ids_with_stance(target);
  if (pool.size() < n) {
    throw InvalidArgument("topic '" + topic.id + "' has " + std::to_string(pool.size()) +
                          " documents with stance " + std::to_string(target) + ", " +
                          std::to_string(n - pool.size()) + " short of N=" +
                          std::to_string(n));
  }
  const std::unordered_set<std::string> eligible(pool.begin(), pool.end());
  const Ranking top = rank(surrogate, corpus, tokenize(topic.question), k);
  std::unordered_set<std::string> in_top;
  for (const auto& e : top.entries) in_top.insert(e.doc_id);

  std::vector<std::string> chosen, fallback;
  for (const auto& [s, d] : scored_topic_docs(corpus, topic, surrogate)) {
    if (!eligible.count(d->id())) continue;
    (in_top.count(d->id()) ? fallback : chosen).push_back(d->id());
  }
  chosen.insert(chosen.end(), fallback.begin(), fallback.end());
  chosen.resize(n);
  return chosen;
}

std::string select_anchor(const Corpus& corpus, const Topic& topic,
                          const EmbeddingModel& surrogate,
                          const std::vector<std::string>& exclude) {
  const std::unordered_set<std::string> skip(exclude.begin(), exclude.end());
  const Ranking r = rank(surrogate, corpus, tokenize(topic.question), exclude.size() + 1);
  for (const auto& e : r.entries) {
    if (!skip.count(e.doc_id)) return e.doc_id;
  }
  throw InvalidArgument("no anchor candidate for topic '" + topic.id + "'");
}

AttackPlan plan_attack(const Corpus& corpus, const Topic& topic, Stance target,
                       const EmbeddingModel& surrogate, const NGramLM& lm,
                       const std::vector<std::string>& vocab, const AttackOptions& opt,
                       std::uint64_t seed) {
  AttackPlan plan;
  plan.topic_id = topic.id;
  plan.target_stance = target;
  plan.target_doc_ids = select_targets(corpus, topic, target, opt.n_docs, surrogate, opt.k);
  plan.anchor_id = select_anchor(corpus, topic, surrogate, plan.target_doc_ids);
  const TokenList q = tokenize(topic.question);
  const Document& anchor = corpus.at(plan.anchor_id);
  for (std::size_t i = 0; i < plan.target_doc_ids.size(); ++i) {
    const auto& id = plan.target_doc_ids[i];
    plan.triggers.emplace(id, generate_trigger(surrogate, q, corpus.at(id), anchor, lm, vocab,
                                               opt.trigger, derive_seed(seed, id, i)));
  }
  return plan;
}

void apply_plan(Corpus& corpus, const AttackPlan& plan) {
  for (const auto& id : plan.target_doc_ids) {
    auto it = plan.triggers.find(id);
    if (it == plan.triggers.end()) throw InvalidArgument("no trigger for target '" + id + "'");
    const Document& d = corpus.at(id);
    corpus.replace_text(id, it->second.text() + " " + d.text(), Provenance::trigger_poisoned);
  }
}

Corpus poison(const Corpus& corpus, const AttackPlan& plan) {
  Corpus out = corpus;
  apply_plan(out, plan);
  return out;
}

nlohmann::ordered_json to_json(const AttackPlan& plan) {
  nlohmann::ordered_json j;
  j["topic_id"] = plan.topic_id;
  j["target_stance"] = plan.target_stance;
  j["target_doc_ids"] = plan.target_doc_ids;
  j["anchor_id"] = plan.anchor_id;
  nlohmann::ordered_json trig = nlohmann::ordered_json::object();
  for (const auto& [id, t] : plan.triggers) {
    nlohmann::ordered_json tj;
    tj["tokens"] = t.tokens;
    tj["relevance_term"] = t.relevance_term;
    tj["fluency_term"] = t.fluency_term;
    tj["consistency_term"] = t.consistency_term;
    tj["objective"] = t.objective;
    tj["score_before"] = t.score_before;
    tj["score_after"] = t.score_after;
    tj["no_gain"] = t.no_gain;
    trig[id] = std::move(tj);
  }
  j["triggers"] = std::move(trig);
  return j;
}

AttackPlan plan_from_json(const nlohmann::json& j) {
  try {
    AttackPlan p;
    p.topic_id = j.at("topic_id").get<std::string>();
    p.target_stance = j.at("target_stance").get<int>();
    p.target_doc_ids = j.at("target_doc_ids").get<std::vector<std::string>>();
    p.anchor_id = j.at("anchor_id").get<std::string>();
    for (const auto& [id, tj] : j.at("triggers").items()) {
      Trigger t;
      t.tokens = tj.at("tokens").get<TokenList>();
      t.relevance_term = tj.value("relevance_term", 0.0);
      t.fluency_term = tj.value("fluency_term", 0.0);
      t.consistency_term = tj.value("consistency_term", 0.0);
      t.objective = tj.value("objective", 0.0);
      t.score_before = tj.value("score_before", 0.0);
      t.score_after = tj.value("score_after", 0.0);
      t.no_gain = tj.value("no_gain", false);
      p.triggers.emplace(id, std::move(t));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad attack plan: ") + e.what());
  }
}

}  // namespace fliprag
