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

#include <fstream>
#include <set>

#include "fliprag/harness.hpp"

namespace fliprag {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> k(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!k.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

Stance stance_from_name(const std::string& s) {
  if (s == "pro") return kPro;
  if (s == "con") return kCon;
  throw ConfigError("stance must be 'pro' or 'con', got '" + s + "'");
}

const std::set<std::string>& attack_names() {
  static const std::set<std::string> k = {"flipped",         "pat_transfer",
                                          "question_injection", "prompt_injection",
                                          "disinformation",  "static_text"};
  return k;
}

}  // namespace

std::string stance_name(Stance s) {
  switch (s) {
    case kPro: return "pro";
    case kCon: return "con";
    default: return "neutral";
  }
}

void ExperimentConfig::validate() const {
  try {
    if (jsonl_path.empty()) synthetic.validate();
    rag.validate();
    trigger.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (target.dim == 0 || target.epochs == 0 || target.batch == 0 || !(target.lr > 0)) {
    throw ConfigError("target dim, epochs, batch and lr must be positive");
  }
  if (jsonl_path.empty() != topics_path.empty()) {
    throw ConfigError("jsonl_path and topics_path must be given together");
  }
  if (retriever != "dense" && retriever != "tfidf") {
    throw ConfigError("retriever must be 'dense' or 'tfidf'");
  }
  if (imitation.dim == 0) throw ConfigError("surrogate dim must be > 0");
  if (imitation.hyper.batch == 0 || imitation.hyper.epochs == 0 || !(imitation.hyper.lr > 0)) {
    throw ConfigError("surrogate batch, epochs and lr must be positive");
  }
  if (imitation.pairs.positives == 0) throw ConfigError("positives must be >= 1");
  if (attacks.empty()) throw ConfigError("no attack kinds");
  for (const auto& a : attacks) {
    if (!attack_names().count(a)) throw ConfigError("unknown attack kind '" + a + "'");
  }
  if (stances.empty()) throw ConfigError("no target stances");
  for (Stance s : stances) {
    if (s != kPro && s != kCon) throw ConfigError("target stance must be pro or con");
  }
  if (n_docs == 0) throw ConfigError("n_docs must be >= 1");
  if (ablation_n && n_list.empty()) throw ConfigError("N list is empty");
  for (auto n : n_list) {
    if (n == 0) throw ConfigError("N list entries must be >= 1");
  }
  if (ablation_corpus) {
    if (corpus_sizes.empty()) throw ConfigError("corpus size list is empty");
    for (std::size_t i = 0; i < corpus_sizes.size(); ++i) {
      if (corpus_sizes[i] > 1'000'000) {
        throw ConfigError("corpus size " + std::to_string(corpus_sizes[i]) +
                          " exceeds the 1000000 document guard");
      }
      if (i > 0 && corpus_sizes[i] <= corpus_sizes[i - 1]) {
        throw ConfigError("corpus sizes must be strictly ascending");
      }
    }
  }
  for (double t : defense.thresholds) {
    if (t < 0.0 || t > 1.0) throw ConfigError("spamicity thresholds must lie in [0, 1]");
  }
  for (double m : defense.mask_rates) {
    if (m < 0.0 || m >= 1.0) throw ConfigError("mask rates must lie in [0, 1)");
  }
  if (defense.ensemble == 0 || defense.ensemble % 2 == 0) {
    throw ConfigError("ensemble size must be odd");
  }
  if (defense.density_step == 0) throw ConfigError("density step must be >= 1");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j,
                 {"seed", "synthetic", "corpus_size", "jsonl_path", "topics_path", "retriever",
                  "target", "rag", "imitation", "trigger", "attacks", "stances", "n_docs",
                  "defense", "ablation_n", "n_list", "ablation_corpus", "corpus_sizes",
                  "corpus_alarm"},
                 "config");
  read(j, "seed", c.seed);
  read(j, "corpus_size", c.corpus_size);
  read(j, "jsonl_path", c.jsonl_path);
  read(j, "topics_path", c.topics_path);
  read(j, "retriever", c.retriever);
  read(j, "attacks", c.attacks);
  read(j, "n_docs", c.n_docs);
  read(j, "ablation_n", c.ablation_n);
  read(j, "n_list", c.n_list);
  read(j, "ablation_corpus", c.ablation_corpus);
  read(j, "corpus_sizes", c.corpus_sizes);
  read(j, "corpus_alarm", c.corpus_alarm);
  if (j.contains("stances")) {
    std::vector<std::string> names;
    read(j, "stances", names);
    c.stances.clear();
    for (const auto& n : names) c.stances.push_back(stance_from_name(n));
  }
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    reject_unknown(s,
                   {"topics", "docs_per_stance", "vocab_per_topic", "shared_vocab", "doc_len",
                    "neutral_per_topic", "question_terms", "stance_markers", "lead_boost",
                    "focus_span", "count_jitter", "queries_per_topic"},
                   "synthetic");
    auto& y = c.synthetic;
    read(s, "topics", y.topics);
    read(s, "docs_per_stance", y.docs_per_stance);
    read(s, "vocab_per_topic", y.vocab_per_topic);
    read(s, "shared_vocab", y.shared_vocab);
    read(s, "doc_len", y.doc_len);
    read(s, "neutral_per_topic", y.neutral_per_topic);
    read(s, "question_terms", y.question_terms);
    read(s, "stance_markers", y.stance_markers);
    read(s, "lead_boost", y.lead_boost);
    read(s, "focus_span", y.focus_span);
    read(s, "count_jitter", y.count_jitter);
    read(s, "queries_per_topic", y.queries_per_topic);
  }
  if (j.contains("target")) {
    const json& t = j.at("target");
    reject_unknown(t,
                   {"dim", "epochs", "lr", "negatives", "batch", "init_scale",
                    "crop_pairs_per_doc", "crop_len"},
                   "target");
    read(t, "dim", c.target.dim);
    read(t, "epochs", c.target.epochs);
    read(t, "lr", c.target.lr);
    read(t, "negatives", c.target.negatives_per_positive);
    read(t, "batch", c.target.batch);
    read(t, "init_scale", c.target.init_scale);
    read(t, "crop_pairs_per_doc", c.target.crop_pairs_per_doc);
    read(t, "crop_len", c.target.crop_len);
  }
  if (j.contains("rag")) {
    const json& r = j.at("rag");
    reject_unknown(r, {"k", "leak_k", "leak_policy"}, "rag");
    read(r, "k", c.rag.k);
    read(r, "leak_k", c.rag.leak_k);
    if (r.contains("leak_policy")) {
      std::string p;
      read(r, "leak_policy", p);
      if (p == "leaks_verbatim") {
        c.rag.leak_policy = LeakPolicy::leaks_verbatim;
      } else if (p == "refuses") {
        c.rag.leak_policy = LeakPolicy::refuses;
      } else {
        throw ConfigError("leak_policy must be 'leaks_verbatim' or 'refuses'");
      }
    }
  }
  if (j.contains("imitation")) {
    const json& m = j.at("imitation");
    reject_unknown(m,
                   {"dim", "init_scale", "alpha", "positives", "random_pool", "batch", "epochs",
                    "lr", "topic_queries"},
                   "imitation");
    read(m, "dim", c.imitation.dim);
    read(m, "init_scale", c.imitation.init_scale);
    read(m, "alpha", c.imitation.pairs.alpha);
    read(m, "positives", c.imitation.pairs.positives);
    read(m, "random_pool", c.imitation.pairs.random_pool);
    read(m, "batch", c.imitation.hyper.batch);
    read(m, "epochs", c.imitation.hyper.epochs);
    read(m, "lr", c.imitation.hyper.lr);
    read(m, "topic_queries", c.imitation.topic_queries);
  }
  if (j.contains("trigger")) {
    const json& t = j.at("trigger");
    reject_unknown(t,
                   {"beam_width", "max_len", "temperature", "lambda1", "lambda2", "shortlist",
                    "tau", "max_repeat", "max_query_tokens"},
                   "trigger");
    read(t, "beam_width", c.trigger.beam_width);
    read(t, "max_len", c.trigger.max_len);
    read(t, "temperature", c.trigger.temperature);
    read(t, "lambda1", c.trigger.lambda1);
    read(t, "lambda2", c.trigger.lambda2);
    read(t, "shortlist", c.trigger.shortlist_size);
    read(t, "tau", c.trigger.tau);
    read(t, "max_repeat", c.trigger.max_repeat);
    read(t, "max_query_tokens", c.trigger.max_query_tokens);
  }
  if (j.contains("defense")) {
    const json& d = j.at("defense");
    reject_unknown(d,
                   {"enabled", "thresholds", "density_windows", "density_step", "mask_rates",
                    "ensemble", "robust_min_count", "robust_depth", "paraphrase"},
                   "defense");
    read(d, "enabled", c.defense.enabled);
    read(d, "thresholds", c.defense.thresholds);
    read(d, "density_windows", c.defense.density_windows);
    read(d, "density_step", c.defense.density_step);
    read(d, "mask_rates", c.defense.mask_rates);
    read(d, "ensemble", c.defense.ensemble);
    read(d, "robust_min_count", c.defense.robust.keyword_min_count);
    read(d, "robust_depth", c.defense.robust.depth);
    read(d, "paraphrase", c.defense.paraphrase);
  }
  c.validate();
  return c;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  const auto& y = c.synthetic;
  j["synthetic"] = {{"topics", y.topics},
                    {"docs_per_stance", y.docs_per_stance},
                    {"vocab_per_topic", y.vocab_per_topic},
                    {"shared_vocab", y.shared_vocab},
                    {"doc_len", y.doc_len},
                    {"neutral_per_topic", y.neutral_per_topic},
                    {"question_terms", y.question_terms},
                    {"stance_markers", y.stance_markers},
                    {"lead_boost", y.lead_boost},
                    {"focus_span", y.focus_span},
                    {"count_jitter", y.count_jitter},
                    {"queries_per_topic", y.queries_per_topic}};
  j["corpus_size"] = c.corpus_size;
  j["jsonl_path"] = c.jsonl_path;
  j["topics_path"] = c.topics_path;
  j["retriever"] = c.retriever;
  j["target"] = {{"dim", c.target.dim},
                 {"epochs", c.target.epochs},
                 {"lr", c.target.lr},
                 {"negatives", c.target.negatives_per_positive},
                 {"batch", c.target.batch},
                 {"init_scale", c.target.init_scale},
                 {"crop_pairs_per_doc", c.target.crop_pairs_per_doc},
                 {"crop_len", c.target.crop_len}};
  j["rag"] = {{"k", c.rag.k},
              {"leak_k", c.rag.leak_k},
              {"leak_policy", c.rag.leak_policy == LeakPolicy::refuses ? "refuses"
                                                                        : "leaks_verbatim"}};
  const auto& m = c.imitation;
  j["imitation"] = {{"dim", m.dim},
                    {"init_scale", m.init_scale},
                    {"alpha", m.pairs.alpha},
                    {"positives", m.pairs.positives},
                    {"random_pool", m.pairs.random_pool},
                    {"batch", m.hyper.batch},
                    {"epochs", m.hyper.epochs},
                    {"lr", m.hyper.lr},
                    {"topic_queries", m.topic_queries}};
  const auto& t = c.trigger;
  j["trigger"] = {{"beam_width", t.beam_width},
                  {"max_len", t.max_len},
                  {"temperature", t.temperature},
                  {"lambda1", t.lambda1},
                  {"lambda2", t.lambda2},
                  {"shortlist", t.shortlist_size},
                  {"tau", t.tau},
                  {"max_repeat", t.max_repeat},
                  {"max_query_tokens", t.max_query_tokens}};
  j["attacks"] = c.attacks;
  std::vector<std::string> st;
  for (Stance s : c.stances) st.push_back(stance_name(s));
  j["stances"] = st;
  j["n_docs"] = c.n_docs;
  const auto& d = c.defense;
  j["defense"] = {{"enabled", d.enabled},
                  {"thresholds", d.thresholds},
                  {"density_windows", d.density_windows},
                  {"density_step", d.density_step},
                  {"mask_rates", d.mask_rates},
                  {"ensemble", d.ensemble},
                  {"robust_min_count", d.robust.keyword_min_count},
                  {"robust_depth", d.robust.depth},
                  {"paraphrase", d.paraphrase}};
  j["ablation_n"] = c.ablation_n;
  j["n_list"] = c.n_list;
  j["ablation_corpus"] = c.ablation_corpus;
  j["corpus_sizes"] = c.corpus_sizes;
  j["corpus_alarm"] = c.corpus_alarm;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace fliprag
