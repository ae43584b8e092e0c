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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fliprag/attack.hpp"
#include "fliprag/contrastive.hpp"
#include "fliprag/defense.hpp"
#include "fliprag/error.hpp"
#include "fliprag/imitation.hpp"
#include "fliprag/metrics.hpp"
#include "fliprag/ragsim.hpp"
#include "fliprag/synthetic.hpp"
#include "json.hpp"

namespace fliprag {

// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed (exit code 3).
class StageError : public Error {
 public:
  StageError(const std::string& stage, std::uint64_t seed, const std::string& what)
      : Error("stage '" + stage + "' (seed " + std::to_string(seed) + "): " + what),
        stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// The attacker side touched target weights (exit code 4).
class AuditError : public Error {
 public:
  using Error::Error;
};

struct ImitationConfig {
  std::size_t dim = 32;
  double init_scale = 0.1;
  PairOptions pairs{.alpha = 60, .positives = 3, .random_pool = 100};
  SurrogateHyper hyper{.batch = 32, .epochs = 10, .lr = 0.01};
  // Add the world's per-topic query set to the topic questions.
  bool topic_queries = true;
};

struct DefenseConfig {
  bool enabled = true;
  std::vector<double> thresholds = {0.1, 0.15, 0.2, 0.25, 0.3};
  std::vector<std::size_t> density_windows = {20, 50, 100};
  std::size_t density_step = 5;
  std::vector<double> mask_rates = {0.0, 0.7};
  std::size_t ensemble = 11;
  AggregateOptions robust{.keyword_min_count = 3, .depth = 10};
  bool paraphrase = true;
};

struct ExperimentConfig {
  std::uint64_t seed = 17;
  // Corpus: synthetic unless jsonl_path is set.
  SyntheticSpec synthetic;
  std::size_t corpus_size = 2000;  // total documents; the rest is filler
  std::string jsonl_path;
  std::string topics_path;

  std::string retriever = "dense";  // dense | tfidf
  TargetHyper target;
  RagConfig rag;
  ImitationConfig imitation;
  TriggerConfig trigger;

  std::vector<std::string> attacks = {"flipped",          "pat_transfer",
                                      "question_injection", "prompt_injection",
                                      "disinformation",   "static_text"};
  std::vector<Stance> stances = {kPro, kCon};
  std::size_t n_docs = 3;
  DefenseConfig defense;

  bool ablation_n = true;
  std::vector<std::size_t> n_list = {1, 3, 5, 10};
  bool ablation_corpus = false;
  std::vector<std::size_t> corpus_sizes = {2000, 10000, 50000, 100000};
  // Largest tolerated OMSR drop (points) between consecutive corpus sizes.
  double corpus_alarm = 50.0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

// Corpus, topics and the side tables of a synthetic world.
struct World {
  std::shared_ptr<const Corpus> corpus;
  std::vector<Topic> topics;
  std::map<std::string, std::vector<std::string>> topic_queries;
  std::map<std::string, std::vector<std::string>> synonyms;
  std::map<Stance, std::vector<std::string>> stance_terms;
};

World build_world(const ExperimentConfig& cfg, std::optional<std::size_t> size = {});

// What the attacker learned in Phase 1.
struct AttackerModels {
  EmbeddingModel init;
  EmbeddingModel surrogate;
  std::vector<double> epoch_losses;
  std::size_t triples = 0;
  std::size_t skipped = 0;
};

// Phase 1. Receives the query-only facade and the public corpus, nothing else.
AttackerModels run_imitation(const RagSystem& system, const Corpus& public_corpus,
                             const std::vector<std::string>& queries,
                             const ImitationConfig& cfg, std::uint64_t seed);

struct AuditReport {
  bool passed = true;
  std::vector<std::string> checks;
};

// Compares weight fingerprints: no attacker model may equal the target.
AuditReport audit_boundary(std::optional<std::uint64_t> target_fingerprint,
                           const AttackerModels& attacker);

struct CurveRow {
  double x = 0.0;
  double omsr_pct = 0.0;
  double asv = 0.0;
  bool alarm = false;
};

struct RunReport {
  nlohmann::ordered_json manifest;
  ImitationReport imitation;
  AuditReport audit;
  // "<kind>/<pro|con>" -> summary
  std::map<std::string, EvalSummary> attacks;
  // table name -> rows (first row is the header)
  std::map<std::string, std::vector<std::vector<std::string>>> tables;
  std::vector<CurveRow> ablation_n;
  std::vector<CurveRow> ablation_corpus;
};

RunReport run_pipeline(const ExperimentConfig& cfg);
std::vector<CurveRow> run_ablation_n(const ExperimentConfig& cfg);
std::vector<CurveRow> run_ablation_corpus(const ExperimentConfig& cfg);

nlohmann::ordered_json to_json(const RunReport& r);
// Writes report.json plus CSV tables and curves; refuses to overwrite an
// existing report unless `force`. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const RunReport& r,
                                               const std::filesystem::path& out_dir,
                                               bool force);

std::string stance_name(Stance s);

}  // namespace fliprag
