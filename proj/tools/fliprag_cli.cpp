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
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "fliprag/harness.hpp"
#include "fliprag/ngram.hpp"
#include "fliprag/seed.hpp"

using namespace fliprag;

namespace {

ExperimentConfig config_or_default(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return load_config(path);
}

void write_json(const std::filesystem::path& p, const nlohmann::ordered_json& j) {
  std::ofstream out(p);
  if (!out) throw IoError(p.string(), "cannot open for writing");
  out << j.dump(2) << "\n";
}

// Deploys the target behind a facade; mirrors the pipeline's first stages.
struct Deployed {
  World world;
  std::shared_ptr<const EmbeddingModel> target;
  std::unique_ptr<RagSystem> system;
};

Deployed deploy(const ExperimentConfig& cfg) {
  Deployed d{build_world(cfg), nullptr, nullptr};
  std::shared_ptr<const Retriever> r;
  if (cfg.retriever == "dense") {
    d.target = std::make_shared<const EmbeddingModel>(
        train_target(*d.world.corpus, d.world.topics, cfg.target, derive_seed(cfg.seed, "target")));
    r = std::make_shared<DenseIndex>(d.target, d.world.corpus);
  } else {
    r = std::make_shared<TfidfIndex>(d.world.corpus);
  }
  d.system = std::make_unique<RagSystem>(r, cfg.rag);
  return d;
}

std::vector<std::string> queries_of(const ExperimentConfig& cfg, const World& w) {
  std::vector<std::string> q;
  for (const auto& t : w.topics) {
    q.push_back(t.question);
    if (!cfg.imitation.topic_queries) continue;
    auto it = w.topic_queries.find(t.id);
    if (it != w.topic_queries.end()) q.insert(q.end(), it->second.begin(), it->second.end());
  }
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opinion-manipulation attack and defense toolkit for a simulated RAG system"};
  app.require_subcommand(1);
  std::string config_path, out;
  bool force = false;

  auto* gen = app.add_subcommand("gen-corpus", "Generate the synthetic corpus and topics");
  auto* train = app.add_subcommand("train-target", "Train the target dense retriever");
  auto* imitate = app.add_subcommand("imitate", "Phase 1: leak rankings and train a surrogate");
  auto* attack = app.add_subcommand("attack", "Phase 2: generate trigger plans for every topic");
  auto* evaluate = app.add_subcommand("evaluate", "Run the attacks and report metrics");
  auto* defend = app.add_subcommand("defend", "Run the attacks and the defense evaluations");
  auto* ablate = app.add_subcommand("ablate", "Poison-count or corpus-size sweep");
  auto* run_all = app.add_subcommand("run-all", "Full pipeline with every table and curve");

  for (auto* sc : {gen, train, imitate, attack, evaluate, defend, ablate, run_all}) {
    sc->add_option("-c,--config", config_path, "JSON experiment config");
    sc->add_option("-o,--out", out, "Output directory")->required();
    sc->add_flag("-f,--force", force, "Overwrite an existing report");
  }
  std::string kind = "flipped", stance = "pro";
  attack->add_option("--kind", kind, "flipped or pat_transfer")
      ->check(CLI::IsMember({"flipped", "pat_transfer"}));
  attack->add_option("--stance", stance, "Target stance")->check(CLI::IsMember({"pro", "con"}));
  std::string topic;
  std::optional<std::size_t> n_docs, beam, max_len;
  std::optional<double> lambda1, lambda2;
  std::optional<std::uint64_t> seed;
  attack->add_option("--topic", topic, "Only this topic id");
  attack->add_option("--n-docs", n_docs, "Poisoned documents per topic");
  attack->add_option("--beam", beam, "Beam width");
  attack->add_option("--max-len", max_len, "Maximum trigger length");
  attack->add_option("--lambda1", lambda1, "Fluency weight");
  attack->add_option("--lambda2", lambda2, "Consistency weight");
  attack->add_option("--seed", seed, "Master seed");
  std::vector<double> thresholds;
  defend->add_option("--thresholds", thresholds, "Spamicity thresholds, comma separated")
      ->delimiter(',');
  std::string sweep = "n";
  ablate->add_option("--sweep", sweep, "n or corpus")->check(CLI::IsMember({"n", "corpus"}));

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_or_default(config_path);
    if (n_docs) cfg.n_docs = *n_docs;
    if (beam) cfg.trigger.beam_width = *beam;
    if (max_len) cfg.trigger.max_len = *max_len;
    if (lambda1) cfg.trigger.lambda1 = *lambda1;
    if (lambda2) cfg.trigger.lambda2 = *lambda2;
    if (seed) cfg.seed = *seed;
    if (!thresholds.empty()) cfg.defense.thresholds = thresholds;
    cfg.validate();
    const std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);

    if (gen->parsed()) {
      const World w = build_world(cfg);
      save_corpus(*w.corpus, dir / "corpus.jsonl");
      save_topics(w.topics, dir / "topics.json");
      std::cout << "wrote " << w.corpus->doc_count() << " documents, " << w.topics.size()
                << " topics\n";
    } else if (train->parsed()) {
      const World w = build_world(cfg);
      const EmbeddingModel m =
          train_target(*w.corpus, w.topics, cfg.target, derive_seed(cfg.seed, "target"));
      save_model(m, dir / "target.bin");
      std::cout << "wrote " << (dir / "target.bin").string() << "\n";
    } else if (imitate->parsed() || attack->parsed()) {
      Deployed d = deploy(cfg);
      const std::uint64_t seed = derive_seed(cfg.seed, "imitation");
      const AttackerModels m =
          run_imitation(*d.system, *d.world.corpus, queries_of(cfg, d.world), cfg.imitation, seed);
      if (imitate->parsed()) {
        std::vector<EvalQuery> eq;
        for (const auto& t : d.world.topics) {
          EvalQuery e{t.id, t.question, {}};
          for (const auto* doc : topic_documents(*d.world.corpus, t.id)) e.judgments[doc->id()] = 1;
          eq.push_back(std::move(e));
        }
        const ImitationReport rep = eval_imitation(m.surrogate, *d.system, *d.world.corpus, eq);
        save_model(m.surrogate, dir / "surrogate.bin");
        write_json(dir / "imitation.json", to_json(rep));
        std::cout << to_json(rep).dump(2) << "\n";
      } else {
        const NGramLM lm = train_ngram(*d.world.corpus);
        const auto vocab = attack_vocabulary(*d.world.corpus);
        const Stance s = stance == "pro" ? kPro : kCon;
        const EmbeddingModel& sur = kind == "flipped" ? m.surrogate : m.init;
        auto plans = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < d.world.topics.size(); ++i) {
          if (!topic.empty() && d.world.topics[i].id != topic) continue;
          const AttackOptions opt{cfg.n_docs, cfg.rag.k, cfg.trigger};
          plans.push_back(to_json(plan_attack(
              *d.world.corpus, d.world.topics[i], s, sur, lm, vocab, opt,
              derive_seed(cfg.seed, "attack." + kind + "." + stance, i))));
        }
        if (plans.empty()) throw ConfigError("no topic with id '" + topic + "'");
        write_json(dir / "plans.json", plans);
        std::cout << "wrote " << plans.size() << " plans\n";
      }
    } else if (ablate->parsed()) {
      RunReport r;
      r.manifest["config"] = to_json(cfg);
      if (sweep == "n") {
        r.ablation_n = run_ablation_n(cfg);
      } else {
        cfg.ablation_corpus = true;
        cfg.validate();
        r.ablation_corpus = run_ablation_corpus(cfg);
      }
      for (const auto& p : emit_report(r, dir, force)) std::cout << p.string() << "\n";
    } else {
      if (evaluate->parsed()) {
        cfg.defense.enabled = false;
        cfg.ablation_n = false;
        cfg.ablation_corpus = false;
      } else if (defend->parsed()) {
        cfg.defense.enabled = true;
        cfg.ablation_n = false;
        cfg.ablation_corpus = false;
      }
      const RunReport r = run_pipeline(cfg);
      for (const auto& p : emit_report(r, dir, force)) std::cout << p.string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const AuditError& e) {
    std::cerr << "boundary audit failed: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
