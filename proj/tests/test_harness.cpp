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
#include <iterator>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "fliprag/error.hpp"
#include "fliprag/harness.hpp"

namespace fliprag {
namespace {

using nlohmann::json;

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.seed = 5;
  c.synthetic.topics = 4;
  c.synthetic.docs_per_stance = 6;
  c.synthetic.queries_per_topic = 4;
  c.corpus_size = 150;
  c.target.epochs = 6;
  c.imitation.hyper.epochs = 2;
  c.imitation.pairs.alpha = 10;
  c.imitation.pairs.random_pool = 30;
  c.trigger.max_len = 3;
  c.trigger.beam_width = 4;
  c.trigger.shortlist_size = 16;
  c.attacks = {"flipped", "static_text"};
  c.stances = {kPro};
  c.n_docs = 2;
  c.defense.ensemble = 3;
  c.n_list = {1, 2};
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  const auto j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(json::parse(j.dump()))).dump(), j.dump());
  const ExperimentConfig t = tiny_config();
  EXPECT_EQ(to_json(config_from_json(json::parse(to_json(t).dump()))).dump(), to_json(t).dump());
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(config_from_json(json{{"sed", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"trigger", {{"beam", 3}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"seed", "x"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"stances", {"up"}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"attacks", {"garag"}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"retriever", "bm25"}}), ConfigError);
  EXPECT_THROW(config_from_json(json::array()), ConfigError);
  EXPECT_THROW(config_from_json(json{{"defense", {{"mask_rates", {0.0, 1.0}}}}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"ablation_corpus", true},
                                     {"corpus_sizes", {2000, 2000000}}}),
               ConfigError);
  EXPECT_THROW(config_from_json(json{{"ablation_corpus", true},
                                     {"corpus_sizes", {10000, 2000}}}),
               ConfigError);
  EXPECT_THROW(config_from_json(json{{"jsonl_path", "x.jsonl"}}), ConfigError);
  const auto ok = config_from_json(json{{"stances", {"con"}}, {"n_docs", 5}});
  EXPECT_EQ(ok.stances, std::vector<Stance>{kCon});
  EXPECT_EQ(ok.n_docs, 5u);
}

TEST(Config, LoadFromFile) {
  testing::TempDir dir;
  {
    std::ofstream(dir.path() / "c.json") << R"({"seed": 3, "corpus_size": 500})";
    std::ofstream(dir.path() / "bad.json") << "{ not json";
  }
  const auto c = load_config(dir.path() / "c.json");
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.corpus_size, 500u);
  EXPECT_THROW(load_config(dir.path() / "bad.json"), ConfigError);
  EXPECT_ANY_THROW(load_config(dir.path() / "missing.json"));
}

TEST(World, SizeBelowTopicDocumentsRejected) {
  EXPECT_THROW(build_world(tiny_config(), 10), ConfigError);
  const World w = build_world(tiny_config(), 200);
  EXPECT_EQ(w.corpus->doc_count(), 200u);
  EXPECT_EQ(w.topics.size(), 4u);
}

TEST(CorpusSweep, GuardsCheckedBeforeWork) {
  ExperimentConfig c = tiny_config();
  c.corpus_sizes = {150, 2'000'000};
  EXPECT_THROW(run_ablation_corpus(c), ConfigError);
  c.corpus_sizes = {300, 150};
  EXPECT_THROW(run_ablation_corpus(c), ConfigError);
}

TEST(Audit, SharedWeightsFail) {
  AttackerModels m;
  m.init = EmbeddingModel::random({"a", "b", "c"}, 4, 1);
  m.surrogate = EmbeddingModel::random({"a", "b", "c"}, 4, 2);
  EXPECT_TRUE(audit_boundary(m.init.fingerprint() + 1, m).passed);
  EXPECT_FALSE(audit_boundary(m.surrogate.fingerprint(), m).passed);
  EXPECT_FALSE(audit_boundary(m.init.fingerprint(), m).passed);
  EXPECT_TRUE(audit_boundary(std::nullopt, m).passed);
  EXPECT_EQ(stance_name(kPro), "pro");
  EXPECT_EQ(stance_name(kCon), "con");
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { report_ = new RunReport(run_pipeline(tiny_config())); }
  static void TearDownTestSuite() {
    delete report_;
    report_ = nullptr;
  }
  static RunReport* report_;
};

RunReport* PipelineTest::report_ = nullptr;

TEST_F(PipelineTest, ReportShape) {
  const RunReport& r = *report_;
  EXPECT_TRUE(r.audit.passed);
  ASSERT_EQ(r.attacks.size(), 2u);
  EXPECT_TRUE(r.attacks.count("flipped/pro"));
  EXPECT_TRUE(r.attacks.count("static_text/pro"));
  EXPECT_EQ(r.ablation_n.size(), 2u);
  EXPECT_TRUE(r.ablation_corpus.empty());
  EXPECT_GT(r.imitation.pairs_used, 0u);
  EXPECT_EQ(r.imitation.epochs, 2u);
  for (const char* t : {"imitation", "transfer", "baselines", "spamicity", "density",
                        "perplexity", "mask_smoothing", "robust_aggregate", "leak_detection"}) {
    ASSERT_TRUE(r.tables.count(t)) << t;
    const auto& rows = r.tables.at(t);
    ASSERT_GE(rows.size(), 2u) << t;
    for (const auto& row : rows) EXPECT_EQ(row.size(), rows.front().size()) << t;
  }
  EXPECT_EQ(r.manifest.at("config").dump(), to_json(tiny_config()).dump());
}

TEST_F(PipelineTest, RerunIsIdentical) {
  EXPECT_EQ(to_json(run_pipeline(tiny_config())).dump(), to_json(*report_).dump());
}

TEST_F(PipelineTest, EmitRefusesToOverwrite) {
  testing::TempDir dir;
  const auto files = emit_report(*report_, dir.path(), false);
  // report.json, one CSV per table and attack, two N curves.
  EXPECT_EQ(files.size(), 1 + report_->tables.size() + report_->attacks.size() + 2);
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  const std::string first = slurp(dir.path() / "report.json");
  EXPECT_EQ(nlohmann::ordered_json::parse(first).dump(), to_json(*report_).dump());

  EXPECT_THROW(emit_report(*report_, dir.path(), false), IoError);
  EXPECT_NO_THROW(emit_report(*report_, dir.path(), true));
  EXPECT_EQ(slurp(dir.path() / "report.json"), first);

  const std::string csv = slurp(dir.path() / "attack_flipped_pro.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4 + 2);
  const std::string curve = slurp(dir.path() / "curve_n_omsr.csv");
  EXPECT_EQ(curve.rfind("x,y\n", 0), 0u);
}

TEST(Pipeline, BadConfigStopsBeforeWork) {
  ExperimentConfig c = tiny_config();
  c.n_docs = 0;
  EXPECT_THROW(run_pipeline(c), ConfigError);
  c = tiny_config();
  c.n_docs = 50;  // more than any topic has
  try {
    run_pipeline(c);
    FAIL() << "expected a stage failure";
  } catch (const StageError& e) {
    EXPECT_FALSE(e.stage().empty());
  }
}

}  // namespace
}  // namespace fliprag
