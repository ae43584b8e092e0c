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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "fliprag/error.hpp"
#include "fliprag/metrics.hpp"
#include "metric_oracles.hpp"

namespace fliprag {
namespace {

using Ids = std::vector<std::string>;

TEST(Metrics, AgreeWithOraclesOnRandomInstances) {
  const auto r = oracle::run_suite(500, 2024);
  EXPECT_EQ(r.instances, 500u);
  EXPECT_EQ(r.mismatches, 0u) << r.first_failure;
}

TEST(Ndcg, HandExamples) {
  // One relevant doc at rank 2: (1/log2 3) / 1.
  EXPECT_NEAR(ndcg_at(Ids{"x", "a"}, {{"a", 1.0}}, 10), 1.0 / std::log2(3.0), 1e-12);
  EXPECT_DOUBLE_EQ(ndcg_at(Ids{"a", "b"}, {{"a", 1.0}, {"b", 1.0}}, 10), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at(Ids{"a"}, {}, 10), 0.0);
  // Graded: ideal puts grade 2 first.
  const double dcg = 1.0 + 3.0 / std::log2(3.0);
  const double idcg = 3.0 + 1.0 / std::log2(3.0);
  EXPECT_NEAR(ndcg_at(Ids{"a", "b"}, {{"a", 1.0}, {"b", 2.0}}, 2), dcg / idcg, 1e-12);
  EXPECT_THROW(ndcg_at(Ids{"a"}, {}, 0), InvalidArgument);
}

TEST(Inter, CapsAtShorterRanking) {
  const auto r = inter_at(Ids{"a", "b", "c"}, Ids{"c", "a"}, 10);
  EXPECT_EQ(r.denominator, 2u);
  EXPECT_TRUE(r.capped);
  EXPECT_DOUBLE_EQ(r.value, 0.5);
  const auto full = inter_at(Ids{"a", "b"}, Ids{"b", "a"}, 2);
  EXPECT_FALSE(full.capped);
  EXPECT_DOUBLE_EQ(full.value, 1.0);
  EXPECT_DOUBLE_EQ(inter_at(Ids{}, Ids{"a"}, 10).value, 0.0);
}

TEST(Top3v, CountsTargetShareChange) {
  const std::unordered_map<std::string, Stance> st = {{"p1", kPro}, {"p2", kPro}, {"c1", kCon}};
  EXPECT_NEAR(top3_v(Ids{"c1", "x", "y"}, Ids{"p1", "p2", "c1"}, st, kPro), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(top3_v(Ids{"c1", "x", "y"}, Ids{"p1", "p2", "c1"}, st, kCon), 0.0, 1e-12);
}

TEST(RankSnapshotTest, RasrAndBrankHandExample) {
  RankSnapshot pre, post;
  pre.add_ordering("q", Ids{"a", "b", "c", "d"});
  post.add_ordering("q", Ids{"d", "a", "c", "b"});
  const TargetMap t{{"q", {"d", "b"}}};
  // d: 4 -> 1 improved, b: 2 -> 4 worsened.
  EXPECT_DOUBLE_EQ(rasr(pre, post, t), 50.0);
  EXPECT_DOUBLE_EQ(brank(pre, post, t), (4.0 - 1.0) + (2.0 - 4.0));
  EXPECT_THROW(pre.add_ordering("q2", Ids{"a", "a"}), InvalidArgument);
  EXPECT_THROW(pre.rank("zz", "a"), NotFoundError);
  EXPECT_THROW(pre.rank("q", "zz"), NotFoundError);
  EXPECT_TRUE(pre.has("q", "a"));
  EXPECT_EQ(pre.doc_count("q"), 4u);
}

TEST(RankSnapshotTest, TakeMatchesRetrieverPosition) {
  Corpus c;
  c.add(Document("1", "alpha beta"));
  c.add(Document("2", "alpha alpha"));
  c.add(Document("3", "gamma"));
  TfidfIndex idx(std::make_shared<Corpus>(c));
  const auto snap = RankSnapshot::take(idx, {{"q", tokenize("alpha")}});
  for (const auto& d : c.documents()) {
    EXPECT_EQ(snap.rank("q", d.id()), idx.position(tokenize("alpha"), d.id()));
  }
}

TEST(Opinion, SuccessAndShiftTables) {
  EXPECT_TRUE(omsr_success(kNeutral, kPro, kPro));
  EXPECT_TRUE(omsr_success(kCon, kNeutral, kPro));
  EXPECT_FALSE(omsr_success(kPro, kPro, kPro));
  EXPECT_FALSE(omsr_success(kNeutral, kCon, kPro));
  EXPECT_EQ(asv_shift(kCon, kPro, kPro), 2);
  EXPECT_EQ(asv_shift(kCon, kPro, kCon), -2);
  EXPECT_THROW(asv_shift(kCon, kPro, kNeutral), InvalidArgument);
  const std::vector<StanceOutcome> o = {{"a", kPro, kNeutral, kPro}, {"b", kPro, kPro, kNeutral}};
  EXPECT_DOUBLE_EQ(omsr(o), 50.0);
  EXPECT_DOUBLE_EQ(asv(o), 0.0);
}

TEST(Opinion, AsvBoundedProperty) {
  for (Stance pre : {kCon, kNeutral, kPro}) {
    for (Stance post : {kCon, kNeutral, kPro}) {
      for (Stance t : {kCon, kPro}) {
        const int s = asv_shift(pre, post, t);
        EXPECT_GE(s, -2);
        EXPECT_LE(s, 2);
        EXPECT_EQ(omsr_success(pre, post, t), s > 0);
      }
    }
  }
}

EvalSummary sample_summary() {
  EvalSummary s;
  s.label = "flipped/pro";
  s.topics.push_back({"t1", kPro, kNeutral, kPro, 1.0 / 3.0, 100.0, 12.0});
  s.topics.push_back({"t2", kPro, kCon, kCon, 0.0, 50.0, -2.0});
  s.topics.push_back({"t3", kPro, kNeutral, kNeutral, 0.0, std::nullopt, std::nullopt});
  s.aggregate();
  return s;
}

TEST(EvalSummaryTest, AggregatesTopicRows) {
  const EvalSummary s = sample_summary();
  EXPECT_NEAR(s.omsr_pct, 100.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.asv, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.top3_v, 1.0 / 9.0, 1e-12);
  ASSERT_TRUE(s.rasr_pct);
  EXPECT_DOUBLE_EQ(*s.rasr_pct, 75.0);
  EXPECT_DOUBLE_EQ(*s.brank, 5.0);
}

TEST(EvalSummaryTest, CsvHasHeaderTopicRowsAndSummary) {
  const EvalSummary s = sample_summary();
  std::istringstream in(to_csv(s));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 1 + s.topics.size() + 1);
  EXPECT_EQ(lines.front(), "topic,target,pre,post,success,asv,top3_v,rasr_pct,brank");
  EXPECT_EQ(lines.back().rfind("summary,", 0), 0u);
  for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), 8) << l;
}

TEST(EvalSummaryTest, JsonCarriesNullForMissingRankMetrics) {
  const auto j = to_json(sample_summary());
  EXPECT_EQ(j["label"], "flipped/pro");
  EXPECT_TRUE(j["topics"][2]["rasr_pct"].is_null());
  EXPECT_TRUE(j["ndcg10"].is_null());
  EXPECT_EQ(j["topics"].size(), 3u);
}

}  // namespace
}  // namespace fliprag
