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
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "fliprag/contrastive.hpp"
#include "fliprag/error.hpp"
#include "fliprag/retrieval.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {
namespace {

using testing::small_corpus;

// Independent scorer: mean of known rows, then a plain dot product.
double oracle_score(const EmbeddingModel& m, const TokenList& q, const TokenList& d) {
  auto mean = [&](const TokenList& toks) {
    std::vector<double> v(m.dim(), 0.0);
    std::size_t n = 0;
    for (const auto& t : toks) {
      const long r = m.row_of(t);
      if (r < 0) continue;
      for (std::size_t i = 0; i < m.dim(); ++i) v[i] += m.row(static_cast<std::size_t>(r))[i];
      ++n;
    }
    if (n) {
      for (auto& x : v) x /= static_cast<double>(n);
    }
    return v;
  };
  const auto a = mean(q), b = mean(d);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<std::string> oracle_order(const EmbeddingModel& m, const Corpus& c,
                                      const TokenList& q) {
  std::vector<std::pair<double, std::string>> v;
  for (const auto& d : c.documents()) v.emplace_back(oracle_score(m, q, d.tokens()), d.id());
  std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  std::vector<std::string> ids;
  for (const auto& p : v) ids.push_back(p.second);
  return ids;
}

TEST(Embedding, OutOfVocabularyTokensAreIgnored) {
  const auto m = EmbeddingModel::random({"a", "b"}, 4, 1);
  EXPECT_EQ(m.row_of("zzz"), -1);
  EXPECT_EQ(embed_text(m, {"a", "zzz"}), embed_text(m, {"a"}));
  EXPECT_EQ(embed_text(m, {"zzz"}), std::vector<double>(4, 0.0));
}

TEST(Embedding, FingerprintTracksWeights) {
  auto m = EmbeddingModel::random({"a", "b"}, 4, 1);
  const auto f = m.fingerprint();
  EXPECT_EQ(EmbeddingModel::random({"a", "b"}, 4, 1).fingerprint(), f);
  m.table()[3] += 1e-9;
  EXPECT_NE(m.fingerprint(), f);
}

TEST(Embedding, CheckpointRoundTrip) {
  testing::TempDir dir;
  const auto m = EmbeddingModel::random({"x", "y", "z"}, 5, 9);
  save_model(m, dir.path() / "m.bin");
  EXPECT_EQ(load_model(dir.path() / "m.bin"), m);
  EXPECT_TRUE(std::filesystem::exists(vocab_sidecar(dir.path() / "m.bin")));
}

class DenseRankProperty : public ::testing::TestWithParam<int> {};

TEST_P(DenseRankProperty, MatchesBruteForce) {
  const Corpus c = small_corpus();
  const auto m = EmbeddingModel::random(c.vocabulary_tokens(), 8,
                                        derive_seed(1, "test.dense", GetParam()));
  DenseIndex idx(std::make_shared<EmbeddingModel>(m), std::make_shared<Corpus>(c));
  for (const char* q : {"vaccines mandatory", "nuclear energy", "recipe goal unknownword"}) {
    const TokenList qt = tokenize(q);
    const auto want = oracle_order(m, c, qt);
    const Ranking full = idx.rank(qt, 100);
    ASSERT_EQ(full.ids(), want) << q;
    EXPECT_EQ(idx.rank(qt, 3).ids(), std::vector<std::string>(want.begin(), want.begin() + 3));
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(idx.position(qt, want[i]), i + 1);
      EXPECT_NEAR(full.entries[i].score, oracle_score(m, qt, c.at(want[i]).tokens()), 1e-12);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, DenseRankProperty, ::testing::Range(0, 10));

TEST(DenseIndex, TiesBreakByAscendingId) {
  Corpus c;
  c.add(Document("b", "same words"));
  c.add(Document("a", "same words"));
  c.add(Document("c", "same words"));
  const auto m = std::make_shared<EmbeddingModel>(
      EmbeddingModel::random(c.vocabulary_tokens(), 4, 2));
  DenseIndex idx(m, std::make_shared<Corpus>(c));
  EXPECT_EQ(idx.rank({"same"}, 3).ids(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(DenseIndex, RebindSeesNewText) {
  const Corpus c = small_corpus();
  const auto m = std::make_shared<EmbeddingModel>(
      EmbeddingModel::random(c.vocabulary_tokens(), 8, 3));
  DenseIndex idx(m, std::make_shared<Corpus>(c));
  auto edited = std::make_shared<Corpus>(c);
  edited->replace_text("f1", "nuclear energy nuclear", Provenance::trigger_poisoned);
  const auto re = idx.rebind(edited);
  const DenseIndex fresh(m, edited);
  const TokenList q = tokenize("nuclear energy");
  EXPECT_EQ(re->rank(q, 20).ids(), fresh.rank(q, 20).ids());
  EXPECT_NE(re->rank(q, 20).ids(), idx.rank(q, 20).ids());
}

TEST(Tfidf, IdfAndScoreMatchOracle) {
  const Corpus c = small_corpus();
  const double n = static_cast<double>(c.doc_count());
  EXPECT_DOUBLE_EQ(idf(c, "nuclear"), std::log(n / 4.0));
  EXPECT_DOUBLE_EQ(idf(c, "recipe"), std::log(n / 2.0));
  EXPECT_DOUBLE_EQ(idf(c, "absent"), std::log(n / 1.0));
  const Document& d = c.at("b2");
  // b2 has 5 tokens, one each of nuclear and energy.
  const double want = 0.2 * std::log(n / 4.0) + 0.2 * std::log(n / 4.0);
  EXPECT_NEAR(tfidf_score(c, tokenize("nuclear energy"), d), want, 1e-12);

  TfidfIndex idx(std::make_shared<Corpus>(c));
  const TokenList q = tokenize("nuclear waste");
  const auto scores = idx.score_all(q);
  for (std::size_t i = 0; i < c.doc_count(); ++i) {
    EXPECT_NEAR(scores[i], tfidf_score(c, q, c.documents()[i]), 1e-12);
  }
  EXPECT_EQ(idx.rank(q, 1).ids().front(), "b2");
}

TEST(Contrastive, LossMatchesHandComputation) {
  EmbeddingModel m({"q", "p", "n"}, 1);
  m.table()[0] = 1.0;   // q
  m.table()[1] = 2.0;   // p
  m.table()[2] = -1.0;  // n
  ContrastiveExample ex{{0}, {1}, {{2}}};
  const double sp = 2.0, sn = -1.0;
  EXPECT_NEAR(contrastive_loss(m, ex), -std::log(std::exp(sp) / (std::exp(sp) + std::exp(sn))),
              1e-12);
}

TEST(Contrastive, StepReducesLoss) {
  auto m = EmbeddingModel::random({"q", "p", "n1", "n2"}, 6, 4);
  ContrastiveExample ex{{0}, {1}, {{2}, {3}}};
  ContrastiveTrainer tr(m, AdamConfig{.lr = 0.05});
  const ContrastiveExample* batch[] = {&ex};
  const double first = tr.step(batch);
  EXPECT_NEAR(first, contrastive_loss(EmbeddingModel::random({"q", "p", "n1", "n2"}, 6, 4), ex),
              1e-12);
  for (int i = 0; i < 50; ++i) tr.step(batch);
  EXPECT_LT(contrastive_loss(m, ex), first * 0.5);
  EXPECT_TRUE(m.all_finite());
}

TEST(TrainTarget, RanksTopicDocumentsFirstAndIsDeterministic) {
  const Corpus c = small_corpus();
  const auto topics = testing::small_topics(c);
  TargetHyper h;
  h.dim = 8;
  h.epochs = 40;
  h.batch = 4;
  h.negatives_per_positive = 3;
  h.crop_len = 3;
  const auto m = train_target(c, topics, h, 7);
  EXPECT_EQ(m, train_target(c, topics, h, 7));
  for (const auto& t : topics) {
    const auto order = rank(m, c, tokenize(t.question), c.doc_count()).ids();
    const auto docs = topic_documents(c, t.id);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      EXPECT_EQ(c.at(order[i]).topic_id(), t.id) << t.id << " position " << i;
    }
  }
}

}  // namespace
}  // namespace fliprag
