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
#include <array>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "fliprag/defense.hpp"
#include "fliprag/error.hpp"
#include "fliprag/ngram.hpp"
#include "fliprag/ragsim_internal.hpp"
#include "fliprag/retrieval.hpp"
#include "fliprag/synthetic.hpp"
#include "fliprag/text.hpp"

namespace fliprag {
namespace {

// Straight from the definition: weights tf*idf over positive-weight terms,
// share of that mass on one query's distinct content terms, max over queries.
double naive_spamicity(const Document& doc, const std::vector<TokenList>& queries,
                       const Corpus& c) {
  const double n = static_cast<double>(c.doc_count());
  std::unordered_map<std::string, double> w;
  for (const auto& t : doc.tokens()) {
    if (w.count(t)) continue;
    double df = 0, tf = 0;
    for (const auto& d : c.documents()) {
      df += std::count(d.tokens().begin(), d.tokens().end(), t) > 0;
    }
    tf = static_cast<double>(std::count(doc.tokens().begin(), doc.tokens().end(), t)) /
         static_cast<double>(doc.tokens().size());
    w[t] = tf * std::log(n / (1.0 + df));
  }
  double total = 0;
  for (const auto& [t, x] : w) total += std::max(0.0, x);
  if (total == 0) return 0;
  double best = 0;
  for (const auto& q : queries) {
    std::set<std::string> terms;
    for (const auto& t : q) {
      if (!is_stopword(t)) terms.insert(t);
    }
    double s = 0;
    for (const auto& t : terms) {
      if (w.count(t)) s += std::max(0.0, w[t]);
    }
    best = std::max(best, s / total);
  }
  return best;
}

TEST(Spamicity, MatchesOracleOnEveryDocument) {
  const Corpus c = testing::small_corpus();
  const std::vector<std::vector<TokenList>> sets = {
      {tokenize("Should vaccines be mandatory in schools?")},
      {tokenize("nuclear energy"), tokenize("oven flour")},
      {tokenize("the of and")},
  };
  for (const auto& qs : sets) {
    for (const auto& d : c.documents()) {
      const double s = spamicity(d, qs, c);
      EXPECT_NEAR(s, naive_spamicity(d, qs, c), 1e-12) << d.id();
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(Spamicity, MoreQueriesNeverLowerTheScore) {
  const Corpus c = testing::small_corpus();
  std::vector<TokenList> qs;
  for (const char* q : {"vaccines risk", "nuclear waste", "recipe oven", "football goal"}) {
    double before = 0;
    for (const auto& d : c.documents()) before += spamicity(d, qs, c);
    qs.push_back(tokenize(q));
    double after = 0;
    for (const auto& d : c.documents()) after += spamicity(d, qs, c);
    EXPECT_GE(after, before);
  }
}

TEST(Spamicity, InjectedQuestionRaisesScore) {
  Corpus c = testing::small_corpus();
  const std::string q = "Is nuclear energy a good idea?";
  const double before = spamicity(c.at("b3"), {tokenize(q)}, c);
  c.replace_text("b3", q + " " + q + " " + c.at("b3").text(), Provenance::question_injected);
  const double after = spamicity(c.at("b3"), {tokenize(q)}, c);
  EXPECT_GT(after, before);
  const auto v = spamicity_verdict(c.at("b3"), {tokenize(q)}, c, after);
  EXPECT_FALSE(v.flagged);  // strictly above the threshold only
  EXPECT_EQ(v.detector, Detector::spamicity);
}

// Windows start at multiples of step; a start is visited unless the window
// before it already reached the end of the document.
KeywordDensity naive_density(const TokenList& doc, const TokenList& q,
                             const std::vector<std::size_t>& sizes, std::size_t step) {
  std::set<std::string> terms;
  for (const auto& t : q) {
    if (!is_stopword(t)) terms.insert(t);
  }
  auto hits = [&](std::size_t a, std::size_t b) {
    std::size_t h = 0;
    for (std::size_t i = a; i < b; ++i) h += terms.count(doc[i]);
    return h;
  };
  KeywordDensity out;
  if (!doc.empty()) out.overall = 100.0 * hits(0, doc.size()) / doc.size();
  for (auto w : sizes) {
    double best = 0;
    for (std::size_t s = 0; s < doc.size(); s += step) {
      if (s >= step && s - step + w >= doc.size()) break;
      const std::size_t e = std::min(doc.size(), s + w);
      best = std::max(best, 100.0 * hits(s, e) / (e - s));
    }
    out.max_windowed[w] = best;
  }
  return out;
}

TEST(KeywordDensity, MatchesOracleOnRandomDocuments) {
  const std::vector<std::string> alphabet = {"vaccines", "mandatory", "the", "risk",
                                             "schools",  "of",        "benefit"};
  const TokenList q = tokenize("Should vaccines be mandatory in schools");
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = rng() % 160;
    TokenList doc;
    for (std::size_t i = 0; i < len; ++i) doc.push_back(alphabet[rng() % alphabet.size()]);
    const std::size_t step = 1 + rng() % 7;
    const std::vector<std::size_t> sizes = {1 + rng() % 30, 20, 50, 100};
    const auto got = keyword_density(doc, q, sizes, step);
    const auto want = naive_density(doc, q, sizes, step);
    EXPECT_NEAR(got.overall, want.overall, 1e-9);
    for (auto w : sizes) EXPECT_NEAR(got.max_windowed.at(w), want.max_windowed.at(w), 1e-9);
  }
}

TEST(KeywordDensity, HandExampleAndErrors) {
  const TokenList doc = tokenize("vaccines the of the vaccines");
  const auto d = keyword_density(doc, tokenize("vaccines"), {2}, 1);
  EXPECT_DOUBLE_EQ(d.overall, 40.0);
  EXPECT_DOUBLE_EQ(d.max_windowed.at(2), 50.0);
  EXPECT_THROW(keyword_density(doc, doc, {20}, 0), InvalidArgument);
  EXPECT_THROW(keyword_density(doc, doc, {0}, 5), InvalidArgument);
  EXPECT_DOUBLE_EQ(keyword_density({}, doc).overall, 0.0);
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile({10, 20}, 0.25), 12.5);
  EXPECT_THROW(quantile({}, 0.5), InvalidArgument);
  EXPECT_THROW(quantile({1}, 1.5), InvalidArgument);
  EXPECT_DOUBLE_EQ(detection_rate({0.1, 0.2, 0.3, 0.4}, 0.2), 50.0);
  EXPECT_DOUBLE_EQ(detection_rate({}, 0.2), 0.0);
}

TEST(Perplexity, FullBandAdmitsEveryCleanDocument) {
  const Corpus c = testing::small_corpus();
  const NGramLM lm = train_ngram(c);
  const auto band = calibrate_band(lm, c, 0.0, 1.0);
  EXPECT_LE(band.low, band.high);
  for (const auto& d : c.documents()) {
    EXPECT_FALSE(perplexity_verdict(lm, d.tokens(), band).flagged) << d.id();
  }
  const auto v = perplexity_verdict(lm, tokenize("zqx vbn wqp lkj mnb"), band);
  EXPECT_TRUE(v.flagged);
  EXPECT_GT(v.score, band.high);
}

TEST(Perplexity, CorpusTextInsideBandRandomTextAbove) {
  SyntheticSpec spec;
  spec.topics = 5;
  spec.filler_docs = 100;
  const SyntheticWorld w = generate_synthetic(spec, 3);
  const NGramLM lm = train_ngram(w.corpus);
  std::vector<double> ppl;
  for (const auto& d : w.corpus.documents()) ppl.push_back(lm.log_ppl(d.tokens()));
  const double p90 = quantile(ppl, 0.9), p99 = quantile(ppl, 0.99);
  std::mt19937_64 rng(11);
  const auto& docs = w.corpus.documents();
  const auto& vocab = w.corpus.vocabulary_tokens();
  EXPECT_LT(lm.log_ppl(docs[rng() % docs.size()].tokens()), p90);
  for (int i = 0; i < 10; ++i) {
    TokenList noise;
    for (int j = 0; j < 50; ++j) noise.push_back(vocab[rng() % vocab.size()]);
    EXPECT_GT(lm.log_ppl(noise), p99);
  }
}

TEST(LeakDetector, VariantsScoreAsMeasured) {
  const std::map<std::string, std::pair<double, bool>> want = {
      {"origin", {1.0, true}},
      {"benign_statement", {1.0, true}},
      {"simple", {0.5, false}},
      {"benign_simple", {0.5, false}},
  };
  const RagSystem sys(std::make_shared<TfidfIndex>(std::make_shared<Corpus>(testing::small_corpus())),
                      RagConfig{});
  const auto variants = leak_instruction_variants("Is nuclear energy a good idea?");
  ASSERT_EQ(variants.size(), want.size());
  for (const auto& v : variants) {
    const auto verdict = detect_leak_instruction(v.text);
    EXPECT_NEAR(verdict.score, want.at(v.tag).first, 1e-12) << v.tag;
    EXPECT_EQ(verdict.flagged, want.at(v.tag).second) << v.tag;
    EXPECT_TRUE(sys.is_leak_instruction(v.text)) << v.tag;
  }
  EXPECT_DOUBLE_EQ(detect_leak_instruction("Is nuclear energy a good idea?").score, 0.0);
  EXPECT_EQ(to_string(Detector::leak_instruction), "leak_instruction");
}

TEST(Paraphrase, AvoidsOriginalContentWords) {
  const std::map<std::string, std::vector<std::string>> syn = {
      {"vaccines", {"shots", "vaccines", "jabs"}},
      {"mandatory", {"compulsory", "schools"}},
  };
  const std::string q = "Should vaccines be mandatory in schools?";
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::string p = paraphrase_query(q, syn, seed);
    EXPECT_EQ(p, paraphrase_query(q, syn, seed));
    const auto toks = tokenize(p);
    const auto orig = content_tokens(tokenize(q));
    for (const auto& t : content_tokens(toks)) {
      EXPECT_EQ(std::count(orig.begin(), orig.end(), t), 0) << p;
    }
    // "schools" has no synonym and is dropped; stopwords stay.
    EXPECT_EQ(toks.size(), 5u) << p;
    EXPECT_EQ(toks[0], "should");
  }
  EXPECT_THROW(paraphrase_query_external(q, HttpEndpoint{}), InvalidArgument);
  EXPECT_NE(paraphrase_prompt(q).find(q), std::string::npos);
  EXPECT_DOUBLE_EQ(content_overlap("vaccines nuclear", "the vaccines"), 0.5);
  EXPECT_DOUBLE_EQ(content_overlap("the of", "vaccines"), 0.0);
}

class SmoothingTest : public ::testing::Test {
 protected:
  SmoothingTest()
      : corpus_(std::make_shared<Corpus>(testing::small_corpus())),
        sys_(std::make_shared<TfidfIndex>(corpus_), RagConfig{}),
        queries_({"Should vaccines be mandatory in schools?", "Is nuclear energy a good idea?",
                  "vaccines risk oppose", "recipe oven"}) {}

  std::shared_ptr<Corpus> corpus_;
  RagSystem sys_;
  std::vector<std::string> queries_;
};

TEST_F(SmoothingTest, ZeroMaskIsThePlainAnswer) {
  for (const auto& q : queries_) {
    const RagResponse plain = sys_.answer(q);
    const RagResponse m = masked_smooth_answer(sys_, q, 0.0, 11, 3);
    EXPECT_EQ(m.stance, plain.stance);
    EXPECT_EQ(m.text, plain.text);
    EXPECT_EQ(m.context_ids, plain.context_ids);
  }
}

TEST_F(SmoothingTest, BatchAgreesWithSingleQueries) {
  const auto batch = masked_smooth_answers(sys_, queries_, 0.5, 7, 13);
  ASSERT_EQ(batch.size(), queries_.size());
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    const RagResponse one = masked_smooth_answer(sys_, queries_[i], 0.5, 7, 13);
    EXPECT_EQ(batch[i].stance, one.stance);
    EXPECT_EQ(batch[i].text, one.text);
  }
  EXPECT_THROW(masked_smooth_answers(sys_, queries_, 1.0, 7, 1), InvalidArgument);
  EXPECT_THROW(masked_smooth_answers(sys_, queries_, 0.5, 0, 1), InvalidArgument);
}

TEST_F(SmoothingTest, HeavyMaskingBreaksThePoisonedMajority) {
  auto poisoned = std::make_shared<Corpus>(*corpus_);
  const std::string q = "Should vaccines be mandatory in schools?";
  for (const char* id : {"a1", "a4"}) {
    poisoned->replace_text(id, q + " " + q + " " + poisoned->at(id).text(),
                           Provenance::question_injected);
  }
  const RagSystem sys(std::make_shared<TfidfIndex>(poisoned), RagConfig{});
  ASSERT_EQ(sys.answer(q).stance, kPro);
  int broken = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    broken += masked_smooth_answer(sys, q, 0.99, 11, rep).stance != kPro;
  }
  EXPECT_GE(broken, 8);
}

TEST_F(SmoothingTest, RobustAggregateMatchesIsolatedVoteOracle) {
  for (std::size_t depth : {1u, 3u, 5u, 8u}) {
    for (std::size_t min_count : {1u, 2u, 3u}) {
      for (const auto& q : queries_) {
        // Answered alone, a document yields its own stance.
        std::array<std::size_t, 3> n{};
        for (const auto& e : TfidfIndex(corpus_).rank(tokenize(q), depth).entries) {
          ++n[static_cast<std::size_t>(corpus_->at(e.doc_id).stance_or_neutral())];
        }
        // Keywords that occur in the query never vote.
        const auto qt = tokenize(q);
        for (Stance st : {kCon, kNeutral, kPro}) {
          auto& x = n[static_cast<std::size_t>(st)];
          if (x < min_count) x = 0;
          if (std::count(qt.begin(), qt.end(), std::string(stance_word(st)))) x = 0;
        }
        Stance want = kNeutral;
        if (n[kPro] > n[kCon] && n[kPro] > n[kNeutral]) want = kPro;
        if (n[kCon] > n[kPro] && n[kCon] > n[kNeutral]) want = kCon;
        const RagResponse r = robust_aggregate_answer(sys_, q, {min_count, depth});
        EXPECT_EQ(r.stance, want) << q << " depth " << depth << " min " << min_count;
      }
    }
  }
}

}  // namespace
}  // namespace fliprag
