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

#include "fliprag/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "fliprag/error.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

namespace {

constexpr double kQuestionRate = 0.04;
constexpr double kTopicRate = 0.13;
constexpr double kMarkerRate = 0.10;
constexpr double kStopRate = 0.32;
constexpr double kZipfExponent = 0.9;

// Connectives placed between content tokens; their regular placement gives
// the n-gram statistics something to learn.
const std::vector<std::string> kGlue = {"the", "of", "is", "and", "to",
                                        "in",  "that", "for", "a",  "with"};

class WordFactory {
 public:
  explicit WordFactory(Rng& rng) : rng_(rng) {
    for (const auto& w : stopwords()) used_.insert(w);
  }

  std::string make() {
    static const char* kOnsets[] = {"b", "c", "d", "f", "g", "k", "l", "m",
                                    "n", "p", "r", "s", "t", "v", "z", "br",
                                    "dr", "gl", "pr", "st", "tr", "pl", "cr"};
    static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
    std::uniform_int_distribution<int> n_syll(2, 3);
    std::uniform_int_distribution<std::size_t> onset(0, std::size(kOnsets) - 1);
    std::uniform_int_distribution<std::size_t> vowel(0, std::size(kVowels) - 1);
    for (;;) {
      std::string w;
      int n = n_syll(rng_);
      for (int i = 0; i < n; ++i) {
        w += kOnsets[onset(rng_)];
        w += kVowels[vowel(rng_)];
      }
      if (used_.insert(w).second) return w;
    }
  }

  std::vector<std::string> make(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(make());
    return out;
  }

 private:
  Rng& rng_;
  std::unordered_set<std::string> used_;
};

std::string numbered(const std::string& prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, i);
  return prefix + buf;
}

std::size_t scaled(std::size_t len, double rate) {
  return static_cast<std::size_t>(std::lround(static_cast<double>(len) * rate));
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

class Writer {
 public:
  Writer(const std::vector<std::string>& shared, Rng& rng) : shared_(shared), rng_(rng) {
    std::vector<double> w(shared.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = 1.0 / std::pow(static_cast<double>(i + 1), kZipfExponent);
    }
    zipf_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }

  std::string shared_word() { return shared_[zipf_(rng_)]; }

  // Arranges the given content tokens into sentences, filling with shared
  // vocabulary up to `len` and placing `n_stop` connectives between them.
  std::string compose(std::vector<std::string> content, std::size_t len,
                      std::size_t n_stop) {
    n_stop = std::min(n_stop, len);
    std::size_t n_content = len - n_stop;
    while (content.size() < n_content) content.push_back(shared_word());
    content.resize(n_content);
    std::shuffle(content.begin(), content.end(), rng_);

    // Spread the connectives evenly; each takes the slot before a content
    // token.
    std::vector<std::string> out;
    out.reserve(len);
    std::size_t placed = 0;
    for (std::size_t i = 0; i < content.size(); ++i) {
      std::size_t want = (i + 1) * n_stop / std::max<std::size_t>(1, n_content);
      while (placed < want) {
        out.push_back(kGlue[(placed + i) % kGlue.size()]);
        ++placed;
      }
      out.push_back(std::move(content[i]));
    }
    while (placed < n_stop) {
      out.push_back(kGlue[placed % kGlue.size()]);
      ++placed;
    }

    std::string text;
    std::size_t since_period = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!text.empty()) text.push_back(' ');
      std::string w = out[i];
      if (since_period == 0 && !w.empty()) w[0] = static_cast<char>(w[0] - 'a' + 'A');
      text += w;
      if (++since_period == 12 || i + 1 == out.size()) {
        text.push_back('.');
        since_period = 0;
      }
    }
    return text;
  }

 private:
  const std::vector<std::string>& shared_;
  Rng& rng_;
  std::discrete_distribution<std::size_t> zipf_;
};

std::string build_question(const std::vector<std::string>& terms) {
  if (terms.size() == 1) return "Should we allow " + terms[0] + "?";
  std::string q = "Should the";
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) q += " " + terms[i];
  q += " be " + terms.back() + "?";
  return q;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (topics < 1 || docs_per_stance < 1 || vocab_per_topic < 1 ||
      shared_vocab < 1 || doc_len < 1 || question_terms < 1 ||
      stance_markers < 1) {
    throw InvalidArgument("synthetic spec counts must be >= 1");
  }
  if (question_terms > vocab_per_topic) {
    throw InvalidArgument("question_terms exceeds vocab_per_topic");
  }
  if (!(lead_boost >= 1.0)) throw InvalidArgument("lead_boost must be >= 1");
}

SyntheticWorld generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  SyntheticWorld world;

  Rng vocab_rng(derive_seed(seed, "synthetic.vocab"));
  WordFactory words(vocab_rng);
  std::vector<std::string> shared = words.make(spec.shared_vocab);
  world.pro_markers = words.make(spec.stance_markers);
  world.con_markers = words.make(spec.stance_markers);
  world.neutral_markers = words.make(std::max<std::size_t>(1, spec.stance_markers / 2));
  std::vector<std::vector<std::string>> topic_terms(spec.topics);
  for (auto& terms : topic_terms) terms = words.make(spec.vocab_per_topic);

  static const Domain kDomains[] = {Domain::health, Domain::society,
                                    Domain::government, Domain::education};

  Rng rng(derive_seed(seed, "synthetic.topics"));
  Writer writer(shared, rng);
  const std::size_t len = spec.doc_len;

  for (std::size_t ti = 0; ti < spec.topics; ++ti) {
    const auto& terms = topic_terms[ti];
    std::vector<std::string> qterms(terms.begin(), terms.begin() + spec.question_terms);
    std::vector<std::string> others(terms.begin() + spec.question_terms, terms.end());
    if (others.empty()) others = qterms;

    Topic topic;
    topic.id = numbered("t", ti, 2);
    topic.question = build_question(qterms);
    topic.domain = kDomains[ti % std::size(kDomains)];

    // Question terms pair up with the remaining topic terms.
    for (std::size_t i = 0; i < qterms.size(); ++i) {
      const auto& syn = others[i % others.size()];
      if (syn != qterms[i]) {
        world.synonyms[qterms[i]].push_back(syn);
        world.synonyms[syn].push_back(qterms[i]);
      }
    }

    auto make_doc = [&](Stance stance, std::size_t idx) {
      const bool lead = idx == 0;
      const double boost = lead ? spec.lead_boost : 1.0;
      // Leads are fixed-shape overview passages; the rest vary.
      const int jit = lead ? 0 : static_cast<int>(spec.count_jitter);
      std::uniform_int_distribution<int> jitter(-jit, jit);
      auto count = [&](double rate, double mult) {
        long n = static_cast<long>(scaled(len, rate * mult)) + jitter(rng);
        return static_cast<std::size_t>(std::max<long>(1, n));
      };
      // Question-term focus falls off linearly over the first focus_span
      // documents of a class, so relevance within a topic is graded.
      double focus = 1.0;
      if (idx < spec.focus_span) {
        focus += (spec.lead_boost - 1.0) * (1.0 - static_cast<double>(idx) /
                                                     static_cast<double>(spec.focus_span));
      }
      std::size_t n_q = count(kQuestionRate, focus);
      std::size_t n_t = count(kTopicRate, boost);
      std::size_t n_m = std::max<std::size_t>(1, scaled(len, kMarkerRate));
      std::size_t n_stop = scaled(len, kStopRate);
      // Short documents keep their topic and stance signal.
      while (n_q + n_t + n_m + n_stop > len && n_stop > 0) --n_stop;
      while (n_q + n_t + n_m > len && n_t > 1) --n_t;
      while (n_q + n_t + n_m > len && n_m > 1) --n_m;
      while (n_q + n_t + n_m > len && n_q > 1) --n_q;

      const auto& markers = stance == kPro   ? world.pro_markers
                            : stance == kCon ? world.con_markers
                                             : world.neutral_markers;
      // Rotate which question terms a document uses.
      const std::size_t rot = idx % qterms.size();
      std::vector<std::string> content;
      for (std::size_t i = 0; i < n_q; ++i) {
        content.push_back(qterms[(i + rot) % qterms.size()]);
      }
      for (std::size_t i = 0; i < n_t; ++i) content.push_back(pick(others, rng));
      for (std::size_t i = 0; i < n_m; ++i) content.push_back(pick(markers, rng));
      std::string text = writer.compose(std::move(content), len, n_stop);

      const char* tag = stance == kPro ? "-pro-" : stance == kCon ? "-con-" : "-neu-";
      std::string id = numbered(topic.id + tag, idx, 2);
      world.corpus.add(Document(id, std::move(text), topic.id, stance));
      (stance == kPro   ? topic.pro_doc_ids
       : stance == kCon ? topic.con_doc_ids
                        : topic.neutral_doc_ids)
          .push_back(id);
    };

    for (std::size_t i = 0; i < spec.docs_per_stance; ++i) {
      make_doc(kPro, i);
      make_doc(kCon, i);
    }
    for (std::size_t i = 0; i < spec.neutral_per_topic; ++i) make_doc(kNeutral, i);
    world.topics.push_back(std::move(topic));
  }

  // Query set: short keyword queries over each topic's terms. Own stream,
  // so the corpus does not depend on queries_per_topic.
  Rng qrng(derive_seed(seed, "synthetic.queries"));
  for (std::size_t ti = 0; ti < spec.topics; ++ti) {
    auto& out = world.topic_queries[world.topics[ti].id];
    for (std::size_t i = 0; i < spec.queries_per_topic; ++i) {
      const std::size_t n = std::min<std::size_t>(topic_terms[ti].size(), 2 + i % 2);
      std::vector<std::string> picked;
      std::sample(topic_terms[ti].begin(), topic_terms[ti].end(), std::back_inserter(picked),
                  n, qrng);
      std::shuffle(picked.begin(), picked.end(), qrng);
      out.push_back(join_tokens(picked));
    }
  }

  // Filler: background text with an occasional stray topic term.
  Rng frng(derive_seed(seed, "synthetic.filler"));
  Writer fwriter(shared, frng);
  std::bernoulli_distribution stray(0.5);
  std::uniform_int_distribution<std::size_t> any_topic(0, spec.topics - 1);
  const int width = spec.filler_docs > 999999 ? 8 : 6;
  for (std::size_t i = 0; i < spec.filler_docs; ++i) {
    std::vector<std::string> content;
    if (stray(frng)) content.push_back(pick(topic_terms[any_topic(frng)], frng));
    std::string text = fwriter.compose(std::move(content), len, scaled(len, kStopRate));
    world.corpus.add(Document(numbered("f", i, width), std::move(text)));
  }
  return world;
}

}  // namespace fliprag
