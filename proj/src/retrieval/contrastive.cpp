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

#include "fliprag/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fliprag/error.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

namespace {

// Scores of the positive (index 0) and every negative.
std::vector<double> example_scores(const EmbeddingModel& model,
                                   const std::vector<double>& q,
                                   const ContrastiveExample& ex,
                                   std::vector<std::vector<double>>* embs) {
  std::vector<double> s;
  s.reserve(1 + ex.negatives.size());
  auto add = [&](const Encoded& d) {
    auto e = model.embed(d);
    s.push_back(dot(q, e));
    if (embs) embs->push_back(std::move(e));
  };
  add(ex.positive);
  for (const auto& n : ex.negatives) add(n);
  return s;
}

double log_sum_exp(const std::vector<double>& s) {
  const double mx = *std::max_element(s.begin(), s.end());
  double acc = 0.0;
  for (double x : s) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// Adds scale * dE(ids)/drow to the gradient rows.
void scatter(std::vector<double>& grad, std::size_t dim, const Encoded& ids,
             const std::vector<double>& upstream, double scale) {
  if (ids.empty()) return;
  const double w = scale / static_cast<double>(ids.size());
  for (auto r : ids) {
    double* g = grad.data() + static_cast<std::size_t>(r) * dim;
    for (std::size_t j = 0; j < dim; ++j) g[j] += w * upstream[j];
  }
}

}  // namespace

double contrastive_loss(const EmbeddingModel& model, const ContrastiveExample& ex) {
  auto q = model.embed(ex.query);
  auto s = example_scores(model, q, ex, nullptr);
  return log_sum_exp(s) - s[0];
}

ContrastiveTrainer::ContrastiveTrainer(EmbeddingModel& model, AdamConfig adam)
    : model_(model),
      adam_(adam),
      grad_(model.table().size(), 0.0),
      m_(grad_.size(), 0.0),
      v_(grad_.size(), 0.0) {}

double ContrastiveTrainer::accumulate(const ContrastiveExample& ex) {
  const std::size_t dim = model_.dim();
  auto q = model_.embed(ex.query);
  std::vector<std::vector<double>> embs;
  auto s = example_scores(model_, q, ex, &embs);
  const double lse = log_sum_exp(s);
  const double loss = lse - s[0];

  // dL/ds_i = p_i - [i == 0]
  std::vector<double> coef(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) coef[i] = std::exp(s[i] - lse);
  coef[0] -= 1.0;

  std::vector<double> gq(dim, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) gq[j] += coef[i] * embs[i][j];
  }
  scatter(grad_, dim, ex.query, gq, 1.0);
  scatter(grad_, dim, ex.positive, q, coef[0]);
  for (std::size_t i = 0; i < ex.negatives.size(); ++i) {
    scatter(grad_, dim, ex.negatives[i], q, coef[i + 1]);
  }
  return loss;
}

double ContrastiveTrainer::step(std::span<const ContrastiveExample* const> batch) {
  if (batch.empty()) return 0.0;
  std::fill(grad_.begin(), grad_.end(), 0.0);
  double total = 0.0;
  for (const auto* ex : batch) total += accumulate(*ex);
  const double inv = 1.0 / static_cast<double>(batch.size());

  ++t_;
  const double bc1 = 1.0 - std::pow(adam_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(adam_.beta2, static_cast<double>(t_));
  auto w = model_.table();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = grad_[i] * inv;
    m_[i] = adam_.beta1 * m_[i] + (1.0 - adam_.beta1) * g;
    v_[i] = adam_.beta2 * v_[i] + (1.0 - adam_.beta2) * g * g;
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    w[i] -= adam_.lr * mhat / (std::sqrt(vhat) + adam_.eps);
  }
  return total * inv;
}

EmbeddingModel train_target(const Corpus& corpus, const std::vector<Topic>& topics,
                            const TargetHyper& hyper, std::uint64_t seed) {
  if (corpus.empty()) throw InvalidArgument("cannot train on an empty corpus");
  if (topics.empty()) throw InvalidArgument("train_target needs at least one topic");

  EmbeddingModel model = EmbeddingModel::random(
      corpus.vocabulary_tokens(), hyper.dim, derive_seed(seed, "target.init"),
      hyper.init_scale, "target");

  struct Pair {
    Encoded query;
    Encoded doc;
    std::optional<std::string> topic;
    bool crop = false;
    std::size_t doc_index = 0;
  };
  std::vector<Pair> pairs;
  for (const auto& t : topics) {
    auto docs = topic_documents(corpus, t.id);
    if (docs.empty()) {
      throw InvalidArgument("topic '" + t.id + "' has no documents");
    }
    Encoded q = model.encode(tokenize(t.question));
    for (const auto* d : docs) pairs.push_back({q, model.encode(d->tokens()), t.id});
  }
  std::vector<Encoded> all_docs;
  std::vector<const std::optional<std::string>*> all_topics;
  for (const auto& d : corpus.documents()) {
    all_docs.push_back(model.encode(d.tokens()));
    all_topics.push_back(&d.topic_id());
  }

  for (std::size_t i = 0; i < all_docs.size(); ++i) {
    for (std::size_t c = 0; c < hyper.crop_pairs_per_doc; ++c) {
      pairs.push_back({{}, {}, *all_topics[i], true, i});
    }
  }

  Rng rng(derive_seed(seed, "target.train"));
  auto crop = [&](const Encoded& d) {
    if (d.size() <= hyper.crop_len) return d;
    std::uniform_int_distribution<std::size_t> start(0, d.size() - hyper.crop_len);
    auto s = static_cast<long>(start(rng));
    return Encoded(d.begin() + s, d.begin() + s + static_cast<long>(hyper.crop_len));
  };
  std::uniform_int_distribution<std::size_t> any_doc(0, all_docs.size() - 1);
  ContrastiveTrainer trainer(model, AdamConfig{.lr = hyper.lr});
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t batch = std::max<std::size_t>(1, hyper.batch);

  std::vector<ContrastiveExample> examples(batch);
  std::vector<const ContrastiveExample*> ptrs;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      ptrs.clear();
      for (std::size_t i = start; i < end; ++i) {
        const Pair& p = pairs[order[i]];
        ContrastiveExample& ex = examples[i - start];
        if (p.crop) {
          ex.query = crop(all_docs[p.doc_index]);
          ex.positive = crop(all_docs[p.doc_index]);
        } else {
          ex.query = p.query;
          ex.positive = p.doc;
        }
        ex.negatives.clear();
        // Rejection-sample documents from other topics (or unlabeled).
        std::size_t tries = 0;
        while (ex.negatives.size() < hyper.negatives_per_positive &&
               tries++ < 50 * (hyper.negatives_per_positive + 1)) {
          std::size_t j = any_doc(rng);
          if (p.crop ? j == p.doc_index
                     : (*all_topics[j] == p.topic)) {
            continue;
          }
          ex.negatives.push_back(all_docs[j]);
        }
        ptrs.push_back(&ex);
      }
      trainer.step(ptrs);
    }
  }
  return model;
}

}  // namespace fliprag
