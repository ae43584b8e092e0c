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

#include "fliprag/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fliprag/error.hpp"

namespace fliprag {

std::vector<std::string> Ranking::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.doc_id);
  return out;
}

Ranking Retriever::rank(const TokenList& query, std::size_t k) const {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  const Corpus& c = corpus();
  const auto docs = c.documents();
  std::vector<double> scores = score_all(query);
  std::vector<std::uint32_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0u);
  auto before = [&](std::uint32_t a, std::uint32_t b) {
    return ranks_before(scores[a], docs[a].id(), scores[b], docs[b].id());
  };
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(n), order.end(),
                    before);
  Ranking r;
  r.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.entries.push_back({docs[order[i]].id(), scores[order[i]]});
  }
  return r;
}

std::size_t Retriever::position(const TokenList& query,
                                const std::string& doc_id) const {
  const Corpus& c = corpus();
  if (!c.contains(doc_id)) throw NotFoundError("unknown document id '" + doc_id + "'");
  const auto docs = c.documents();
  std::vector<double> scores = score_all(query);
  std::size_t self = 0;
  while (docs[self].id() != doc_id) ++self;
  std::size_t ahead = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i != self && ranks_before(scores[i], docs[i].id(), scores[self], doc_id)) {
      ++ahead;
    }
  }
  return ahead + 1;
}

DenseIndex::DenseIndex(std::shared_ptr<const EmbeddingModel> model,
                       std::shared_ptr<const Corpus> corpus)
    : model_(std::move(model)), corpus_(std::move(corpus)) {
  const std::size_t dim = model_->dim();
  const auto docs = corpus_->documents();
  doc_emb_.assign(docs.size() * dim, 0.0);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto e = model_->embed(model_->encode(docs[i].tokens()));
    std::copy(e.begin(), e.end(), doc_emb_.begin() + static_cast<long>(i * dim));
  }
}

std::vector<double> DenseIndex::score_all(const TokenList& query) const {
  const auto q = embed_text(*model_, query);
  const std::size_t n = corpus_->doc_count();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = dot(q, doc_embedding(i));
  return out;
}

std::unique_ptr<Retriever> DenseIndex::rebind(
    std::shared_ptr<const Corpus> corpus) const {
  return std::make_unique<DenseIndex>(model_, std::move(corpus));
}

TfidfIndex::TfidfIndex(std::shared_ptr<const Corpus> corpus)
    : corpus_(std::move(corpus)) {
  const auto docs = corpus_->documents();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& toks = docs[i].tokens();
    if (toks.empty()) continue;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& t : toks) ++counts[t];
    const double len = static_cast<double>(toks.size());
    for (const auto& [t, c] : counts) {
      postings_[t].push_back({static_cast<std::uint32_t>(i),
                              static_cast<double>(c) / len});
    }
  }
}

std::vector<double> TfidfIndex::score_all(const TokenList& query) const {
  std::vector<double> out(corpus_->doc_count(), 0.0);
  for (const auto& t : query) {
    auto it = postings_.find(t);
    if (it == postings_.end()) continue;
    const double w = idf(*corpus_, t);
    for (const auto& p : it->second) out[p.doc] += p.tf * w;
  }
  return out;
}

std::unique_ptr<Retriever> TfidfIndex::rebind(
    std::shared_ptr<const Corpus> corpus) const {
  return std::make_unique<TfidfIndex>(std::move(corpus));
}

double idf(const Corpus& corpus, const std::string& token) {
  return std::log(static_cast<double>(corpus.doc_count()) /
                  (1.0 + static_cast<double>(corpus.doc_freq(token))));
}

double tfidf_score(const Corpus& corpus, const TokenList& query,
                   const Document& doc) {
  const auto& toks = doc.tokens();
  if (toks.empty()) return 0.0;
  const double len = static_cast<double>(toks.size());
  double s = 0.0;
  for (const auto& t : query) {
    auto c = std::count(toks.begin(), toks.end(), t);
    if (c == 0) continue;
    s += (static_cast<double>(c) / len) * idf(corpus, t);
  }
  return s;
}

Ranking rank(const EmbeddingModel& model, const Corpus& corpus,
             const TokenList& query, std::size_t k) {
  return DenseIndex(borrow(model), borrow(corpus)).rank(query, k);
}

std::size_t full_rank_position(const EmbeddingModel& model, const Corpus& corpus,
                               const TokenList& query, const std::string& doc_id) {
  return DenseIndex(borrow(model), borrow(corpus)).position(query, doc_id);
}

}  // namespace fliprag
