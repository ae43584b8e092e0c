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
#include <memory>
#include <string>
#include <vector>

#include "fliprag/corpus.hpp"
#include "fliprag/embedding.hpp"

namespace fliprag {

struct RankedDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const RankedDoc&, const RankedDoc&) = default;
};

// Descending score; equal scores ordered by ascending doc id.
struct Ranking {
  std::string query_id;
  std::vector<RankedDoc> entries;

  std::vector<std::string> ids() const;
  std::size_t size() const { return entries.size(); }
};

// The total order every ranking uses.
inline bool ranks_before(double score_a, const std::string& id_a, double score_b,
                         const std::string& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

// A scoring backend bound to one corpus snapshot.
class Retriever {
 public:
  virtual ~Retriever() = default;

  virtual const Corpus& corpus() const = 0;
  virtual std::string kind() const = 0;

  // All document scores, in corpus order.
  virtual std::vector<double> score_all(const TokenList& query) const = 0;

  // Top-k under the deterministic tie rule; k > doc_count ranks everything.
  Ranking rank(const TokenList& query, std::size_t k) const;
  // 1-based position of `doc_id` in the full ranking.
  std::size_t position(const TokenList& query, const std::string& doc_id) const;

  // Same scoring model over another corpus snapshot.
  virtual std::unique_ptr<Retriever> rebind(
      std::shared_ptr<const Corpus> corpus) const = 0;
};

// Exhaustive dense retrieval with precomputed document embeddings.
class DenseIndex final : public Retriever {
 public:
  DenseIndex(std::shared_ptr<const EmbeddingModel> model,
             std::shared_ptr<const Corpus> corpus);

  const Corpus& corpus() const override { return *corpus_; }
  std::string kind() const override { return "dense"; }
  std::vector<double> score_all(const TokenList& query) const override;
  std::unique_ptr<Retriever> rebind(
      std::shared_ptr<const Corpus> corpus) const override;

  const EmbeddingModel& model() const { return *model_; }
  std::span<const double> doc_embedding(std::size_t i) const {
    return {doc_emb_.data() + i * model_->dim(), model_->dim()};
  }

 private:
  std::shared_ptr<const EmbeddingModel> model_;
  std::shared_ptr<const Corpus> corpus_;
  std::vector<double> doc_emb_;
};

// Lexical retriever: sum over query tokens of tf(t,d) * idf(t).
class TfidfIndex final : public Retriever {
 public:
  explicit TfidfIndex(std::shared_ptr<const Corpus> corpus);

  const Corpus& corpus() const override { return *corpus_; }
  std::string kind() const override { return "tfidf"; }
  std::vector<double> score_all(const TokenList& query) const override;
  std::unique_ptr<Retriever> rebind(
      std::shared_ptr<const Corpus> corpus) const override;

 private:
  struct Posting {
    std::uint32_t doc;
    double tf;
  };
  std::shared_ptr<const Corpus> corpus_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

// ln(N / (1 + df)); negative for tokens present in every document.
double idf(const Corpus& corpus, const std::string& token);

double tfidf_score(const Corpus& corpus, const TokenList& query,
                   const Document& doc);

// Convenience wrappers that build a temporary index.
Ranking rank(const EmbeddingModel& model, const Corpus& corpus,
             const TokenList& query, std::size_t k);
std::size_t full_rank_position(const EmbeddingModel& model, const Corpus& corpus,
                               const TokenList& query, const std::string& doc_id);

// Wraps a borrowed object in a non-owning shared_ptr.
template <class T>
std::shared_ptr<const T> borrow(const T& obj) {
  return std::shared_ptr<const T>(std::shared_ptr<const T>{}, &obj);
}

}  // namespace fliprag
