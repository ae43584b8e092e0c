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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fliprag/text.hpp"

namespace fliprag {

// Row indices of the in-vocabulary tokens of a text; OOV tokens dropped.
using Encoded = std::vector<std::uint32_t>;

// Vocabulary-indexed embedding table. A text is represented by the mean of
// the rows of its in-vocabulary tokens and relevance is the dot product of
// two such means.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(std::vector<std::string> vocab, std::size_t dim,
                 std::uint64_t seed = 0, std::string trained_on = {});

  // Rows drawn i.i.d. from N(0, scale^2).
  static EmbeddingModel random(std::vector<std::string> vocab, std::size_t dim,
                               std::uint64_t seed, double scale = 0.1,
                               std::string trained_on = "random-init");

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& trained_on() const { return trained_on_; }
  void set_trained_on(std::string s) { trained_on_ = std::move(s); }

  // -1 when the token is out of vocabulary.
  long row_of(const std::string& token) const;
  std::span<const double> row(std::size_t r) const {
    return {table_.data() + r * dim_, dim_};
  }
  std::span<double> row(std::size_t r) { return {table_.data() + r * dim_, dim_}; }
  std::span<const double> table() const { return table_; }
  std::span<double> table() { return table_; }

  Encoded encode(const TokenList& tokens) const;
  // Mean of rows; zero vector when `ids` is empty.
  std::vector<double> embed(const Encoded& ids) const;

  bool all_finite() const;
  // Hash of dimensions and weights; identifies a weight set in audits.
  std::uint64_t fingerprint() const;

  friend bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
    return a.dim_ == b.dim_ && a.vocab_ == b.vocab_ && a.table_ == b.table_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::uint32_t> rows_;
  std::vector<double> table_;
  std::uint64_t seed_ = 0;
  std::string trained_on_;
};

std::vector<double> embed_text(const EmbeddingModel& model, const TokenList& tokens);

double dot(std::span<const double> a, std::span<const double> b);

// E(q) . E(d)
double score(const EmbeddingModel& model, const TokenList& query,
             const TokenList& doc);

// Checkpoint: binary header (magic, dim, vocab size, seed, trained_on) then
// row-major little-endian float64 weights. The vocabulary goes to a sidecar
// JSON map token -> row at `<path>.vocab.json`.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);
std::filesystem::path vocab_sidecar(const std::filesystem::path& path);

}  // namespace fliprag
