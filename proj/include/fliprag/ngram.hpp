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

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "fliprag/corpus.hpp"

namespace fliprag {

// Interpolated add-k trigram model over document tokens. Each order is an
// add-k estimate over the same closed vocabulary (training tokens plus an
// unknown-token slot), so every conditional distribution sums to one and so
// does their convex combination.
class NGramLM {
 public:
  struct Options {
    double k_add = 0.1;
    // Weights of the trigram, bigram and unigram estimates.
    std::array<double, 3> weights = {0.6, 0.3, 0.1};
  };

  NGramLM() = default;
  explicit NGramLM(Options opt) : opt_(opt) {}

  void add_document(const TokenList& tokens);

  // P(token | prev2 prev1); use "" for a sentence-start pad.
  double prob(const std::string& prev2, const std::string& prev1,
              const std::string& token) const;
  // Sum of log P over `tokens`, contexts padded at the start.
  double log_prob(const TokenList& tokens) const;
  // -(1/T) sum log P; 0 for an empty document.
  double log_ppl(const TokenList& tokens) const;

  std::size_t order() const { return 3; }
  std::size_t vocab_size() const { return vocab_.size() + 1; }
  double k_add() const { return opt_.k_add; }
  const std::vector<std::string>& vocab() const { return tokens_; }

 private:
  std::uint32_t id_of(const std::string& token) const;
  double prob_ids(std::uint32_t a, std::uint32_t b, std::uint32_t w) const;

  Options opt_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  std::vector<std::string> tokens_;
  std::vector<double> uni_;
  double total_ = 0.0;
  std::unordered_map<std::uint64_t, double> bi_, bi_ctx_, tri_, tri_ctx_;
};

// Trains on every document of `corpus`.
NGramLM train_ngram(const Corpus& corpus, NGramLM::Options opt = {});

}  // namespace fliprag
