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

#include "fliprag/ngram.hpp"

#include <cmath>

#include "fliprag/error.hpp"

namespace fliprag {

namespace {

// Id 0 is the start pad, id 1 the unknown token; vocabulary ids follow.
constexpr std::uint32_t kPad = 0;
constexpr std::uint32_t kUnk = 1;
constexpr int kBits = 21;

std::uint64_t key(std::uint64_t a, std::uint64_t b) { return (a << kBits) | b; }
std::uint64_t key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return (((a << kBits) | b) << kBits) | c;
}

double lookup(const std::unordered_map<std::uint64_t, double>& m, std::uint64_t k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

}  // namespace

std::uint32_t NGramLM::id_of(const std::string& token) const {
  if (token.empty()) return kPad;
  auto it = vocab_.find(token);
  return it == vocab_.end() ? kUnk : it->second;
}

void NGramLM::add_document(const TokenList& tokens) {
  std::uint32_t a = kPad, b = kPad;
  for (const auto& t : tokens) {
    auto [it, fresh] = vocab_.emplace(t, static_cast<std::uint32_t>(tokens_.size() + 2));
    if (fresh) {
      if (it->second >= (1u << kBits)) throw InvalidArgument("n-gram vocabulary too large");
      tokens_.push_back(t);
      uni_.push_back(0.0);
    }
    const std::uint32_t w = it->second;
    uni_[w - 2] += 1.0;
    total_ += 1.0;
    bi_[key(b, w)] += 1.0;
    bi_ctx_[b] += 1.0;
    tri_[key(a, b, w)] += 1.0;
    tri_ctx_[key(a, b)] += 1.0;
    a = b;
    b = w;
  }
}

double NGramLM::prob_ids(std::uint32_t a, std::uint32_t b, std::uint32_t w) const {
  const double k = opt_.k_add;
  const double v = static_cast<double>(vocab_size());
  const double cu = w >= 2 ? uni_[w - 2] : 0.0;
  const double p1 = (cu + k) / (total_ + k * v);
  const double p2 = (lookup(bi_, key(b, w)) + k) / (lookup(bi_ctx_, b) + k * v);
  const double p3 = (lookup(tri_, key(a, b, w)) + k) / (lookup(tri_ctx_, key(a, b)) + k * v);
  return opt_.weights[0] * p3 + opt_.weights[1] * p2 + opt_.weights[2] * p1;
}

double NGramLM::prob(const std::string& prev2, const std::string& prev1,
                     const std::string& token) const {
  return prob_ids(id_of(prev2), id_of(prev1), id_of(token));
}

double NGramLM::log_prob(const TokenList& tokens) const {
  std::uint32_t a = kPad, b = kPad;
  double s = 0.0;
  for (const auto& t : tokens) {
    const std::uint32_t w = id_of(t);
    s += std::log(prob_ids(a, b, w));
    a = b;
    b = w;
  }
  return s;
}

double NGramLM::log_ppl(const TokenList& tokens) const {
  if (tokens.empty()) return 0.0;
  return -log_prob(tokens) / static_cast<double>(tokens.size());
}

NGramLM train_ngram(const Corpus& corpus, NGramLM::Options opt) {
  if (corpus.empty()) throw InvalidArgument("cannot train an n-gram model on an empty corpus");
  double w = opt.weights[0] + opt.weights[1] + opt.weights[2];
  if (std::abs(w - 1.0) > 1e-9 || opt.k_add <= 0.0) {
    throw InvalidArgument("n-gram weights must sum to 1 and k_add must be positive");
  }
  NGramLM lm(opt);
  for (const auto& d : corpus.documents()) lm.add_document(d.tokens());
  return lm;
}

}  // namespace fliprag
