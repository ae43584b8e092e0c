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
#include <span>
#include <vector>

#include "fliprag/corpus.hpp"
#include "fliprag/embedding.hpp"

namespace fliprag {

struct ContrastiveExample {
  Encoded query;
  Encoded positive;
  std::vector<Encoded> negatives;
};

// Softmax contrastive loss of one example:
//   -log( exp(s+) / (exp(s+) + sum_j exp(s-_j)) ),  s = E(q) . E(d)
double contrastive_loss(const EmbeddingModel& model, const ContrastiveExample& ex);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Minibatch Adam over the full embedding table of `model`.
class ContrastiveTrainer {
 public:
  ContrastiveTrainer(EmbeddingModel& model, AdamConfig adam);

  // One update on the mean loss of `batch`; returns that mean loss
  // (evaluated before the update).
  double step(std::span<const ContrastiveExample* const> batch);

 private:
  double accumulate(const ContrastiveExample& ex);

  EmbeddingModel& model_;
  AdamConfig adam_;
  std::vector<double> grad_, m_, v_;
  std::uint64_t t_ = 0;
};

struct TargetHyper {
  std::size_t dim = 32;
  std::size_t epochs = 30;
  double lr = 0.01;
  std::size_t negatives_per_positive = 8;
  std::size_t batch = 32;
  double init_scale = 0.1;
  // Self-supervised pairs: two random crops of the same document, one as
  // query, one as positive. Gives every corpus token a training signal,
  // including topics with no labeled question.
  std::size_t crop_pairs_per_doc = 1;
  std::size_t crop_len = 8;
};

// Trains a dense retriever: every topic document is a positive for its topic
// question against sampled documents from outside the topic, plus crop pairs
// drawn from every document.
EmbeddingModel train_target(const Corpus& corpus, const std::vector<Topic>& topics,
                            const TargetHyper& hyper, std::uint64_t seed);

}  // namespace fliprag
