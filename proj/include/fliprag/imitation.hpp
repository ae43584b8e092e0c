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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fliprag/contrastive.hpp"
#include "fliprag/corpus.hpp"
#include "fliprag/embedding.hpp"
#include "fliprag/metrics.hpp"
#include "fliprag/ragsim.hpp"
#include "json.hpp"

namespace fliprag {

enum class NegativeSource { hard_leak, surrogate_top_random };

std::string_view to_string(NegativeSource s);

struct ContrastiveTriple {
  TokenList query;
  std::string positive_id;
  // Hard negatives first, then sampled ones.
  std::vector<std::string> negative_ids;
  // hard_leak when the triple has at least one leaked negative.
  NegativeSource source = NegativeSource::hard_leak;
  std::size_t hard_count = 0;
};

// Maps verbatim document text back to ids of the public corpus.
class TextIndex {
 public:
  explicit TextIndex(const Corpus& corpus);
  std::optional<std::string> id_of(const std::string& text) const;

 private:
  std::unordered_map<std::string, std::string> ids_;
};

struct PairOptions {
  std::size_t alpha = 0;
  std::size_t positives = 3;
  // Sampled negatives come from this prefix of the untrained surrogate's ranking.
  std::size_t random_pool = 50;
};

// Leaks the ranking of every query and turns it into contrastive triples:
// leaked positions 1..positives are positives, the rest of the leak are hard
// negatives, and `alpha` negatives per triple are drawn from the top of
// `init_surrogate`'s ranking over the public corpus.
std::vector<ContrastiveTriple> build_pairs(const RagSystem& system,
                                           const std::vector<std::string>& queries,
                                           const Corpus& public_corpus,
                                           const EmbeddingModel& init_surrogate,
                                           const PairOptions& opt, std::uint64_t seed);

struct SurrogateHyper {
  std::size_t batch = 256;
  std::size_t epochs = 4;
  double lr = 4e-5;
};

struct SurrogateResult {
  EmbeddingModel model;
  std::vector<double> epoch_losses;  // mean training loss seen in each epoch
  std::size_t skipped = 0;           // triples with an empty positive
};

SurrogateResult train_surrogate(const EmbeddingModel& init,
                                const std::vector<ContrastiveTriple>& triples,
                                const Corpus& public_corpus, const SurrogateHyper& hyper,
                                std::uint64_t seed);

struct EvalQuery {
  std::string id;
  std::string text;
  Relevance judgments;
};

struct ImitationReport {
  double surrogate_ndcg10 = 0.0;
  double target_ndcg10 = 0.0;
  double inter10 = 0.0;
  std::size_t inter_denominator = 10;  // smallest denominator used
  std::size_t pairs_used = 0;
  std::size_t epochs = 0;
  double lr = 0.0;
  std::size_t batch = 0;
};

// The target side is observed only through the leak channel of `system`.
ImitationReport eval_imitation(const EmbeddingModel& surrogate, const RagSystem& system,
                               const Corpus& public_corpus,
                               const std::vector<EvalQuery>& queries);

// Ids of the leaked ranking for `query`, mapped through `index`.
std::vector<std::string> leaked_ranking(const RagSystem& system, const TextIndex& index,
                                        const std::string& query);

nlohmann::ordered_json to_json(const ImitationReport& r);

void save_triples(const std::vector<ContrastiveTriple>& triples,
                  const std::filesystem::path& path);
std::vector<ContrastiveTriple> load_triples(const std::filesystem::path& path);

}  // namespace fliprag
