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

#include "fliprag/imitation.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "fliprag/error.hpp"
#include "fliprag/retrieval.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

std::string_view to_string(NegativeSource s) {
  return s == NegativeSource::hard_leak ? "hard_leak" : "surrogate_top_random";
}

TextIndex::TextIndex(const Corpus& corpus) {
  for (const auto& d : corpus.documents()) ids_.emplace(d.text(), d.id());
}

std::optional<std::string> TextIndex::id_of(const std::string& text) const {
  auto it = ids_.find(text);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> leaked_ranking(const RagSystem& system, const TextIndex& index,
                                        const std::string& query) {
  if (system.leak_policy() == LeakPolicy::refuses) {
    throw InvalidArgument("no extraction channel: the system refuses to leak its context");
  }
  RagResponse r = system.query_with_instruction(query, leak_instruction(query));
  if (!r.leaked_context) {
    throw InvalidArgument("no extraction channel: the leak instruction was not honoured");
  }
  std::vector<std::string> ids;
  for (const auto& text : *r.leaked_context) {
    // Passages that are not in the public corpus cannot be used as labels.
    if (auto id = index.id_of(text)) ids.push_back(*id);
  }
  return ids;
}

std::vector<ContrastiveTriple> build_pairs(const RagSystem& system,
                                           const std::vector<std::string>& queries,
                                           const Corpus& public_corpus,
                                           const EmbeddingModel& init_surrogate,
                                           const PairOptions& opt, std::uint64_t seed) {
  const TextIndex index(public_corpus);
  const DenseIndex surrogate(borrow(init_surrogate), borrow(public_corpus));
  std::vector<ContrastiveTriple> out;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const std::string& q = queries[qi];
    const TokenList qt = tokenize(q);
    const auto leaked = leaked_ranking(system, index, q);
    const std::size_t n_pos = std::min(opt.positives, leaked.size());
    const std::vector<std::string> hard(leaked.begin() + static_cast<long>(n_pos), leaked.end());
    const std::unordered_set<std::string> positives(leaked.begin(),
                                                    leaked.begin() + static_cast<long>(n_pos));

    std::vector<std::string> pool;
    if (opt.alpha > 0) {
      for (auto& id : surrogate.rank(qt, opt.random_pool).ids()) {
        if (!positives.count(id)) pool.push_back(std::move(id));
      }
    }
    Rng rng(derive_seed(seed, "imitation.pairs", qi));
    for (std::size_t p = 0; p < n_pos; ++p) {
      ContrastiveTriple t;
      t.query = qt;
      t.positive_id = leaked[p];
      t.negative_ids = hard;
      t.hard_count = hard.size();
      if (!pool.empty()) {
        std::vector<std::string> sample;
        std::sample(pool.begin(), pool.end(), std::back_inserter(sample),
                    std::min(opt.alpha, pool.size()), rng);
        // std::sample keeps pool order; shuffle so the draw order is random too.
        std::shuffle(sample.begin(), sample.end(), rng);
        t.negative_ids.insert(t.negative_ids.end(), sample.begin(), sample.end());
      }
      t.source = t.hard_count > 0 ? NegativeSource::hard_leak
                                  : NegativeSource::surrogate_top_random;
      if (!t.negative_ids.empty()) out.push_back(std::move(t));
    }
  }
  return out;
}

SurrogateResult train_surrogate(const EmbeddingModel& init,
                                const std::vector<ContrastiveTriple>& triples,
                                const Corpus& public_corpus, const SurrogateHyper& hyper,
                                std::uint64_t seed) {
  if (triples.empty()) throw InvalidArgument("train_surrogate needs at least one triple");
  SurrogateResult res{init, {}, 0};
  EmbeddingModel& model = res.model;

  std::vector<ContrastiveExample> examples;
  examples.reserve(triples.size());
  for (const auto& t : triples) {
    const Document& pos = public_corpus.at(t.positive_id);
    ContrastiveExample ex;
    ex.positive = model.encode(pos.tokens());
    if (pos.tokens().empty() || ex.positive.empty()) {
      ++res.skipped;
      continue;
    }
    ex.query = model.encode(t.query);
    for (const auto& n : t.negative_ids) {
      ex.negatives.push_back(model.encode(public_corpus.at(n).tokens()));
    }
    examples.push_back(std::move(ex));
  }
  if (examples.empty()) throw InvalidArgument("every triple was degenerate");

  ContrastiveTrainer trainer(model, AdamConfig{.lr = hyper.lr});
  Rng rng(derive_seed(seed, "imitation.train"));
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t batch = std::max<std::size_t>(1, hyper.batch);
  std::vector<const ContrastiveExample*> ptrs;
  for (std::size_t e = 0; e < hyper.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (std::size_t s = 0; s < order.size(); s += batch) {
      ptrs.clear();
      for (std::size_t i = s; i < std::min(order.size(), s + batch); ++i) {
        ptrs.push_back(&examples[order[i]]);
      }
      sum += trainer.step(ptrs) * static_cast<double>(ptrs.size());
    }
    res.epoch_losses.push_back(sum / static_cast<double>(order.size()));
  }
  model.set_trained_on("imitation");
  return res;
}

ImitationReport eval_imitation(const EmbeddingModel& surrogate, const RagSystem& system,
                               const Corpus& public_corpus,
                               const std::vector<EvalQuery>& queries) {
  if (queries.empty()) throw InvalidArgument("eval_imitation needs queries");
  const TextIndex index(public_corpus);
  const DenseIndex sur(borrow(surrogate), borrow(public_corpus));
  ImitationReport r;
  r.inter_denominator = 10;
  for (const auto& q : queries) {
    const auto target_top = leaked_ranking(system, index, q.text);
    const auto sur_top = sur.rank(tokenize(q.text), 10).ids();
    r.surrogate_ndcg10 += ndcg_at(sur_top, q.judgments, 10);
    r.target_ndcg10 += ndcg_at(target_top, q.judgments, 10);
    const InterResult in = inter_at(sur_top, target_top, 10);
    r.inter10 += in.value;
    r.inter_denominator = std::min(r.inter_denominator, in.denominator);
  }
  const double n = static_cast<double>(queries.size());
  r.surrogate_ndcg10 /= n;
  r.target_ndcg10 /= n;
  r.inter10 /= n;
  return r;
}

nlohmann::ordered_json to_json(const ImitationReport& r) {
  nlohmann::ordered_json j;
  j["surrogate_ndcg10"] = r.surrogate_ndcg10;
  j["target_ndcg10"] = r.target_ndcg10;
  j["inter10"] = r.inter10;
  j["inter_denominator"] = r.inter_denominator;
  j["pairs_used"] = r.pairs_used;
  j["epochs"] = r.epochs;
  j["lr"] = r.lr;
  j["batch"] = r.batch;
  return j;
}

void save_triples(const std::vector<ContrastiveTriple>& triples,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  for (const auto& t : triples) {
    nlohmann::ordered_json j;
    j["q"] = t.query;
    j["pos"] = t.positive_id;
    j["neg"] = t.negative_ids;
    j["source"] = to_string(t.source);
    j["hard"] = t.hard_count;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<ContrastiveTriple> load_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::vector<ContrastiveTriple> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ContrastiveTriple t;
      t.query = j.at("q").get<TokenList>();
      t.positive_id = j.at("pos").get<std::string>();
      t.negative_ids = j.at("neg").get<std::vector<std::string>>();
      const auto src = j.at("source").get<std::string>();
      if (src == "hard_leak") {
        t.source = NegativeSource::hard_leak;
      } else if (src == "surrogate_top_random") {
        t.source = NegativeSource::surrogate_top_random;
      } else {
        throw ParseError("unknown source '" + src + "'", no);
      }
      t.hard_count = j.value("hard", std::size_t{0});
      if (t.negative_ids.empty()) throw ParseError("triple without negatives", no);
      out.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), no);
    }
  }
  return out;
}

}  // namespace fliprag
