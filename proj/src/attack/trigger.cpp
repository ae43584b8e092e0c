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

// Trigger search against a bag-of-embeddings surrogate.
//
// With mean pooling the score of trig + d is (q.S_trig + q.S_d) / (n_trig +
// n_d), so the marginal gain of a token is proportional to q.row(token) no
// matter what the rest of the sequence is. The shortlist is therefore ranked
// once by that dot product and sampled per beam with Gumbel noise.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fliprag/attack.hpp"
#include "fliprag/error.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

void TriggerConfig::validate() const {
  if (beam_width < 1) throw InvalidArgument("beam_width must be >= 1");
  if (max_len < 1) throw InvalidArgument("max_len must be >= 1");
  if (shortlist_size < 1) throw InvalidArgument("shortlist_size must be >= 1");
  if (max_repeat < 1) throw InvalidArgument("max_repeat must be >= 1");
  if (temperature < 0.0) throw InvalidArgument("temperature must be >= 0");
  if (lambda1 < 0.0 || lambda1 > 1.0 || lambda2 < 0.0 || lambda2 > 1.0) {
    throw InvalidArgument("lambda1 and lambda2 must lie in [0, 1]");
  }
}

std::vector<std::string> attack_vocabulary(const Corpus& corpus) {
  std::vector<std::string> v;
  for (const auto& t : corpus.vocabulary_tokens()) {
    if (!is_stopword(t)) v.push_back(t);
  }
  std::sort(v.begin(), v.end());
  return v;
}

namespace {

struct Candidate {
  std::uint32_t row;
  const std::string* token;
  double gain;  // q . row
  bool in_query;
};

struct Beam {
  std::vector<std::size_t> picks;  // indices into the candidate table
  std::size_t query_tokens = 0;
  std::vector<double> sum;         // sum of trigger rows
  double qsum = 0.0;               // q . sum
  double sum_dot_doc = 0.0;        // sum . S_d
  double sum_norm2 = 0.0;
  double logp = 0.0;
  double raw_margin = 0.0;
  double objective = 0.0;
  double relevance = 0.0;
  double consistency = 0.0;
};

bool better(const Beam& a, const Beam& b) {
  if (a.objective != b.objective) return a.objective > b.objective;
  if (a.raw_margin != b.raw_margin) return a.raw_margin > b.raw_margin;
  return a.picks < b.picks;
}

}  // namespace

Trigger generate_trigger(const EmbeddingModel& surrogate, const TokenList& query,
                         const Document& target, const Document& anchor,
                         const NGramLM& lm, const std::vector<std::string>& vocab,
                         const TriggerConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (anchor.id() == target.id()) throw InvalidArgument("anchor must differ from target");
  const std::size_t dim = surrogate.dim();
  const std::vector<double> qv = embed_text(surrogate, query);

  const Encoded doc = surrogate.encode(target.tokens());
  std::vector<double> doc_sum(dim, 0.0);
  for (auto r : doc) {
    auto row = surrogate.row(r);
    for (std::size_t j = 0; j < dim; ++j) doc_sum[j] += row[j];
  }
  const double q_doc = dot(qv, doc_sum);
  const double doc_norm = std::sqrt(dot(doc_sum, doc_sum));
  const double nd = static_cast<double>(doc.size());
  const double anchor_score = score(surrogate, query, anchor.tokens());

  const TokenList qcontent = content_tokens(query);
  std::vector<Candidate> cands;
  for (const auto& t : vocab) {
    const long r = surrogate.row_of(t);
    if (r < 0) continue;
    const bool in_q = std::find(qcontent.begin(), qcontent.end(), t) != qcontent.end();
    cands.push_back({static_cast<std::uint32_t>(r), &t, dot(qv, surrogate.row(r)), in_q});
  }
  if (cands.empty()) throw InvalidArgument("empty trigger shortlist: no usable vocabulary");
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    return *a.token < *b.token;
  });
  const std::size_t shortlist = std::min(cfg.shortlist_size, cands.size());

  auto finish = [&](Beam& b) {
    const double n = static_cast<double>(b.picks.size()) + nd;
    b.raw_margin = (b.qsum + q_doc) / n - anchor_score;
    b.relevance = std::min(b.raw_margin, cfg.tau);
    const double norm = std::sqrt(std::max(0.0, b.sum_norm2));
    b.consistency = (norm > 0.0 && doc_norm > 0.0) ? b.sum_dot_doc / (norm * doc_norm) : 0.0;
    b.objective = b.relevance + cfg.lambda1 * b.logp + cfg.lambda2 * b.consistency;
  };

  // Token positions of the shortlist for one beam: greedy prefix of the
  // gain order at temperature 0, otherwise Gumbel top-k over gain / T.
  std::vector<std::size_t> order(cands.size());
  auto shortlist_for = [&](std::size_t step, std::size_t beam) {
    std::vector<std::size_t> out;
    if (cfg.temperature <= 0.0 || shortlist == cands.size()) {
      out.resize(shortlist);
      std::iota(out.begin(), out.end(), 0u);
      return out;
    }
    Rng rng(derive_seed(seed, "trigger.shortlist", step * cfg.beam_width + beam));
    std::uniform_real_distribution<double> u(std::nextafter(0.0, 1.0), 1.0);
    std::vector<double> key(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      key[i] = cands[i].gain / cfg.temperature - std::log(-std::log(u(rng)));
    }
    std::iota(order.begin(), order.end(), 0u);
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(shortlist), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (key[a] != key[b]) return key[a] > key[b];
                        return a < b;
                      });
    out.assign(order.begin(), order.begin() + static_cast<long>(shortlist));
    return out;
  };

  std::vector<Beam> beams(1);
  beams[0].sum.assign(dim, 0.0);
  Beam best;
  bool have_best = false;
  Trigger trig;

  for (std::size_t step = 0; step < cfg.max_len; ++step) {
    std::vector<Beam> next;
    for (std::size_t bi = 0; bi < beams.size(); ++bi) {
      const Beam& b = beams[bi];
      const std::string& prev1 = b.picks.empty() ? std::string() : *cands[b.picks.back()].token;
      const std::string& prev2 =
          b.picks.size() < 2 ? std::string() : *cands[b.picks[b.picks.size() - 2]].token;
      for (std::size_t ci : shortlist_for(step, bi)) {
        if (static_cast<std::size_t>(std::count(b.picks.begin(), b.picks.end(), ci)) >=
            cfg.max_repeat) {
          continue;
        }
        const Candidate& c = cands[ci];
        if (c.in_query && b.query_tokens >= cfg.max_query_tokens) continue;
        auto row = surrogate.row(c.row);
        Beam nb;
        nb.picks = b.picks;
        nb.picks.push_back(ci);
        nb.query_tokens = b.query_tokens + (c.in_query ? 1 : 0);
        nb.sum = b.sum;
        double sum_dot_row = 0.0, row_norm2 = 0.0, row_dot_doc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
          sum_dot_row += b.sum[j] * row[j];
          row_norm2 += row[j] * row[j];
          row_dot_doc += row[j] * doc_sum[j];
          nb.sum[j] += row[j];
        }
        nb.qsum = b.qsum + c.gain;
        nb.sum_dot_doc = b.sum_dot_doc + row_dot_doc;
        nb.sum_norm2 = b.sum_norm2 + 2.0 * sum_dot_row + row_norm2;
        nb.logp = b.logp + std::log(lm.prob(prev2, prev1, *c.token));
        finish(nb);
        next.push_back(std::move(nb));
      }
    }
    if (next.empty()) break;
    const std::size_t keep = std::min(cfg.beam_width, next.size());
    std::partial_sort(next.begin(), next.begin() + static_cast<long>(keep), next.end(), better);
    next.resize(keep);
    beams = std::move(next);

    TriggerStep ts;
    ts.length = step + 1;
    ts.best_objective = beams.front().objective;
    for (auto ci : beams.front().picks) ts.best_tokens.push_back(*cands[ci].token);
    trig.trace.push_back(std::move(ts));
    // Strict improvement only, so among equal objectives the shorter wins.
    if (!have_best || beams.front().objective > best.objective) {
      best = beams.front();
      have_best = true;
    }
  }

  for (auto ci : best.picks) trig.tokens.push_back(*cands[ci].token);
  trig.relevance_term = best.relevance;
  trig.fluency_term = cfg.lambda1 * best.logp;
  trig.consistency_term = cfg.lambda2 * best.consistency;
  trig.objective = best.objective;
  trig.score_before = nd > 0.0 ? q_doc / nd : 0.0;
  trig.score_after = (best.qsum + q_doc) / (nd + static_cast<double>(best.picks.size()));
  trig.no_gain = !(trig.score_after > trig.score_before);
  return trig;
}

}  // namespace fliprag
