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
#include <map>
#include <string>
#include <vector>

#include "fliprag/corpus.hpp"
#include "fliprag/ngram.hpp"
#include "fliprag/ragsim.hpp"

namespace fliprag {

enum class Detector { spamicity, keyword_density, perplexity, leak_instruction };

std::string_view to_string(Detector d);

struct DefenseVerdict {
  double score = 0.0;
  double threshold = 0.0;
  bool flagged = false;
  Detector detector = Detector::spamicity;
};

// Largest share of the document's positive TF-IDF mass that falls on the
// distinct content terms of a single query. 0 without positive mass.
double spamicity(const Document& doc, const std::vector<TokenList>& queries,
                 const Corpus& corpus);
DefenseVerdict spamicity_verdict(const Document& doc, const std::vector<TokenList>& queries,
                                 const Corpus& corpus, double threshold);

struct KeywordDensity {
  double overall = 0.0;                    // percent
  std::map<std::size_t, double> max_windowed;  // window size -> percent
};

// Query terms are the content tokens of `query`. Windows start every `step`
// tokens and stop after the first window that reaches the end of the
// document, which may be shorter than the window size.
KeywordDensity keyword_density(const TokenList& doc, const TokenList& query,
                               const std::vector<std::size_t>& window_sizes = {20, 50, 100},
                               std::size_t step = 5);

// Clean-corpus log-perplexity band; documents outside it are flagged.
struct PerplexityBand {
  double low = 0.0;
  double high = 0.0;
};

PerplexityBand calibrate_band(const NGramLM& lm, const Corpus& clean, double low_q = 0.01,
                              double high_q = 0.99);
DefenseVerdict perplexity_verdict(const NGramLM& lm, const TokenList& doc,
                                  const PerplexityBand& band);

// Empirical quantile with linear interpolation; q in [0, 1].
double quantile(std::vector<double> values, double q);

DefenseVerdict detect_leak_instruction(const std::string& text);

// Percent of scores strictly above the threshold.
double detection_rate(const std::vector<double>& scores, double threshold);

enum class ParaphraseMode { lexical_seeded, external };

// Lexical mode swaps each content token for a table synonym that is not in
// the original query and drops tokens without one; stopwords are kept.
std::string paraphrase_query(const std::string& query,
                             const std::map<std::string, std::vector<std::string>>& synonyms,
                             std::uint64_t seed);
// External mode sends the paraphrase prompt through an HTTP endpoint.
std::string paraphrase_query_external(const std::string& query, const HttpEndpoint& endpoint);
std::string paraphrase_prompt(const std::string& query);

// Fraction of distinct content tokens of `a` that also occur in `b`.
double content_overlap(const std::string& a, const std::string& b);

// Ensemble of answers over randomly token-masked corpora; majority stance.
RagResponse masked_smooth_answer(const RagSystem& system, const std::string& query,
                                 double mask_rate, std::size_t ensemble_n,
                                 std::uint64_t seed);
// Same answers for many queries; each masked corpus is built once.
std::vector<RagResponse> masked_smooth_answers(const RagSystem& system,
                                               const std::vector<std::string>& queries,
                                               double mask_rate, std::size_t ensemble_n,
                                               std::uint64_t seed);

struct AggregateOptions {
  std::size_t keyword_min_count = 2;
  // Documents answered in isolation; 0 means the system's k.
  std::size_t depth = 0;
};

// Isolate-then-aggregate: every retrieved document is answered alone and
// only keywords recurring in at least keyword_min_count isolated answers
// vote. Words of the query itself are never keywords.
RagResponse robust_aggregate_answer(const RagSystem& system, const std::string& query,
                                    const AggregateOptions& opt);

}  // namespace fliprag
