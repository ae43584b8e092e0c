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

#include <algorithm>
#include <cmath>
#include <regex>
#include <unordered_map>
#include <unordered_set>

#include "fliprag/defense.hpp"
#include "fliprag/error.hpp"
#include "fliprag/retrieval.hpp"

namespace fliprag {

std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::spamicity: return "spamicity";
    case Detector::keyword_density: return "keyword_density";
    case Detector::perplexity: return "perplexity";
    case Detector::leak_instruction: return "leak_instruction";
  }
  return "?";
}

double spamicity(const Document& doc, const std::vector<TokenList>& queries,
                 const Corpus& corpus) {
  const auto& toks = doc.tokens();
  if (toks.empty()) return 0.0;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : toks) ++counts[t];
  const double len = static_cast<double>(toks.size());
  // Terms in nearly every document have non-positive idf; they carry no
  // evidence either way and are left out of both sums.
  std::unordered_map<std::string, double> mass;
  double total = 0.0;
  for (const auto& [t, c] : counts) {
    const double w = static_cast<double>(c) / len * idf(corpus, t);
    if (w > 0.0) {
      mass.emplace(t, w);
      total += w;
    }
  }
  if (total <= 0.0) return 0.0;
  double best = 0.0;
  for (const auto& q : queries) {
    std::unordered_set<std::string> terms;
    for (const auto& t : q) {
      if (!is_stopword(t)) terms.insert(t);
    }
    double s = 0.0;
    for (const auto& t : terms) {
      auto it = mass.find(t);
      if (it != mass.end()) s += it->second;
    }
    best = std::max(best, s / total);
  }
  return std::min(1.0, best);
}

DefenseVerdict spamicity_verdict(const Document& doc, const std::vector<TokenList>& queries,
                                 const Corpus& corpus, double threshold) {
  const double s = spamicity(doc, queries, corpus);
  return {s, threshold, s > threshold, Detector::spamicity};
}

KeywordDensity keyword_density(const TokenList& doc, const TokenList& query,
                               const std::vector<std::size_t>& window_sizes,
                               std::size_t step) {
  if (step < 1) throw InvalidArgument("density step must be >= 1");
  KeywordDensity out;
  std::unordered_set<std::string> terms;
  for (const auto& t : query) {
    if (!is_stopword(t)) terms.insert(t);
  }
  // Prefix sums of keyword hits.
  std::vector<std::size_t> pre(doc.size() + 1, 0);
  for (std::size_t i = 0; i < doc.size(); ++i) pre[i + 1] = pre[i] + terms.count(doc[i]);
  if (!doc.empty()) {
    out.overall = 100.0 * static_cast<double>(pre.back()) / static_cast<double>(doc.size());
  }
  for (std::size_t size : window_sizes) {
    if (size < 1) throw InvalidArgument("window sizes must be >= 1");
    double best = 0.0;
    for (std::size_t s = 0; s < doc.size(); s += step) {
      const std::size_t e = std::min(doc.size(), s + size);
      best = std::max(best, 100.0 * static_cast<double>(pre[e] - pre[s]) /
                                static_cast<double>(e - s));
      if (e == doc.size()) break;
    }
    out.max_windowed[size] = best;
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty set");
  if (q < 0.0 || q > 1.0) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(values.size() - 1, lo + 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PerplexityBand calibrate_band(const NGramLM& lm, const Corpus& clean, double low_q,
                              double high_q) {
  std::vector<double> v;
  v.reserve(clean.doc_count());
  for (const auto& d : clean.documents()) v.push_back(lm.log_ppl(d.tokens()));
  return {quantile(v, low_q), quantile(v, high_q)};
}

DefenseVerdict perplexity_verdict(const NGramLM& lm, const TokenList& doc,
                                  const PerplexityBand& band) {
  const double s = lm.log_ppl(doc);
  return {s, band.high, s < band.low || s > band.high, Detector::perplexity};
}

DefenseVerdict detect_leak_instruction(const std::string& text) {
  struct Rule {
    std::regex re;
    double weight;
  };
  static const std::vector<Rule> kRules = [] {
    const auto f = std::regex::ECMAScript | std::regex::icase;
    return std::vector<Rule>{
        // copy/reproduce directive aimed at the context
        {std::regex(R"(\b(copy|reproduce|repeat|output|print)\b.{0,40}\b(context|passages?|documents?)\b)", f), 0.30},
        // bracketed output container
        {std::regex(R"(\[\[\s*\]\])", f), 0.20},
        // explicit command framing around the request
        {std::regex(R"(-{2,}\s*here is the user (command|question)\s*-{2,})", f), 0.25},
        // completeness demand
        {std::regex(R"(\bdo not omit\b|\bwithout omitting\b|\bverbatim\b)", f), 0.15},
        {std::regex(R"(\bmarks and symbols\b)", f), 0.10},
    };
  }();
  double s = 0.0;
  for (const auto& r : kRules) {
    if (std::regex_search(text, r.re)) s += r.weight;
  }
  s = std::min(1.0, s);
  constexpr double kThreshold = 0.5;
  return {s, kThreshold, s > kThreshold, Detector::leak_instruction};
}

double detection_rate(const std::vector<double>& scores, double threshold) {
  if (scores.empty()) return 0.0;
  const auto hit = std::count_if(scores.begin(), scores.end(),
                                 [&](double s) { return s > threshold; });
  return 100.0 * static_cast<double>(hit) / static_cast<double>(scores.size());
}

}  // namespace fliprag
