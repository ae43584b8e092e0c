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

namespace fliprag {

// Shape of a synthetic controversial-topic corpus. Every topic gets a
// question built from `question_terms` of its topic terms, `docs_per_stance`
// Pro and Con documents, `neutral_per_topic` neutral documents and shares a
// stopword/shared-vocabulary background with `filler_docs` unlabeled
// documents. Pro and Con documents use the same topic vocabulary and differ
// only in their stance-marker terms.
struct SyntheticSpec {
  std::size_t topics = 30;
  std::size_t docs_per_stance = 15;
  std::size_t vocab_per_topic = 12;
  std::size_t shared_vocab = 400;
  std::size_t doc_len = 50;
  std::size_t neutral_per_topic = 4;
  std::size_t filler_docs = 0;
  std::size_t question_terms = 4;
  std::size_t stance_markers = 20;
  // The first document of each stance class is an overview passage with
  // this multiple of the usual topic-term rate.
  double lead_boost = 1.7;
  // Documents per class whose question-term rate is raised, decaying from
  // lead_boost at the lead to 1 at this index.
  std::size_t focus_span = 1;
  // Per-document spread of the question and topic term counts.
  std::size_t count_jitter = 2;
  // Extra queries per topic (2-3 topic terms each), the query set an
  // attacker uses for imitation.
  std::size_t queries_per_topic = 20;

  void validate() const;
};

struct SyntheticWorld {
  Corpus corpus;
  std::vector<Topic> topics;
  // Paraphrase table: topic term -> interchangeable topic terms.
  std::map<std::string, std::vector<std::string>> synonyms;
  std::vector<std::string> pro_markers;
  std::vector<std::string> con_markers;
  std::vector<std::string> neutral_markers;
  // topic id -> extra queries about the topic
  std::map<std::string, std::vector<std::string>> topic_queries;
};

// Pure function of (spec, seed). Topic documents and filler documents come
// from separate seed streams, so changing `filler_docs` keeps every topic
// document byte-identical.
SyntheticWorld generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace fliprag
