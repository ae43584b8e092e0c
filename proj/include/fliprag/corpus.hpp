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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fliprag/text.hpp"

namespace fliprag {

// Opinion polarity of a document or response. Plain integers so stance
// shifts are a subtraction.
using Stance = int;
inline constexpr Stance kCon = 0;
inline constexpr Stance kNeutral = 1;
inline constexpr Stance kPro = 2;

inline bool valid_stance(int s) { return s >= kCon && s <= kPro; }
inline Stance opposite(Stance s) { return kPro - s; }

enum class Provenance {
  clean,
  trigger_poisoned,
  question_injected,
  prompt_injected,
  disinformation,
  static_text,
};

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

class Document {
 public:
  Document(std::string id, std::string text,
           std::optional<std::string> topic_id = std::nullopt,
           std::optional<Stance> stance = std::nullopt,
           Provenance provenance = Provenance::clean);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  const TokenList& tokens() const { return tokens_; }
  const std::optional<std::string>& topic_id() const { return topic_id_; }
  const std::optional<Stance>& stance() const { return stance_; }
  Provenance provenance() const { return provenance_; }

  // Stance used by response oracles: unlabeled documents read as neutral.
  Stance stance_or_neutral() const { return stance_.value_or(kNeutral); }

  void set_text(std::string text);
  void set_provenance(Provenance p) { provenance_ = p; }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::string id_;
  std::string text_;
  TokenList tokens_;
  std::optional<std::string> topic_id_;
  std::optional<Stance> stance_;
  Provenance provenance_;
};

enum class Domain { health, society, government, education, other };

std::string_view to_string(Domain d);
Domain domain_from_string(std::string_view s);

struct Topic {
  std::string id;
  std::string question;
  Domain domain = Domain::other;
  std::vector<std::string> pro_doc_ids;
  std::vector<std::string> con_doc_ids;
  std::vector<std::string> neutral_doc_ids;

  const std::vector<std::string>& ids_with_stance(Stance s) const;

  friend bool operator==(const Topic&, const Topic&) = default;
};

// Document store with derived vocabulary and document frequencies. The
// statistics are maintained incrementally through add() and replace_text().
class Corpus {
 public:
  Corpus() = default;

  void add(Document doc);
  // Replaces the text of an existing document and updates statistics.
  void replace_text(const std::string& id, std::string text,
                    Provenance provenance);

  const Document& at(const std::string& id) const;
  const Document* find(const std::string& id) const;
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  std::span<const Document> documents() const { return docs_; }
  std::size_t doc_count() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  // token -> index in vocabulary_tokens(); tokens are never removed.
  const std::unordered_map<std::string, std::size_t>& vocabulary() const {
    return vocab_;
  }
  const std::vector<std::string>& vocabulary_tokens() const {
    return vocab_tokens_;
  }
  std::size_t doc_freq(const std::string& token) const;

  // Full recount of document frequencies, indexed like vocabulary_tokens().
  std::vector<std::size_t> recount_doc_freq() const;
  bool doc_freq_consistent() const;

  // Same documents in the same order.
  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.docs_ == b.docs_;
  }

 private:
  void count_tokens(const TokenList& tokens, int delta);

  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> vocab_;
  std::vector<std::string> vocab_tokens_;
  std::vector<std::size_t> doc_freq_;
};

// External JSONL: {"id": str, "text": str, "topic_id": str?, "stance": 0|1|2?}
Corpus ingest_jsonl(const std::filesystem::path& path);

// Lossless persistence, provenance included. The header line carries the
// document count so truncation is detected.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

// Topic file: JSON array of {"id", "question", "domain"} objects, optionally
// with "pro"/"con"/"neutral" id lists. Missing lists are derived from the
// corpus by topic_id and stance.
void save_topics(const std::vector<Topic>& topics,
                 const std::filesystem::path& path);
std::vector<Topic> load_topics(const std::filesystem::path& path,
                               const Corpus& corpus);
void fill_topic_lists(std::vector<Topic>& topics, const Corpus& corpus);

// Throws InvalidArgument when a listed id is missing, carries another topic,
// or appears in two stance lists.
void validate_topics(const std::vector<Topic>& topics, const Corpus& corpus);

// Documents of a topic, in corpus order.
std::vector<const Document*> topic_documents(const Corpus& corpus,
                                             const std::string& topic_id);

const Topic& find_topic(const std::vector<Topic>& topics,
                        const std::string& id);

}  // namespace fliprag
