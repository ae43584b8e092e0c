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

#include "fliprag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "fliprag/error.hpp"
#include "json.hpp"

namespace fliprag {

using nlohmann::json;

namespace {

constexpr std::string_view kCorpusFormat = "fliprag-corpus";
constexpr int kCorpusVersion = 1;

void check_stance_pair(const std::optional<std::string>& topic,
                       const std::optional<Stance>& stance) {
  if (topic.has_value() != stance.has_value()) {
    throw InvalidArgument("stance must be present exactly when topic_id is");
  }
  if (stance && !valid_stance(*stance)) {
    throw InvalidArgument("stance must be 0, 1 or 2");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return in;
}

// Parses one document object. `strict` additionally requires provenance.
Document parse_document(const json& j, std::size_t line, bool with_provenance) {
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  if (!j.contains("id") || !j["id"].is_string()) {
    throw ParseError("missing string field \"id\"", line);
  }
  if (!j.contains("text") || !j["text"].is_string()) {
    throw ParseError("missing string field \"text\"", line);
  }
  std::optional<std::string> topic;
  std::optional<Stance> stance;
  if (j.contains("topic_id") && !j["topic_id"].is_null()) {
    if (!j["topic_id"].is_string()) {
      throw ParseError("\"topic_id\" must be a string", line);
    }
    topic = j["topic_id"].get<std::string>();
  }
  if (j.contains("stance") && !j["stance"].is_null()) {
    if (!j["stance"].is_number_integer()) {
      throw ParseError("\"stance\" must be an integer", line);
    }
    stance = j["stance"].get<int>();
  }
  Provenance prov = Provenance::clean;
  if (with_provenance) {
    if (!j.contains("provenance") || !j["provenance"].is_string()) {
      throw ParseError("missing string field \"provenance\"", line);
    }
    try {
      prov = provenance_from_string(j["provenance"].get<std::string>());
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line);
    }
  }
  try {
    return Document(j["id"].get<std::string>(), j["text"].get<std::string>(),
                    std::move(topic), stance, prov);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), line);
  }
}

json document_json(const Document& d) {
  json j;
  j["id"] = d.id();
  j["text"] = d.text();
  if (d.topic_id()) j["topic_id"] = *d.topic_id();
  if (d.stance()) j["stance"] = *d.stance();
  j["provenance"] = std::string(to_string(d.provenance()));
  return j;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::clean: return "clean";
    case Provenance::trigger_poisoned: return "trigger_poisoned";
    case Provenance::question_injected: return "question_injected";
    case Provenance::prompt_injected: return "prompt_injected";
    case Provenance::disinformation: return "disinformation";
    case Provenance::static_text: return "static_text";
  }
  return "clean";
}

Provenance provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::clean, Provenance::trigger_poisoned,
                 Provenance::question_injected, Provenance::prompt_injected,
                 Provenance::disinformation, Provenance::static_text}) {
    if (to_string(p) == s) return p;
  }
  throw InvalidArgument("unknown provenance '" + std::string(s) + "'");
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::health: return "health";
    case Domain::society: return "society";
    case Domain::government: return "government";
    case Domain::education: return "education";
    case Domain::other: return "other";
  }
  return "other";
}

Domain domain_from_string(std::string_view s) {
  for (auto d : {Domain::health, Domain::society, Domain::government,
                 Domain::education, Domain::other}) {
    if (to_string(d) == s) return d;
  }
  throw InvalidArgument("unknown domain '" + std::string(s) + "'");
}

Document::Document(std::string id, std::string text,
                   std::optional<std::string> topic_id,
                   std::optional<Stance> stance, Provenance provenance)
    : id_(std::move(id)),
      text_(std::move(text)),
      tokens_(tokenize(text_)),
      topic_id_(std::move(topic_id)),
      stance_(stance),
      provenance_(provenance) {
  if (id_.empty()) throw InvalidArgument("document id must not be empty");
  check_stance_pair(topic_id_, stance_);
}

void Document::set_text(std::string text) {
  text_ = std::move(text);
  tokens_ = tokenize(text_);
}

const std::vector<std::string>& Topic::ids_with_stance(Stance s) const {
  switch (s) {
    case kPro: return pro_doc_ids;
    case kCon: return con_doc_ids;
    default: return neutral_doc_ids;
  }
}

void Corpus::count_tokens(const TokenList& tokens, int delta) {
  std::unordered_set<std::string_view> seen;
  for (const auto& t : tokens) {
    if (!seen.insert(t).second) continue;
    auto it = vocab_.find(t);
    std::size_t idx;
    if (it == vocab_.end()) {
      idx = vocab_tokens_.size();
      vocab_.emplace(t, idx);
      vocab_tokens_.push_back(t);
      doc_freq_.push_back(0);
    } else {
      idx = it->second;
    }
    if (delta > 0) {
      ++doc_freq_[idx];
    } else {
      --doc_freq_[idx];
    }
  }
}

void Corpus::add(Document doc) {
  if (index_.count(doc.id())) throw DuplicateIdError(doc.id(), 0);
  count_tokens(doc.tokens(), +1);
  index_.emplace(doc.id(), docs_.size());
  docs_.push_back(std::move(doc));
}

void Corpus::replace_text(const std::string& id, std::string text,
                          Provenance provenance) {
  auto it = index_.find(id);
  if (it == index_.end()) throw NotFoundError("unknown document id '" + id + "'");
  Document& doc = docs_[it->second];
  count_tokens(doc.tokens(), -1);
  doc.set_text(std::move(text));
  doc.set_provenance(provenance);
  count_tokens(doc.tokens(), +1);
}

const Document& Corpus::at(const std::string& id) const {
  const Document* d = find(id);
  if (!d) throw NotFoundError("unknown document id '" + id + "'");
  return *d;
}

const Document* Corpus::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &docs_[it->second];
}

std::size_t Corpus::doc_freq(const std::string& token) const {
  auto it = vocab_.find(token);
  return it == vocab_.end() ? 0 : doc_freq_[it->second];
}

std::vector<std::size_t> Corpus::recount_doc_freq() const {
  std::vector<std::size_t> counts(vocab_tokens_.size(), 0);
  for (const auto& d : docs_) {
    std::unordered_set<std::string_view> seen(d.tokens().begin(),
                                              d.tokens().end());
    for (auto t : seen) {
      auto it = vocab_.find(std::string(t));
      if (it != vocab_.end()) ++counts[it->second];
    }
  }
  return counts;
}

bool Corpus::doc_freq_consistent() const {
  return recount_doc_freq() == doc_freq_;
}

Corpus ingest_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    Document doc = parse_document(j, lineno, /*with_provenance=*/false);
    if (corpus.contains(doc.id())) throw DuplicateIdError(doc.id(), lineno);
    corpus.add(std::move(doc));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_out(path);
  json header = {{"format", kCorpusFormat},
                 {"version", kCorpusVersion},
                 {"doc_count", corpus.doc_count()}};
  out << header.dump() << '\n';
  for (const auto& d : corpus.documents()) out << document_json(d).dump() << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path.string() + ": missing corpus header");
  }
  std::size_t expected = 0;
  try {
    json header = json::parse(line);
    if (header.value("format", "") != kCorpusFormat ||
        header.value("version", 0) != kCorpusVersion) {
      throw FormatError(path.string() + ": not a corpus file");
    }
    expected = header.at("doc_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": bad corpus header: " + e.what());
  }
  Corpus corpus;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ": line " + std::to_string(lineno) +
                        ": truncated or malformed record");
    }
    try {
      corpus.add(parse_document(j, lineno, /*with_provenance=*/true));
    } catch (const ParseError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  if (corpus.doc_count() != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) +
                      " documents, found " + std::to_string(corpus.doc_count()));
  }
  return corpus;
}

void save_topics(const std::vector<Topic>& topics,
                 const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& t : topics) {
    arr.push_back({{"id", t.id},
                   {"question", t.question},
                   {"domain", std::string(to_string(t.domain))},
                   {"pro", t.pro_doc_ids},
                   {"con", t.con_doc_ids},
                   {"neutral", t.neutral_doc_ids}});
  }
  auto out = open_out(path);
  out << arr.dump(1) << '\n';
  if (!out) throw IoError(path.string(), "write failed");
}

std::vector<Topic> load_topics(const std::filesystem::path& path,
                               const Corpus& corpus) {
  auto in = open_in(path);
  json arr;
  try {
    in >> arr;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!arr.is_array()) throw FormatError(path.string() + ": expected an array");
  std::vector<Topic> topics;
  bool have_lists = true;
  try {
    for (const auto& j : arr) {
      Topic t;
      t.id = j.at("id").get<std::string>();
      t.question = j.at("question").get<std::string>();
      t.domain = domain_from_string(j.value("domain", std::string("other")));
      if (j.contains("pro")) {
        t.pro_doc_ids = j["pro"].get<std::vector<std::string>>();
        t.con_doc_ids = j.value("con", std::vector<std::string>{});
        t.neutral_doc_ids = j.value("neutral", std::vector<std::string>{});
      } else {
        have_lists = false;
      }
      topics.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!have_lists) fill_topic_lists(topics, corpus);
  validate_topics(topics, corpus);
  return topics;
}

void fill_topic_lists(std::vector<Topic>& topics, const Corpus& corpus) {
  std::unordered_map<std::string, Topic*> by_id;
  for (auto& t : topics) {
    t.pro_doc_ids.clear();
    t.con_doc_ids.clear();
    t.neutral_doc_ids.clear();
    by_id[t.id] = &t;
  }
  for (const auto& d : corpus.documents()) {
    if (!d.topic_id()) continue;
    auto it = by_id.find(*d.topic_id());
    if (it == by_id.end()) continue;
    Topic& t = *it->second;
    switch (*d.stance()) {
      case kPro: t.pro_doc_ids.push_back(d.id()); break;
      case kCon: t.con_doc_ids.push_back(d.id()); break;
      default: t.neutral_doc_ids.push_back(d.id()); break;
    }
  }
}

void validate_topics(const std::vector<Topic>& topics, const Corpus& corpus) {
  for (const auto& t : topics) {
    std::unordered_set<std::string> seen;
    for (Stance s : {kPro, kCon, kNeutral}) {
      for (const auto& id : t.ids_with_stance(s)) {
        const Document* d = corpus.find(id);
        if (!d) {
          throw InvalidArgument("topic '" + t.id + "' lists unknown document '" +
                                id + "'");
        }
        if (d->topic_id() != t.id) {
          throw InvalidArgument("document '" + id + "' is not in topic '" +
                                t.id + "'");
        }
        if (!seen.insert(id).second) {
          throw InvalidArgument("document '" + id +
                                "' listed twice in topic '" + t.id + "'");
        }
      }
    }
  }
}

std::vector<const Document*> topic_documents(const Corpus& corpus,
                                             const std::string& topic_id) {
  std::vector<const Document*> out;
  for (const auto& d : corpus.documents()) {
    if (d.topic_id() == topic_id) out.push_back(&d);
  }
  return out;
}

const Topic& find_topic(const std::vector<Topic>& topics,
                        const std::string& id) {
  auto it = std::find_if(topics.begin(), topics.end(),
                         [&](const Topic& t) { return t.id == id; });
  if (it == topics.end()) throw NotFoundError("unknown topic '" + id + "'");
  return *it;
}

}  // namespace fliprag
