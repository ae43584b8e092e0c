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

#include "fliprag/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "fliprag/error.hpp"
#include "fliprag/seed.hpp"
#include "json.hpp"

namespace fliprag {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'R', 'G', 'E', 'M', 'B', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw FormatError(path + ": truncated model checkpoint");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

EmbeddingModel::EmbeddingModel(std::vector<std::string> vocab, std::size_t dim,
                               std::uint64_t seed, std::string trained_on)
    : dim_(dim),
      vocab_(std::move(vocab)),
      table_(vocab_.size() * dim, 0.0),
      seed_(seed),
      trained_on_(std::move(trained_on)) {
  if (dim_ == 0) throw InvalidArgument("embedding dim must be positive");
  rows_.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!rows_.emplace(vocab_[i], static_cast<std::uint32_t>(i)).second) {
      throw InvalidArgument("duplicate vocabulary token '" + vocab_[i] + "'");
    }
  }
}

EmbeddingModel EmbeddingModel::random(std::vector<std::string> vocab,
                                      std::size_t dim, std::uint64_t seed,
                                      double scale, std::string trained_on) {
  EmbeddingModel m(std::move(vocab), dim, seed, std::move(trained_on));
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto& w : m.table_) w = normal(rng);
  return m;
}

long EmbeddingModel::row_of(const std::string& token) const {
  auto it = rows_.find(token);
  return it == rows_.end() ? -1 : static_cast<long>(it->second);
}

Encoded EmbeddingModel::encode(const TokenList& tokens) const {
  Encoded out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = rows_.find(t);
    if (it != rows_.end()) out.push_back(it->second);
  }
  return out;
}

std::vector<double> EmbeddingModel::embed(const Encoded& ids) const {
  std::vector<double> out(dim_, 0.0);
  if (ids.empty()) return out;
  for (auto r : ids) {
    const double* w = table_.data() + static_cast<std::size_t>(r) * dim_;
    for (std::size_t j = 0; j < dim_; ++j) out[j] += w[j];
  }
  const double inv = 1.0 / static_cast<double>(ids.size());
  for (auto& x : out) x *= inv;
  return out;
}

bool EmbeddingModel::all_finite() const {
  for (double w : table_) {
    if (!std::isfinite(w)) return false;
  }
  return true;
}

std::uint64_t EmbeddingModel::fingerprint() const {
  std::uint64_t h = splitmix64(dim_ ^ (vocab_.size() << 20));
  for (double w : table_) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(w));
  return h;
}

std::vector<double> embed_text(const EmbeddingModel& model, const TokenList& tokens) {
  return model.embed(model.encode(tokens));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double score(const EmbeddingModel& model, const TokenList& query,
             const TokenList& doc) {
  return dot(embed_text(model, query), embed_text(model, doc));
}

std::filesystem::path vocab_sidecar(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".vocab.json");
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(kMagic, sizeof kMagic);
  put_u64(out, model.dim());
  put_u64(out, model.rows());
  put_u64(out, model.seed());
  put_u64(out, model.trained_on().size());
  out.write(model.trained_on().data(),
            static_cast<std::streamsize>(model.trained_on().size()));
  for (double w : model.table()) put_u64(out, std::bit_cast<std::uint64_t>(w));
  if (!out) throw IoError(path.string(), "write failed");

  nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < model.rows(); ++i) vocab[model.vocab()[i]] = i;
  std::ofstream side(vocab_sidecar(path), std::ios::trunc);
  if (!side) throw IoError(vocab_sidecar(path).string(), "cannot open for writing");
  side << vocab.dump() << '\n';
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw FormatError(path.string() + ": not a model checkpoint");
  }
  const std::string p = path.string();
  std::uint64_t dim = get_u64(in, p);
  std::uint64_t rows = get_u64(in, p);
  std::uint64_t seed = get_u64(in, p);
  std::uint64_t name_len = get_u64(in, p);
  if (name_len > (1u << 20)) throw FormatError(p + ": corrupt header");
  std::string trained_on(name_len, '\0');
  if (!in.read(trained_on.data(), static_cast<std::streamsize>(name_len))) {
    throw FormatError(p + ": truncated model checkpoint");
  }

  std::ifstream side(vocab_sidecar(path));
  if (!side) throw IoError(vocab_sidecar(path).string(), "cannot open for reading");
  nlohmann::json vj;
  try {
    side >> vj;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(vocab_sidecar(path).string() + ": " + e.what());
  }
  if (!vj.is_object() || vj.size() != rows) {
    throw FormatError(vocab_sidecar(path).string() + ": vocabulary size mismatch");
  }
  std::vector<std::string> vocab(rows);
  for (auto it = vj.begin(); it != vj.end(); ++it) {
    auto r = it.value().get<std::uint64_t>();
    if (r >= rows || !vocab[r].empty()) {
      throw FormatError(vocab_sidecar(path).string() + ": bad row index");
    }
    vocab[r] = it.key();
  }
  EmbeddingModel m(std::move(vocab), dim, seed, std::move(trained_on));
  for (auto& w : m.table()) w = std::bit_cast<double>(get_u64(in, p));
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(p + ": trailing bytes after weights");
  }
  return m;
}

}  // namespace fliprag
