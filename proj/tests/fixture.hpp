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

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "fliprag/corpus.hpp"

namespace fliprag::testing {

// Two topics with labeled documents plus unlabeled filler.
inline Corpus small_corpus() {
  Corpus c;
  c.add(Document("a1", "vaccines mandatory schools support strong benefit", "t1", kPro));
  c.add(Document("a2", "vaccines mandatory harm oppose risk", "t1", kCon));
  c.add(Document("a3", "vaccines schools policy debate balanced", "t1", kNeutral));
  c.add(Document("a4", "mandatory vaccines benefit public health support", "t1", kPro));
  c.add(Document("a5", "vaccines risk oppose mandatory rules freedom", "t1", kCon));
  c.add(Document("b1", "nuclear energy clean support growth", "t2", kPro));
  c.add(Document("b2", "nuclear energy waste danger oppose", "t2", kCon));
  c.add(Document("b3", "nuclear energy policy tradeoffs", "t2", kNeutral));
  c.add(Document("f1", "weather report sunny afternoon"));
  c.add(Document("f2", "recipe flour sugar butter oven"));
  c.add(Document("f3", "football match score goal team"));
  return c;
}

inline std::vector<Topic> small_topics(const Corpus& c) {
  std::vector<Topic> t(2);
  t[0].id = "t1";
  t[0].question = "Should vaccines be mandatory in schools?";
  t[1].id = "t2";
  t[1].question = "Is nuclear energy a good idea?";
  fill_topic_lists(t, c);
  return t;
}

// Unique scratch directory under the system temp dir, removed on exit.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("fliprag-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fliprag::testing
