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

#include <memory>
#include <string>

#include "fliprag/ragsim.hpp"

namespace fliprag {

// Operator-side access to a RagSystem: the deployed corpus and retriever.
// Used by defenses, which run inside the system, and by the harness when it
// deploys a modified corpus. Attacker-side sources must not include this
// header; a test scans them.
class RagInternals {
 public:
  static const Corpus& corpus(const RagSystem& s) { return s.retriever_->corpus(); }
  static const Retriever& retriever(const RagSystem& s) { return *s.retriever_; }
  static const RagConfig& config(const RagSystem& s) { return s.config_; }
  // Same system over another corpus snapshot.
  static RagSystem rebind(const RagSystem& s, std::shared_ptr<const Corpus> corpus);
  // Stance-oracle response over an explicit ranking.
  static RagResponse respond(const RagSystem& s, const std::string& query,
                             const Ranking& top) {
    return s.respond(query, top);
  }
};

}  // namespace fliprag
