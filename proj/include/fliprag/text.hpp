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

#include <string>
#include <string_view>
#include <vector>

namespace fliprag {

using TokenList = std::vector<std::string>;

// Lowercases ASCII letters and splits on every run of non-alphanumeric
// characters. Empty pieces are dropped.
TokenList tokenize(std::string_view text);

std::string join_tokens(const TokenList& tokens);

// Function words excluded from trigger vocabularies, keyword sets and
// paraphrase overlap counts.
const std::vector<std::string>& stopwords();
bool is_stopword(std::string_view token);

// Tokens of `tokens` that are not stopwords, order kept, duplicates kept.
TokenList content_tokens(const TokenList& tokens);

}  // namespace fliprag
