//
// Copyright 2026 The phrase-attack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Line-delimited JSON datasets. One record per line:
//   {"id": ..., "text": ..., "label": ..., "tree"?: ...}
//   {"id": ..., "premise": ..., "hypothesis": ..., "label": ...,
//    "premise_tree"?: ..., "hypothesis_tree"?: ...}
// Labels may be given by id or display name; trees are PTB strings.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "phrase_attack/text.hpp"

namespace phrase_attack::cli {

// Throws kParseError (schema) or kUnknownLabel, both naming `line_number`.
LabeledExample ExampleFromJson(const nlohmann::json& record,
                               const LabelSet& labels, std::size_t line_number);

// Parses every non-blank line, then draws `limit` records uniformly without
// replacement (partial Fisher-Yates over std::mt19937_64 seeded with `seed`).
// The sample keeps file order. A limit above the record count selects all
// records and appends a message to `warnings`.
std::vector<LabeledExample> LoadDataset(const std::filesystem::path& path,
                                        const LabelSet& labels,
                                        std::size_t limit, std::uint64_t seed,
                                        std::vector<std::string>* warnings);

// The sampling step on its own: sorted indices into [0, population).
std::vector<std::size_t> SampleIndices(std::size_t population,
                                       std::size_t limit, std::uint64_t seed);

}  // namespace phrase_attack::cli
