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

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "phrase_attack/syntax.hpp"

namespace phrase_attack {

// Search hyperparameters with their standard defaults.
struct AttackConfig {
  // d: deepest candidate subtree.
  int max_depth = 4;
  // l: a fill may be at most this many tokens longer than its phrase.
  std::size_t max_length_increment = 3;
  // T: iterations over target phrases.
  std::size_t max_steps = 11;
  // delta: fills need likelihood ratio R >= delta.
  double delta = 1.0;
  // N: fills requested per target phrase.
  std::size_t num_fills = 5000;
  // k: top-k sampling width passed to the infiller.
  std::size_t top_k = 50;
  TagWhitelist whitelist = DefaultTagWhitelist();
  std::uint64_t seed = 0;
  // Replaces each phrase token when measuring importance.
  std::string mask_token = "[MASK]";
  // Restrict CMLM context to the sentence holding the fill (single-text
  // tasks only; pairs are always scored whole).
  bool sentence_local_likelihood = true;
  // Per-example wall-clock budget; unset means unlimited.
  std::optional<std::chrono::milliseconds> time_budget;

  // Throws kInvalidArgument when a count is zero or delta <= 0.
  void Validate() const;
};

}  // namespace phrase_attack
