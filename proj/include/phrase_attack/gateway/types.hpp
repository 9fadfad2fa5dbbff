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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phrase_attack/text.hpp"

namespace phrase_attack {

// Engine-side floor applied to any probability before taking its log.
inline constexpr double kLikelihoodFloor = 1e-12;

// Probability of each label in a LabelSet. Construction validates every
// probability is in [0, 1], the full label set is covered, and the total is
// 1 within 1e-6.
class ClassDistribution {
 public:
  static constexpr double kSumTolerance = 1e-6;

  // Throws kProtocolError when the invariants do not hold.
  ClassDistribution(const LabelSet& labels,
                    const std::map<std::string, double>& probs);

  static ClassDistribution Uniform(const LabelSet& labels);

  // Throws kUnknownLabel for ids outside the label set.
  double Prob(const std::string& label_id) const;
  // First label (in label-set order) among the maxima.
  const std::string& Argmax() const;

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& probs() const { return probs_; }
  std::map<std::string, double> AsMap() const;

 private:
  ClassDistribution() = default;

  std::vector<std::string> ids_;
  std::vector<double> probs_;
};

struct ClassifyRequest {
  // One segment or a (premise, hypothesis) pair.
  std::vector<TokenSequence> segments;
};

// Blank-infilling request: the blank sits between `left` and `right`.
struct InfillRequest {
  TokenSequence left;
  TokenSequence right;
  std::size_t max_fill_len = 1;
  std::size_t num_samples = 1;
  std::size_t top_k = 1;
  std::uint64_t seed = 0;

  // Throws kInvalidArgument unless max_fill_len, num_samples, top_k >= 1.
  void Validate() const;
};

struct InfillResponse {
  std::vector<TokenSequence> fills;
};

// Probability of segments[segment][masked_index] under the class-conditioned
// MLM for `label`, with that token masked. Pair tasks send both segments.
struct CmlmQuery {
  std::vector<TokenSequence> segments;
  std::size_t segment = 0;
  std::size_t masked_index = 0;
  std::string label;

  const TokenSequence& sequence() const { return segments.at(segment); }
  // Throws kInvalidArgument for an out-of-range segment or index.
  void Validate() const;
};

struct CmlmTokenLikelihood {
  double prob = 0.0;
};

}  // namespace phrase_attack
