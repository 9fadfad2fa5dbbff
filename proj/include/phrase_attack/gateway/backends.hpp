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

// Model roles consumed by the attack engine. Implementations must be safe to
// call concurrently from several workers.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "phrase_attack/gateway/types.hpp"

namespace phrase_attack {

class VictimModel {
 public:
  virtual ~VictimModel() = default;
  virtual const LabelSet& labels() const = 0;
  virtual ClassDistribution Classify(const ClassifyRequest& request) = 0;
  // Semantically a loop over Classify; remote clients send one request.
  virtual std::vector<ClassDistribution> ClassifyBatch(
      const std::vector<ClassifyRequest>& requests);
};

class Infiller {
 public:
  virtual ~Infiller() = default;
  virtual InfillResponse Infill(const InfillRequest& request) = 0;
};

class ClassConditionedMlm {
 public:
  virtual ~ClassConditionedMlm() = default;
  virtual CmlmTokenLikelihood TokenProb(const CmlmQuery& query) = 0;
  virtual std::vector<CmlmTokenLikelihood> TokenProbBatch(
      const std::vector<CmlmQuery>& queries);
};

class ConstituencyParser {
 public:
  virtual ~ConstituencyParser() = default;
  // PTB bracketed tree whose terminals are exactly `tokens`.
  virtual std::string Parse(const TokenSequence& tokens) = 0;
};

class PerplexityScorer {
 public:
  virtual ~PerplexityScorer() = default;
  virtual double Perplexity(const TokenSequence& tokens) = 0;
};

// One implementation per role. `parser` and `perplexity` may be null.
struct BackendSet {
  LabelSet labels;
  std::shared_ptr<VictimModel> victim;
  std::shared_ptr<Infiller> infiller;
  std::shared_ptr<ClassConditionedMlm> cmlm;
  std::shared_ptr<ConstituencyParser> parser;
  std::shared_ptr<PerplexityScorer> perplexity;
};

}  // namespace phrase_attack
