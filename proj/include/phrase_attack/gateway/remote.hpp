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

// Protocol clients implementing the backend interfaces over a Transport.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "phrase_attack/gateway/backends.hpp"
#include "phrase_attack/gateway/transport.hpp"

namespace phrase_attack {

class RemoteVictim : public VictimModel {
 public:
  RemoteVictim(std::shared_ptr<Transport> transport, LabelSet labels);

  const LabelSet& labels() const override { return labels_; }
  ClassDistribution Classify(const ClassifyRequest& request) override;
  std::vector<ClassDistribution> ClassifyBatch(
      const std::vector<ClassifyRequest>& requests) override;

 private:
  std::shared_ptr<Transport> transport_;
  LabelSet labels_;
};

class RemoteInfiller : public Infiller {
 public:
  explicit RemoteInfiller(std::shared_ptr<Transport> transport)
      : transport_(std::move(transport)) {}

  InfillResponse Infill(const InfillRequest& request) override;

 private:
  std::shared_ptr<Transport> transport_;
};

class RemoteCmlm : public ClassConditionedMlm {
 public:
  RemoteCmlm(std::shared_ptr<Transport> transport, LabelSet labels);

  CmlmTokenLikelihood TokenProb(const CmlmQuery& query) override;
  std::vector<CmlmTokenLikelihood> TokenProbBatch(
      const std::vector<CmlmQuery>& queries) override;

 private:
  void CheckLabel(const CmlmQuery& query) const;

  std::shared_ptr<Transport> transport_;
  LabelSet labels_;
};

class RemoteParser : public ConstituencyParser {
 public:
  explicit RemoteParser(std::shared_ptr<Transport> transport)
      : transport_(std::move(transport)) {}

  std::string Parse(const TokenSequence& tokens) override;

 private:
  std::shared_ptr<Transport> transport_;
};

class RemotePerplexity : public PerplexityScorer {
 public:
  explicit RemotePerplexity(std::shared_ptr<Transport> transport)
      : transport_(std::move(transport)) {}

  double Perplexity(const TokenSequence& tokens) override;

 private:
  std::shared_ptr<Transport> transport_;
};

// GET /v1/health; returns the label ids the server reports.
std::vector<std::string> CheckHealth(Transport& transport);

}  // namespace phrase_attack
