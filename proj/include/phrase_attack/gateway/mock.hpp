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

// Deterministic mock backends. Each is a pure function of its request, so a
// whole campaign over mocks is reproducible byte for byte.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "phrase_attack/gateway/backends.hpp"
#include "phrase_attack/gateway/protocol.hpp"

namespace phrase_attack::mock {

// Bag-of-words softmax classifier: logit(label) = bias(label) + sum over
// token occurrences of weight(token, label). Tokens of every segment count.
// With no weights and equal biases it is the uniform classifier.
class KeywordVictim : public VictimModel {
 public:
  using Weights = std::map<std::string, std::map<std::string, double>>;

  KeywordVictim(LabelSet labels, Weights weights,
                std::map<std::string, double> bias = {});

  const LabelSet& labels() const override { return labels_; }
  ClassDistribution Classify(const ClassifyRequest& request) override;

 private:
  LabelSet labels_;
  Weights weights_;
  std::map<std::string, double> bias_;
};

// Fill lists keyed on (last left-context token, first right-context token).
// "<s>" and "</s>" stand for the text boundaries and "*" matches anything.
// Lookup order: (left, right), (left, *), (*, right), then the default list.
// Fills longer than max_fill_len are dropped; the rest are truncated to N.
class TableInfiller : public Infiller {
 public:
  using Key = std::pair<std::string, std::string>;

  TableInfiller(std::map<Key, std::vector<TokenSequence>> table,
                std::vector<TokenSequence> default_fills);

  InfillResponse Infill(const InfillRequest& request) override;

 private:
  std::map<Key, std::vector<TokenSequence>> table_;
  std::vector<TokenSequence> default_fills_;
};

// Per-class unigram tables: P(token | label) = table[label][token], or
// `floor` for tokens absent from the table. Context is ignored.
class UnigramCmlm : public ClassConditionedMlm {
 public:
  using Tables = std::map<std::string, std::map<std::string, double>>;

  UnigramCmlm(LabelSet labels, Tables tables, double floor);

  CmlmTokenLikelihood TokenProb(const CmlmQuery& query) override;

 private:
  LabelSet labels_;
  Tables tables_;
  double floor_;
};

// Flat deterministic parser: tokens are grouped in pairs under alternating
// NP / VP constituents (punctuation gets its own preterminal) below
// (ROOT (S ...)).
class ChunkParser : public ConstituencyParser {
 public:
  std::string Parse(const TokenSequence& tokens) override;
};

// exp(-mean log p) under a unigram table with a floor.
class UnigramPerplexity : public PerplexityScorer {
 public:
  UnigramPerplexity(std::map<std::string, double> table, double floor);

  double Perplexity(const TokenSequence& tokens) override;

 private:
  std::map<std::string, double> table_;
  double floor_;
};

// All mock roles built from one JSON description:
//
//   {"labels": ["neg", "pos"],
//    "victim": {"bias": {"pos": 0.5}, "weights": {"terrible": {"neg": 2.0}}},
//    "infiller": {"default": ["fine"],
//                 "table": [{"left": "the", "right": "*", "fills": [...]}]},
//    "cmlm": {"floor": 1e-4, "tables": {"neg": {...}, "pos": {...}}},
//    "perplexity": {"floor": 1e-4, "table": {...}}}          (optional)
//
// Fills are tokenized with Tokenize(). The parser role is a ChunkParser.
// Throws kParseError on schema violations.
BackendSet BackendsFromJson(const protocol::Json& json);
// Throws kParseError when the file is missing or not valid JSON.
BackendSet LoadBackends(const std::filesystem::path& path);

}  // namespace phrase_attack::mock
