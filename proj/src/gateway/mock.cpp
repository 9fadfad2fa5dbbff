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

#include "phrase_attack/gateway/mock.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "phrase_attack/error.hpp"

namespace phrase_attack::mock {

using protocol::Json;

KeywordVictim::KeywordVictim(LabelSet labels, Weights weights,
                             std::map<std::string, double> bias)
    : labels_(std::move(labels)),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {}

ClassDistribution KeywordVictim::Classify(const ClassifyRequest& request) {
  std::vector<double> logits;
  for (const auto& label : labels_.labels()) {
    const auto it = bias_.find(label.id);
    logits.push_back(it == bias_.end() ? 0.0 : it->second);
  }
  for (const auto& segment : request.segments) {
    for (const auto& token : segment) {
      const auto row = weights_.find(token);
      if (row == weights_.end()) continue;
      for (std::size_t i = 0; i < labels_.size(); ++i) {
        const auto w = row->second.find(labels_.labels()[i].id);
        if (w != row->second.end()) logits[i] += w->second;
      }
    }
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (auto& logit : logits) {
    logit = std::exp(logit - top);
    total += logit;
  }
  std::map<std::string, double> probs;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    probs[labels_.labels()[i].id] = logits[i] / total;
  }
  return ClassDistribution(labels_, probs);
}

TableInfiller::TableInfiller(std::map<Key, std::vector<TokenSequence>> table,
                             std::vector<TokenSequence> default_fills)
    : table_(std::move(table)), default_fills_(std::move(default_fills)) {}

InfillResponse TableInfiller::Infill(const InfillRequest& request) {
  request.Validate();
  const std::string left =
      request.left.empty() ? "<s>" : request.left[request.left.size() - 1];
  const std::string right = request.right.empty() ? "</s>" : request.right[0];
  const std::vector<TokenSequence>* fills = &default_fills_;
  for (const Key& key : {Key{left, right}, Key{left, "*"}, Key{"*", right}}) {
    const auto it = table_.find(key);
    if (it != table_.end()) {
      fills = &it->second;
      break;
    }
  }
  InfillResponse response;
  for (const auto& fill : *fills) {
    if (response.fills.size() >= request.num_samples) break;
    if (fill.empty() || fill.size() > request.max_fill_len) continue;
    response.fills.push_back(fill);
  }
  return response;
}

UnigramCmlm::UnigramCmlm(LabelSet labels, Tables tables, double floor)
    : labels_(std::move(labels)), tables_(std::move(tables)), floor_(floor) {}

CmlmTokenLikelihood UnigramCmlm::TokenProb(const CmlmQuery& query) {
  if (!labels_.Contains(query.label)) {
    throw Error(ErrorCode::kUnknownLabel,
                "label '" + query.label + "' not in label set");
  }
  query.Validate();
  const Token& token = query.sequence()[query.masked_index];
  const auto table = tables_.find(query.label);
  if (table != tables_.end()) {
    const auto it = table->second.find(token);
    if (it != table->second.end()) return {it->second};
  }
  return {floor_};
}

std::string ChunkParser::Parse(const TokenSequence& tokens) {
  auto terminal = [](const Token& token) -> std::string {
    if (token == "(") return "-LRB-";
    if (token == ")") return "-RRB-";
    return token;
  };
  auto is_punct = [](const Token& token) {
    return token.size() == 1 && IsSplitPunctuation(token[0]);
  };
  std::string out = "(ROOT (S";
  std::size_t chunk = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (is_punct(tokens[i])) {
      out += " (PUNCT " + terminal(tokens[i]) + ")";
      ++i;
      continue;
    }
    const bool noun = chunk % 2 == 0;
    out += noun ? " (NP" : " (VP";
    for (std::size_t taken = 0;
         taken < 2 && i < tokens.size() && !is_punct(tokens[i]); ++taken, ++i) {
      out += std::string(noun ? " (NN " : " (VB ") + terminal(tokens[i]) + ")";
    }
    out += ")";
    ++chunk;
  }
  out += "))";
  return out;
}

UnigramPerplexity::UnigramPerplexity(std::map<std::string, double> table,
                                     double floor)
    : table_(std::move(table)), floor_(floor) {}

double UnigramPerplexity::Perplexity(const TokenSequence& tokens) {
  if (tokens.empty()) return 1.0;
  double log_sum = 0.0;
  for (const auto& token : tokens) {
    const auto it = table_.find(token);
    const double p = it == table_.end() ? floor_ : it->second;
    log_sum += std::log(std::max(p, kLikelihoodFloor));
  }
  return std::exp(-log_sum / static_cast<double>(tokens.size()));
}

namespace {

std::vector<TokenSequence> ReadFills(const Json& json) {
  std::vector<TokenSequence> out;
  for (const auto& fill : json) out.push_back(Tokenize(fill.get<std::string>()));
  return out;
}

BackendSet Build(const Json& json) {
  BackendSet set;
  set.labels = LabelSet::FromIds(json.at("labels").get<std::vector<std::string>>());
  if (set.labels.size() < 2) {
    throw Error(ErrorCode::kParseError, "mock models need at least two labels");
  }

  const Json victim = json.value("victim", Json::object());
  set.victim = std::make_shared<KeywordVictim>(
      set.labels,
      victim.value("weights", Json::object()).get<KeywordVictim::Weights>(),
      victim.value("bias", Json::object()).get<std::map<std::string, double>>());

  const Json infiller = json.value("infiller", Json::object());
  std::map<TableInfiller::Key, std::vector<TokenSequence>> table;
  for (const auto& row : infiller.value("table", Json::array())) {
    table[{row.at("left").get<std::string>(),
           row.at("right").get<std::string>()}] = ReadFills(row.at("fills"));
  }
  set.infiller = std::make_shared<TableInfiller>(
      std::move(table), ReadFills(infiller.value("default", Json::array())));

  const Json cmlm = json.value("cmlm", Json::object());
  set.cmlm = std::make_shared<UnigramCmlm>(
      set.labels,
      cmlm.value("tables", Json::object()).get<UnigramCmlm::Tables>(),
      cmlm.value("floor", 1e-4));

  set.parser = std::make_shared<ChunkParser>();

  if (json.contains("perplexity")) {
    const Json& ppl = json["perplexity"];
    set.perplexity = std::make_shared<UnigramPerplexity>(
        ppl.value("table", Json::object()).get<std::map<std::string, double>>(),
        ppl.value("floor", 1e-4));
  }
  return set;
}

}  // namespace

BackendSet BackendsFromJson(const Json& json) {
  try {
    return Build(json);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("mock model description: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError,
                std::string("mock model description: ") + e.what());
  }
}

BackendSet LoadBackends(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  }
  Json json = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded()) {
    throw Error(ErrorCode::kParseError, path.string() + " is not valid JSON");
  }
  return BackendsFromJson(json);
}

}  // namespace phrase_attack::mock
