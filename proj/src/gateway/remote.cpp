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

#include "phrase_attack/gateway/remote.hpp"

#include <cmath>

namespace phrase_attack {

using protocol::Json;

RemoteVictim::RemoteVictim(std::shared_ptr<Transport> transport,
                           LabelSet labels)
    : transport_(std::move(transport)), labels_(std::move(labels)) {}

ClassDistribution RemoteVictim::Classify(const ClassifyRequest& request) {
  return protocol::DecodeClassDistribution(
      transport_->Post(protocol::kClassifyPath, protocol::Encode(request)),
      labels_);
}

std::vector<ClassDistribution> RemoteVictim::ClassifyBatch(
    const std::vector<ClassifyRequest>& requests) {
  if (requests.empty()) return {};
  std::vector<Json> items;
  items.reserve(requests.size());
  for (const auto& request : requests) {
    items.push_back(protocol::Encode(request));
  }
  const Json answer =
      transport_->Post(protocol::kClassifyPath, protocol::EncodeBatch(items));
  std::vector<ClassDistribution> out;
  out.reserve(requests.size());
  for (const auto& result :
       protocol::DecodeBatchResults(answer, requests.size())) {
    out.push_back(protocol::DecodeClassDistribution(result, labels_));
  }
  return out;
}

InfillResponse RemoteInfiller::Infill(const InfillRequest& request) {
  request.Validate();
  InfillResponse response = protocol::DecodeInfillResponse(
      transport_->Post(protocol::kInfillPath, protocol::Encode(request)),
      request.max_fill_len);
  if (response.fills.size() > request.num_samples) {
    throw Error(ErrorCode::kProtocolError,
                "infill returned more than num_samples fills");
  }
  return response;
}

RemoteCmlm::RemoteCmlm(std::shared_ptr<Transport> transport, LabelSet labels)
    : transport_(std::move(transport)), labels_(std::move(labels)) {}

void RemoteCmlm::CheckLabel(const CmlmQuery& query) const {
  if (!labels_.Contains(query.label)) {
    throw Error(ErrorCode::kUnknownLabel,
                "label '" + query.label + "' not in label set");
  }
  query.Validate();
}

CmlmTokenLikelihood RemoteCmlm::TokenProb(const CmlmQuery& query) {
  CheckLabel(query);
  return protocol::DecodeCmlmTokenLikelihood(
      transport_->Post(protocol::kCmlmPath, protocol::Encode(query)));
}

std::vector<CmlmTokenLikelihood> RemoteCmlm::TokenProbBatch(
    const std::vector<CmlmQuery>& queries) {
  if (queries.empty()) return {};
  std::vector<Json> items;
  items.reserve(queries.size());
  for (const auto& query : queries) {
    CheckLabel(query);
    items.push_back(protocol::Encode(query));
  }
  const Json answer =
      transport_->Post(protocol::kCmlmPath, protocol::EncodeBatch(items));
  std::vector<CmlmTokenLikelihood> out;
  out.reserve(queries.size());
  for (const auto& result :
       protocol::DecodeBatchResults(answer, queries.size())) {
    out.push_back(protocol::DecodeCmlmTokenLikelihood(result));
  }
  return out;
}

std::string RemoteParser::Parse(const TokenSequence& tokens) {
  const Json answer = transport_->Post(
      protocol::kParsePath, {{"tokens", protocol::EncodeTokens(tokens)}});
  if (!answer.is_object() || !answer.contains("tree") ||
      !answer["tree"].is_string()) {
    throw Error(ErrorCode::kProtocolError, "parse answer lacks 'tree'");
  }
  return answer["tree"].get<std::string>();
}

double RemotePerplexity::Perplexity(const TokenSequence& tokens) {
  const Json answer = transport_->Post(
      protocol::kPerplexityPath, {{"tokens", protocol::EncodeTokens(tokens)}});
  if (!answer.is_object() || !answer.contains("perplexity") ||
      !answer["perplexity"].is_number()) {
    throw Error(ErrorCode::kProtocolError,
                "perplexity answer lacks 'perplexity'");
  }
  const double value = answer["perplexity"].get<double>();
  if (!std::isfinite(value) || value < 1.0) {
    throw Error(ErrorCode::kProtocolError, "perplexity must be >= 1");
  }
  return value;
}

std::vector<std::string> CheckHealth(Transport& transport) {
  const Json answer = transport.Get(protocol::kHealthPath);
  if (!answer.is_object() || answer.value("status", "") != "ok") {
    throw Error(ErrorCode::kBackendUnavailable, "health check failed");
  }
  std::vector<std::string> labels;
  if (answer.contains("labels") && answer["labels"].is_array()) {
    for (const auto& label : answer["labels"]) {
      if (label.is_string()) labels.push_back(label.get<std::string>());
    }
  }
  return labels;
}

}  // namespace phrase_attack
