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

#include "phrase_attack/gateway/protocol.hpp"

#include <cmath>

namespace phrase_attack::protocol {
namespace {

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kProtocolError, what);
}

const Json& Field(const Json& json, const char* name) {
  if (!json.is_object()) Malformed("expected a JSON object");
  const auto it = json.find(name);
  if (it == json.end()) Malformed(std::string("missing field '") + name + "'");
  return *it;
}

std::size_t Count(const Json& json, const char* name) {
  const Json& value = Field(json, name);
  if (!value.is_number_unsigned() && !(value.is_number_integer() &&
                                       value.get<std::int64_t>() >= 0)) {
    Malformed(std::string("field '") + name +
              "' must be a non-negative integer");
  }
  return value.get<std::size_t>();
}

std::vector<TokenSequence> DecodeSegments(const Json& json) {
  const Json& segments = Field(json, "segments");
  if (!segments.is_array() || segments.empty() || segments.size() > 2) {
    Malformed("'segments' must hold one or two token arrays");
  }
  std::vector<TokenSequence> out;
  for (const auto& segment : segments) out.push_back(DecodeTokens(segment));
  return out;
}

Json EncodeSegments(const std::vector<TokenSequence>& segments) {
  Json out = Json::array();
  for (const auto& segment : segments) out.push_back(EncodeTokens(segment));
  return out;
}

}  // namespace

Json EncodeTokens(const TokenSequence& tokens) {
  return Json(tokens.tokens());
}

TokenSequence DecodeTokens(const Json& json) {
  if (!json.is_array()) Malformed("expected a token array");
  std::vector<Token> tokens;
  tokens.reserve(json.size());
  for (const auto& item : json) {
    if (!item.is_string()) Malformed("tokens must be strings");
    tokens.push_back(item.get<std::string>());
  }
  try {
    return TokenSequence(std::move(tokens));
  } catch (const Error& e) {
    Malformed(e.detail());
  }
}

Json Encode(const ClassifyRequest& request) {
  return {{"segments", EncodeSegments(request.segments)}};
}

ClassifyRequest DecodeClassifyRequest(const Json& json) {
  return {DecodeSegments(json)};
}

Json Encode(const ClassDistribution& distribution) {
  Json probs = Json::object();
  for (std::size_t i = 0; i < distribution.ids().size(); ++i) {
    probs[distribution.ids()[i]] = distribution.probs()[i];
  }
  return {{"probs", probs}};
}

ClassDistribution DecodeClassDistribution(const Json& json,
                                          const LabelSet& labels) {
  const Json& probs = Field(json, "probs");
  if (!probs.is_object()) Malformed("'probs' must be an object");
  std::map<std::string, double> values;
  for (const auto& [label, value] : probs.items()) {
    if (!value.is_number()) Malformed("probabilities must be numbers");
    values[label] = value.get<double>();
  }
  return ClassDistribution(labels, values);
}

Json Encode(const InfillRequest& request) {
  return {{"left", EncodeTokens(request.left)},
          {"right", EncodeTokens(request.right)},
          {"max_fill_len", request.max_fill_len},
          {"num_samples", request.num_samples},
          {"top_k", request.top_k},
          {"seed", request.seed}};
}

InfillRequest DecodeInfillRequest(const Json& json) {
  InfillRequest request;
  request.left = DecodeTokens(Field(json, "left"));
  request.right = DecodeTokens(Field(json, "right"));
  request.max_fill_len = Count(json, "max_fill_len");
  request.num_samples = Count(json, "num_samples");
  request.top_k = Count(json, "top_k");
  request.seed = Count(json, "seed");
  return request;
}

Json Encode(const InfillResponse& response) {
  Json fills = Json::array();
  for (const auto& fill : response.fills) fills.push_back(EncodeTokens(fill));
  return {{"fills", fills}};
}

InfillResponse DecodeInfillResponse(const Json& json,
                                    std::size_t max_fill_len) {
  const Json& fills = Field(json, "fills");
  if (!fills.is_array()) Malformed("'fills' must be an array");
  InfillResponse response;
  for (const auto& fill : fills) {
    TokenSequence tokens = DecodeTokens(fill);
    if (tokens.empty() || tokens.size() > max_fill_len) {
      Malformed("fill length " + std::to_string(tokens.size()) +
                " outside [1, " + std::to_string(max_fill_len) + "]");
    }
    response.fills.push_back(std::move(tokens));
  }
  return response;
}

Json Encode(const CmlmQuery& query) {
  return {{"segments", EncodeSegments(query.segments)},
          {"segment", query.segment},
          {"masked_index", query.masked_index},
          {"label", query.label}};
}

CmlmQuery DecodeCmlmQuery(const Json& json) {
  CmlmQuery query;
  query.segments = DecodeSegments(json);
  query.segment = Count(json, "segment");
  query.masked_index = Count(json, "masked_index");
  const Json& label = Field(json, "label");
  if (!label.is_string()) Malformed("'label' must be a string");
  query.label = label.get<std::string>();
  return query;
}

Json Encode(const CmlmTokenLikelihood& likelihood) {
  return {{"prob", likelihood.prob}};
}

CmlmTokenLikelihood DecodeCmlmTokenLikelihood(const Json& json) {
  const Json& prob = Field(json, "prob");
  if (!prob.is_number()) Malformed("'prob' must be a number");
  const double p = prob.get<double>();
  // 0 is tolerated here; the engine floors it before taking logs.
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    Malformed("'prob' outside [0, 1]");
  }
  return {p};
}

Json EncodeBatch(const std::vector<Json>& items) {
  return {{"batch", items}};
}

std::vector<Json> DecodeBatchResults(const Json& json, std::size_t expected) {
  const Json& results = Field(json, "results");
  if (!results.is_array() || results.size() != expected) {
    Malformed("batch answer has the wrong number of results");
  }
  return results.get<std::vector<Json>>();
}

Json EncodeError(const Error& error) {
  return {{"code", std::string(ErrorCodeName(error.code()))},
          {"message", error.detail()}};
}

Error DecodeError(const Json& json, std::string_view fallback_message) {
  if (json.is_object() && json.contains("code") && json["code"].is_string()) {
    const std::string message =
        json.contains("message") && json["message"].is_string()
            ? json["message"].get<std::string>()
            : std::string(fallback_message);
    return Error(ErrorCodeFromName(json["code"].get<std::string>()), message);
  }
  return Error(ErrorCode::kProtocolError, std::string(fallback_message));
}

}  // namespace phrase_attack::protocol
