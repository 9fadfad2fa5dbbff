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

// Wire protocol v1. Bodies are JSON objects; nlohmann::json keeps object keys
// sorted, so dump() of a request is its canonical serialization.
//
//   POST /v1/classify    {"segments": [[tok...], ...]}
//                     -> {"probs": {label: p, ...}}
//                        batch form: {"batch": [req...]} -> {"results": [resp...]}
//   POST /v1/infill      {"left": [...], "right": [...], "max_fill_len": m,
//                         "num_samples": N, "top_k": k, "seed": s}
//                     -> {"fills": [[tok...], ...]}
//   POST /v1/cmlm        {"segments": [...], "segment": s, "masked_index": i,
//                         "label": id}
//                     -> {"prob": p}
//                        batch form as for classify
//   POST /v1/parse       {"tokens": [...]} -> {"tree": "(ROOT ...)"}
//   POST /v1/perplexity  {"tokens": [...]} -> {"perplexity": x}
//   GET  /v1/health   -> {"status": "ok", "labels": [id...]}
//
// Failures answer with a non-200 status and {"code": name, "message": text},
// where name is an ErrorCodeName().

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phrase_attack/error.hpp"
#include "phrase_attack/gateway/types.hpp"

namespace phrase_attack::protocol {

using Json = nlohmann::json;

inline constexpr std::string_view kClassifyPath = "/v1/classify";
inline constexpr std::string_view kInfillPath = "/v1/infill";
inline constexpr std::string_view kCmlmPath = "/v1/cmlm";
inline constexpr std::string_view kParsePath = "/v1/parse";
inline constexpr std::string_view kPerplexityPath = "/v1/perplexity";
inline constexpr std::string_view kHealthPath = "/v1/health";

Json EncodeTokens(const TokenSequence& tokens);
// Throws kProtocolError on anything but an array of valid token strings.
TokenSequence DecodeTokens(const Json& json);

Json Encode(const ClassifyRequest& request);
ClassifyRequest DecodeClassifyRequest(const Json& json);
Json Encode(const ClassDistribution& distribution);
ClassDistribution DecodeClassDistribution(const Json& json,
                                          const LabelSet& labels);

Json Encode(const InfillRequest& request);
InfillRequest DecodeInfillRequest(const Json& json);
Json Encode(const InfillResponse& response);
// Also enforces 1 <= |fill| <= max_fill_len.
InfillResponse DecodeInfillResponse(const Json& json,
                                    std::size_t max_fill_len);

Json Encode(const CmlmQuery& query);
CmlmQuery DecodeCmlmQuery(const Json& json);
Json Encode(const CmlmTokenLikelihood& likelihood);
CmlmTokenLikelihood DecodeCmlmTokenLikelihood(const Json& json);

Json EncodeBatch(const std::vector<Json>& items);
// Extracts "results" and checks it has `expected` entries.
std::vector<Json> DecodeBatchResults(const Json& json, std::size_t expected);

Json EncodeError(const Error& error);
// Rebuilds the Error carried by an envelope; malformed envelopes become
// kProtocolError.
Error DecodeError(const Json& json, std::string_view fallback_message);

}  // namespace phrase_attack::protocol
