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

#include <cmath>

#include "phrase_attack/error.hpp"
#include "phrase_attack/gateway/backends.hpp"
#include "phrase_attack/gateway/types.hpp"

namespace phrase_attack {

ClassDistribution::ClassDistribution(
    const LabelSet& labels, const std::map<std::string, double>& probs) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::kProtocolError,
                "distribution has " + std::to_string(probs.size()) +
                    " entries for " + std::to_string(labels.size()) +
                    " labels");
  }
  double total = 0.0;
  for (const auto& label : labels.labels()) {
    const auto it = probs.find(label.id);
    if (it == probs.end()) {
      throw Error(ErrorCode::kProtocolError,
                  "distribution misses label '" + label.id + "'");
    }
    const double p = it->second;
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::kProtocolError,
                  "probability of '" + label.id + "' outside [0, 1]");
    }
    ids_.push_back(label.id);
    probs_.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kProtocolError,
                "probabilities sum to " + std::to_string(total));
  }
}

ClassDistribution ClassDistribution::Uniform(const LabelSet& labels) {
  std::map<std::string, double> probs;
  for (const auto& label : labels.labels()) {
    probs[label.id] = 1.0 / static_cast<double>(labels.size());
  }
  return ClassDistribution(labels, probs);
}

double ClassDistribution::Prob(const std::string& label_id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == label_id) return probs_[i];
  }
  throw Error(ErrorCode::kUnknownLabel,
              "label '" + label_id + "' not in distribution");
}

const std::string& ClassDistribution::Argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return ids_.at(best);
}

std::map<std::string, double> ClassDistribution::AsMap() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < ids_.size(); ++i) out[ids_[i]] = probs_[i];
  return out;
}

void InfillRequest::Validate() const {
  if (max_fill_len < 1 || num_samples < 1 || top_k < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "infill request needs max_fill_len, num_samples and top_k "
                ">= 1");
  }
}

void CmlmQuery::Validate() const {
  if (segment >= segments.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cmlm segment out of range");
  }
  if (masked_index >= segments[segment].size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cmlm masked_index out of range");
  }
}

std::vector<ClassDistribution> VictimModel::ClassifyBatch(
    const std::vector<ClassifyRequest>& requests) {
  std::vector<ClassDistribution> out;
  out.reserve(requests.size());
  for (const auto& request : requests) out.push_back(Classify(request));
  return out;
}

std::vector<CmlmTokenLikelihood> ClassConditionedMlm::TokenProbBatch(
    const std::vector<CmlmQuery>& queries) {
  std::vector<CmlmTokenLikelihood> out;
  out.reserve(queries.size());
  for (const auto& query : queries) out.push_back(TokenProb(query));
  return out;
}

}  // namespace phrase_attack
