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

// Attack-quality metrics (ASR, DIS, BLEU, PPL) and run reports.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phrase_attack/attack/attack.hpp"
#include "phrase_attack/gateway/backends.hpp"
#include "phrase_attack/text.hpp"

namespace phrase_attack {

// Token-level Levenshtein distance (unit insert/delete/substitute costs).
std::size_t EditDistance(const TokenSequence& a, const TokenSequence& b);

// EditDistance(original, perturbed) / |original|.
// Throws kEmptyText for an empty original.
double NormalizedEditDistance(const TokenSequence& original,
                              const TokenSequence& perturbed);

// Sentence BLEU with uniform weights over orders 1..max_order and the usual
// brevity penalty. An order with no clipped matches contributes
// 1 / (candidate n-grams + 1); an order with no candidate n-grams contributes 1.
// Throws kEmptyText when either side is empty.
double Bleu(const TokenSequence& reference, const TokenSequence& candidate,
            int max_order = 4);

// What the aggregate metrics need from one attack.
struct ResultSummary {
  AttackStatus status = AttackStatus::kFailed;
  // Set for successful attacks.
  std::optional<double> dis;
  std::optional<double> bleu;
  std::optional<double> ppl;
  // Tags of the committed phrases, in commit order.
  std::vector<std::string> committed_tags;
};

// DIS and BLEU against the attacked segment; PPL of the perturbed segment when
// `perplexity` is given. Metrics are only filled in for successes.
ResultSummary Summarize(const AttackResult& result,
                        PerplexityScorer* perplexity = nullptr);

// success / (success + failed); nullopt when both are zero.
std::optional<double> AttackSuccessRate(
    const std::vector<ResultSummary>& results);

// Share of committed phrases per tag, over successful attacks.
std::map<std::string, double> TagFrequency(
    const std::vector<ResultSummary>& results);

struct SuccessMeans {
  std::optional<double> dis;
  std::optional<double> bleu;
  std::optional<double> ppl;
};

// Means over successful attacks only. PPL is averaged only when
// `with_perplexity` is set.
SuccessMeans MeanMetricsOverSuccesses(const std::vector<ResultSummary>& results,
                                      bool with_perplexity);

struct StatusCounts {
  std::size_t success = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  std::size_t errored = 0;

  bool operator==(const StatusCounts&) const = default;
};

struct RunReport {
  std::optional<double> asr;
  std::optional<double> mean_dis;
  std::optional<double> mean_bleu;
  std::optional<double> mean_ppl;
  bool with_perplexity = false;
  StatusCounts counts;
  std::map<std::string, double> tag_frequency;
};

RunReport BuildReport(const std::vector<ResultSummary>& results,
                      bool with_perplexity);

// Absent metrics are written as null.
nlohmann::json ReportToJson(const RunReport& report);
// Throws kParseError on a malformed report.
RunReport ReportFromJson(const nlohmann::json& json);

// ASR in percent with one decimal, DIS and BLEU with two, PPL with one
// (column only when perplexity was configured); absent cells print "-".
std::string FormatReportTable(const RunReport& report);

}  // namespace phrase_attack
