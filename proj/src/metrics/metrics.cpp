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

#include "phrase_attack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "phrase_attack/error.hpp"

namespace phrase_attack {
namespace {

using Json = nlohmann::json;

std::map<std::vector<Token>, std::size_t> CountNgrams(
    const TokenSequence& tokens, std::size_t n) {
  std::map<std::vector<Token>, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<Token>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                tokens.begin() +
                                    static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::optional<double> Mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

Json Nullable(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

std::optional<double> ReadNullable(const Json& json, const char* key) {
  const Json& value = json.at(key);
  if (value.is_null()) return std::nullopt;
  return value.get<double>();
}

std::string Cell(const std::optional<double>& value, const char* format,
                 double scale = 1.0) {
  if (!value) return "-";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, *value * scale);
  return buffer;
}

std::string Pad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text + " "
                              : text + std::string(width - text.size(), ' ');
}

}  // namespace

std::size_t EditDistance(const TokenSequence& a, const TokenSequence& b) {
  std::vector<std::size_t> previous(b.size() + 1);
  std::vector<std::size_t> current(b.size() + 1);
  std::iota(previous.begin(), previous.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    current[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute =
          previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitute});
    }
    std::swap(previous, current);
  }
  return previous[b.size()];
}

double NormalizedEditDistance(const TokenSequence& original,
                              const TokenSequence& perturbed) {
  if (original.empty()) {
    throw Error(ErrorCode::kEmptyText, "DIS needs a non-empty original");
  }
  return static_cast<double>(EditDistance(original, perturbed)) /
         static_cast<double>(original.size());
}

double Bleu(const TokenSequence& reference, const TokenSequence& candidate,
            int max_order) {
  if (reference.empty() || candidate.empty()) {
    throw Error(ErrorCode::kEmptyText, "BLEU needs non-empty sequences");
  }
  if (max_order < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_order must be >= 1");
  }
  double log_precision = 0.0;
  for (int n = 1; n <= max_order; ++n) {
    const auto candidate_counts =
        CountNgrams(candidate, static_cast<std::size_t>(n));
    const auto reference_counts =
        CountNgrams(reference, static_cast<std::size_t>(n));
    std::size_t total = 0;
    std::size_t matched = 0;
    for (const auto& [ngram, count] : candidate_counts) {
      total += count;
      const auto it = reference_counts.find(ngram);
      if (it != reference_counts.end()) matched += std::min(count, it->second);
    }
    double precision = 1.0;
    if (total > 0) {
      precision = matched > 0
                      ? static_cast<double>(matched) / static_cast<double>(total)
                      : 1.0 / static_cast<double>(total + 1);
    }
    log_precision += std::log(precision) / max_order;
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_precision);
}

ResultSummary Summarize(const AttackResult& result,
                        PerplexityScorer* perplexity) {
  ResultSummary summary;
  summary.status = result.status;
  for (const auto& step : result.steps) {
    if (step.chosen) summary.committed_tags.push_back(step.target.tag);
  }
  if (result.status == AttackStatus::kSuccess && result.perturbed) {
    const TokenSequence& original = result.original.AttackText();
    summary.dis = NormalizedEditDistance(original, *result.perturbed);
    summary.bleu = Bleu(original, *result.perturbed);
    if (perplexity) summary.ppl = perplexity->Perplexity(*result.perturbed);
  }
  return summary;
}

std::optional<double> AttackSuccessRate(
    const std::vector<ResultSummary>& results) {
  std::size_t success = 0;
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.status == AttackStatus::kSuccess) ++success;
    if (r.status == AttackStatus::kFailed) ++failed;
  }
  if (success + failed == 0) return std::nullopt;
  return static_cast<double>(success) / static_cast<double>(success + failed);
}

std::map<std::string, double> TagFrequency(
    const std::vector<ResultSummary>& results) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& r : results) {
    if (r.status != AttackStatus::kSuccess) continue;
    for (const auto& tag : r.committed_tags) {
      ++counts[tag];
      ++total;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [tag, count] : counts) {
    out[tag] = static_cast<double>(count) / static_cast<double>(total);
  }
  return out;
}

SuccessMeans MeanMetricsOverSuccesses(const std::vector<ResultSummary>& results,
                                      bool with_perplexity) {
  std::vector<double> dis, bleu, ppl;
  for (const auto& r : results) {
    if (r.status != AttackStatus::kSuccess) continue;
    if (r.dis) dis.push_back(*r.dis);
    if (r.bleu) bleu.push_back(*r.bleu);
    if (r.ppl) ppl.push_back(*r.ppl);
  }
  SuccessMeans means;
  means.dis = Mean(dis);
  means.bleu = Mean(bleu);
  if (with_perplexity) means.ppl = Mean(ppl);
  return means;
}

RunReport BuildReport(const std::vector<ResultSummary>& results,
                      bool with_perplexity) {
  RunReport report;
  for (const auto& r : results) {
    switch (r.status) {
      case AttackStatus::kSuccess: ++report.counts.success; break;
      case AttackStatus::kFailed: ++report.counts.failed; break;
      case AttackStatus::kSkippedMisclassified: ++report.counts.skipped; break;
      case AttackStatus::kErrored: ++report.counts.errored; break;
    }
  }
  report.asr = AttackSuccessRate(results);
  const SuccessMeans means = MeanMetricsOverSuccesses(results, with_perplexity);
  report.mean_dis = means.dis;
  report.mean_bleu = means.bleu;
  report.mean_ppl = means.ppl;
  report.with_perplexity = with_perplexity;
  report.tag_frequency = TagFrequency(results);
  return report;
}

Json ReportToJson(const RunReport& report) {
  return {
      {"asr", Nullable(report.asr)},
      {"mean_dis", Nullable(report.mean_dis)},
      {"mean_bleu", Nullable(report.mean_bleu)},
      {"mean_ppl", Nullable(report.mean_ppl)},
      {"with_perplexity", report.with_perplexity},
      {"counts",
       {{"success", report.counts.success},
        {"failed", report.counts.failed},
        {"skipped", report.counts.skipped},
        {"errored", report.counts.errored}}},
      {"tag_frequency", report.tag_frequency},
  };
}

RunReport ReportFromJson(const Json& json) {
  try {
    RunReport report;
    report.asr = ReadNullable(json, "asr");
    report.mean_dis = ReadNullable(json, "mean_dis");
    report.mean_bleu = ReadNullable(json, "mean_bleu");
    report.mean_ppl = ReadNullable(json, "mean_ppl");
    report.with_perplexity = json.at("with_perplexity").get<bool>();
    const Json& counts = json.at("counts");
    report.counts.success = counts.at("success").get<std::size_t>();
    report.counts.failed = counts.at("failed").get<std::size_t>();
    report.counts.skipped = counts.at("skipped").get<std::size_t>();
    report.counts.errored = counts.at("errored").get<std::size_t>();
    report.tag_frequency =
        json.at("tag_frequency").get<std::map<std::string, double>>();
    return report;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  }
}

std::string FormatReportTable(const RunReport& report) {
  constexpr std::size_t kWidth = 8;
  std::string out = Pad("ASR", kWidth) + Pad("DIS", kWidth) + Pad("BLEU", kWidth);
  if (report.with_perplexity) out += Pad("PPL", kWidth);
  std::string values = Pad(Cell(report.asr, "%.1f", 100.0), kWidth) +
                       Pad(Cell(report.mean_dis, "%.2f"), kWidth) +
                       Pad(Cell(report.mean_bleu, "%.2f"), kWidth);
  if (report.with_perplexity) {
    values += Pad(Cell(report.mean_ppl, "%.1f"), kWidth);
  }
  // Trailing padding is noise in diffs.
  for (std::string* line : {&out, &values}) {
    while (!line->empty() && line->back() == ' ') line->pop_back();
  }
  out += "\n" + values + "\n";

  const auto& c = report.counts;
  out += "success " + std::to_string(c.success) + "  failed " +
         std::to_string(c.failed) + "  skipped " + std::to_string(c.skipped) +
         "  errored " + std::to_string(c.errored) + "\n";

  if (!report.tag_frequency.empty()) {
    std::vector<std::pair<std::string, double>> tags(
        report.tag_frequency.begin(), report.tag_frequency.end());
    std::stable_sort(tags.begin(), tags.end(), [](const auto& a, const auto& b) {
      return a.second > b.second;
    });
    out += "tags";
    for (const auto& [tag, share] : tags) {
      out += "  " + tag + " " + Cell(share, "%.1f%%", 100.0);
    }
    out += "\n";
  }
  return out;
}

}  // namespace phrase_attack
