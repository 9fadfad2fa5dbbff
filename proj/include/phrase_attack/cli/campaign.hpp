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

// Run configuration, backend wiring, the worker pool over examples and the
// result/report files.

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phrase_attack/attack/attack.hpp"
#include "phrase_attack/gateway/transport.hpp"
#include "phrase_attack/metrics.hpp"

namespace phrase_attack::cli {

enum class TreeSource { kInline, kEndpoint };

// Base URLs ("http://host:port") per role. An empty role URL falls back to
// `base`.
struct Endpoints {
  std::string base;
  std::string classify;
  std::string infill;
  std::string cmlm;
  std::string parse;
  // Does not fall back to `base`: PPL is computed only when this is set.
  std::string perplexity;

  std::string Resolve(const std::string& role_url) const {
    return role_url.empty() ? base : role_url;
  }
};

struct RunConfig {
  std::filesystem::path dataset;
  TreeSource tree_source = TreeSource::kInline;
  Endpoints endpoints;
  // In-process mock backends described by a JSON file; replaces endpoints.
  std::optional<std::filesystem::path> mock_models;
  // Label ids in victim output order; empty means ask the classify endpoint.
  std::vector<std::string> labels;
  AttackConfig attack;
  std::size_t limit = 1000;
  std::size_t workers = 1;
  std::optional<std::filesystem::path> cache_dir;
  bool cache_enabled = true;
  std::filesystem::path output_dir = "attack-out";
  // Seeds both the dataset sample and the infill requests.
  std::uint64_t seed = 0;

  // Throws kInvalidArgument for malformed URLs, a zero limit or worker count,
  // or a missing backend description.
  void Validate() const;
};

// Backends ready for a campaign, with the shared response cache.
struct Runtime {
  BackendSet backends;
  std::shared_ptr<ResponseCache> cache;
};

// Wires remote clients (or in-process mocks behind the same protocol
// encoding) through one response cache and health-checks every distinct
// endpoint. Throws kBackendUnavailable when an endpoint is unreachable.
Runtime BuildRuntime(const RunConfig& config);

struct CampaignOutput {
  // Finished examples in input order; shorter than the input when stopped.
  std::vector<AttackResult> results;
  std::vector<ResultSummary> summaries;
  RunReport report;
  bool interrupted = false;
};

// Attacks every example on a pool of `workers` threads. Setting `*stop`
// lets in-flight examples finish and skips the rest.
CampaignOutput RunCampaign(const std::vector<LabeledExample>& examples,
                           const BackendSet& backends,
                           const AttackConfig& config, std::size_t workers,
                           const std::atomic<bool>* stop = nullptr);

// One results.jsonl record. With `with_perplexity` every record carries a
// "ppl" field (null unless the attack succeeded).
nlohmann::json ResultToJson(const AttackResult& result,
                            const ResultSummary& summary,
                            bool with_perplexity);

// Rebuilds the metric inputs from a results.jsonl record, recomputing DIS
// and BLEU from the stored tokens. Throws kParseError.
ResultSummary SummaryFromJson(const nlohmann::json& record);

// Reads a whole results.jsonl file. Throws kParseError with a line number.
// `with_perplexity` reports whether the records carry "ppl" fields.
std::vector<ResultSummary> ReadResults(const std::filesystem::path& path,
                                       bool* with_perplexity = nullptr);

// Writes results.jsonl and report.json under `directory` (created if needed).
void WriteArtifacts(const std::filesystem::path& directory,
                    const CampaignOutput& output);

}  // namespace phrase_attack::cli
