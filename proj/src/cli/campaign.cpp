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

#include "phrase_attack/cli/campaign.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <thread>

#include "phrase_attack/error.hpp"
#include "phrase_attack/gateway/mock.hpp"
#include "phrase_attack/gateway/remote.hpp"
#include "phrase_attack/gateway/server.hpp"

namespace phrase_attack::cli {
namespace {

using Json = nlohmann::json;

bool IsBaseUrl(const std::string& url) {
  static const std::regex kPattern(R"(^http://[A-Za-z0-9._\-]+(:[0-9]{1,5})?/?$)");
  return std::regex_match(url, kPattern);
}

Json TokensJson(const TokenSequence& tokens) { return tokens.tokens(); }

TokenSequence TokensFrom(const Json& json) {
  return TokenSequence(json.get<std::vector<std::string>>());
}

Json SpanJson(const Span& span) { return Json::array({span.start, span.end}); }

Json OptionalJson(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

Json StepJson(const AttackStep& step) {
  Json chosen = nullptr;
  if (step.chosen) {
    chosen = {{"fill", TokensJson(step.chosen->fill)},
              {"generation_index", step.chosen->generation_index},
              {"log_ratio", step.chosen->log_ratio},
              {"score", OptionalJson(step.chosen->score)}};
  }
  return {{"step", step.step},
          {"tag", step.target.tag},
          {"span", SpanJson(step.target.span)},
          {"phrase", TokensJson(step.target.phrase)},
          {"depth", step.target.depth},
          {"importance", OptionalJson(step.target.importance)},
          {"fills_generated", step.fills_generated},
          {"fills_surviving_filter", step.fills_surviving_filter},
          {"chosen", chosen},
          {"victim_prob_after", step.victim_prob_after},
          {"victim_label_after", step.victim_label_after}};
}

}  // namespace

void RunConfig::Validate() const {
  attack.Validate();
  if (limit < 1) throw Error(ErrorCode::kInvalidArgument, "limit must be >= 1");
  if (workers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "workers must be >= 1");
  }
  for (const std::string* url :
       {&endpoints.base, &endpoints.classify, &endpoints.infill,
        &endpoints.cmlm, &endpoints.parse, &endpoints.perplexity}) {
    if (!url->empty() && !IsBaseUrl(*url)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "malformed endpoint '" + *url + "' (want http://host:port)");
    }
  }
  if (mock_models) return;
  for (const std::string* url :
       {&endpoints.classify, &endpoints.infill, &endpoints.cmlm}) {
    if (endpoints.Resolve(*url).empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "classify, infill and cmlm endpoints are required "
                  "(or mock models)");
    }
  }
  if (tree_source == TreeSource::kEndpoint &&
      endpoints.Resolve(endpoints.parse).empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tree source 'endpoint' needs a parse endpoint");
  }
}

Runtime BuildRuntime(const RunConfig& config) {
  config.Validate();
  Runtime runtime;
  runtime.cache = config.cache_dir && config.cache_enabled
                      ? std::make_shared<ResponseCache>(*config.cache_dir)
                      : std::make_shared<ResponseCache>();
  auto cached = [&](std::shared_ptr<Transport> inner) {
    return std::make_shared<CachingTransport>(std::move(inner), runtime.cache,
                                              config.cache_enabled);
  };

  BackendSet& set = runtime.backends;
  std::shared_ptr<Transport> classify, infill, cmlm, parse, perplexity;
  std::vector<std::string> served_labels;

  if (config.mock_models) {
    const BackendSet mocks = mock::LoadBackends(*config.mock_models);
    auto router = std::make_shared<ProtocolRouter>(mocks);
    auto transport = cached(std::make_shared<InProcessTransport>(router));
    served_labels = CheckHealth(*transport);
    classify = infill = cmlm = parse = transport;
    if (mocks.perplexity) perplexity = transport;
  } else {
    // One transport per distinct base URL, health-checked once.
    std::map<std::string, std::shared_ptr<Transport>> by_url;
    auto connect = [&](const std::string& url) -> std::shared_ptr<Transport> {
      if (url.empty()) return nullptr;
      auto& slot = by_url[url];
      if (!slot) {
        auto http = std::make_shared<HttpTransport>(url);
        try {
          CheckHealth(*http);
        } catch (const Error& e) {
          throw Error(ErrorCode::kBackendUnavailable,
                      "endpoint " + url + " is not healthy: " + e.detail());
        }
        slot = cached(http);
      }
      return slot;
    };
    const Endpoints& e = config.endpoints;
    classify = connect(e.Resolve(e.classify));
    infill = connect(e.Resolve(e.infill));
    cmlm = connect(e.Resolve(e.cmlm));
    parse = connect(e.Resolve(e.parse));
    perplexity = connect(e.perplexity);
    if (config.labels.empty()) served_labels = CheckHealth(*classify);
  }

  const std::vector<std::string>& ids =
      config.labels.empty() ? served_labels : config.labels;
  if (ids.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least two labels (pass --labels or serve them from "
                "the classify health check)");
  }
  set.labels = LabelSet::FromIds(ids);
  set.victim = std::make_shared<RemoteVictim>(classify, set.labels);
  set.infiller = std::make_shared<RemoteInfiller>(infill);
  set.cmlm = std::make_shared<RemoteCmlm>(cmlm, set.labels);
  if (parse) set.parser = std::make_shared<RemoteParser>(parse);
  if (perplexity) set.perplexity = std::make_shared<RemotePerplexity>(perplexity);
  return runtime;
}

CampaignOutput RunCampaign(const std::vector<LabeledExample>& examples,
                           const BackendSet& backends,
                           const AttackConfig& config, std::size_t workers,
                           const std::atomic<bool>* stop) {
  const std::size_t n = examples.size();
  std::vector<std::optional<AttackResult>> results(n);
  std::vector<ResultSummary> summaries(n);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    while (!(stop && stop->load())) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      AttackResult result = Attack(examples[i], backends, config);
      ResultSummary summary;
      try {
        summary = Summarize(result, backends.perplexity.get());
      } catch (const Error& e) {
        result.status = AttackStatus::kErrored;
        result.message = e.what();
        summary = ResultSummary{};
        summary.status = AttackStatus::kErrored;
      }
      summaries[i] = std::move(summary);
      results[i] = std::move(result);
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, n));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }

  CampaignOutput output;
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) {
      output.interrupted = true;
      continue;
    }
    output.results.push_back(std::move(*results[i]));
    output.summaries.push_back(std::move(summaries[i]));
  }
  output.report =
      BuildReport(output.summaries, backends.perplexity != nullptr);
  return output;
}

Json ResultToJson(const AttackResult& result, const ResultSummary& summary,
                  bool with_perplexity) {
  Json segments = Json::array();
  for (const auto& segment : result.original.segments) {
    segments.push_back(TokensJson(segment));
  }
  Json steps = Json::array();
  for (const auto& step : result.steps) steps.push_back(StepJson(step));
  Json spans = Json::array();
  for (const auto& span : result.committed_spans) spans.push_back(SpanJson(span));

  Json record = {
      {"id", result.original.id},
      {"status", AttackStatusName(result.status)},
      {"gold", result.original.gold.id},
      {"segments", segments},
      {"attack_segment", result.original.attack_segment},
      {"perturbed",
       result.perturbed ? TokensJson(*result.perturbed) : Json(nullptr)},
      {"original_gold_prob", result.original_gold_prob},
      {"original_label", result.original_label},
      {"num_candidates", result.num_candidates},
      {"steps", steps},
      {"committed_spans", spans},
      {"dis", OptionalJson(summary.dis)},
      {"bleu", OptionalJson(summary.bleu)},
  };
  if (with_perplexity) record["ppl"] = OptionalJson(summary.ppl);
  if (!result.message.empty()) record["message"] = result.message;
  return record;
}

ResultSummary SummaryFromJson(const Json& record) {
  try {
    ResultSummary summary;
    summary.status = AttackStatusFromName(record.at("status").get<std::string>());
    for (const auto& step : record.at("steps")) {
      if (!step.at("chosen").is_null()) {
        summary.committed_tags.push_back(step.at("tag").get<std::string>());
      }
    }
    if (summary.status == AttackStatus::kSuccess &&
        !record.at("perturbed").is_null()) {
      const auto index = record.at("attack_segment").get<std::size_t>();
      const TokenSequence original = TokensFrom(record.at("segments").at(index));
      const TokenSequence perturbed = TokensFrom(record.at("perturbed"));
      summary.dis = NormalizedEditDistance(original, perturbed);
      summary.bleu = Bleu(original, perturbed);
      if (record.contains("ppl") && !record["ppl"].is_null()) {
        summary.ppl = record["ppl"].get<double>();
      }
    }
    return summary;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("result record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError, std::string("result record: ") + e.what());
  }
}

std::vector<ResultSummary> ReadResults(const std::filesystem::path& path,
                                       bool* with_perplexity) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  std::vector<ResultSummary> out;
  bool saw_ppl = false;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json record = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    try {
      if (record.is_discarded()) {
        throw Error(ErrorCode::kParseError, "not valid JSON");
      }
      out.push_back(SummaryFromJson(record));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, path.string() + " line " +
                                              std::to_string(line_number) +
                                              ": " + e.detail());
    }
    saw_ppl = saw_ppl || record.contains("ppl");
  }
  if (with_perplexity) *with_perplexity = saw_ppl;
  return out;
}

void WriteArtifacts(const std::filesystem::path& directory,
                    const CampaignOutput& output) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream results(directory / "results.jsonl", std::ios::trunc);
    for (std::size_t i = 0; i < output.results.size(); ++i) {
      results << ResultToJson(output.results[i], output.summaries[i],
                              output.report.with_perplexity)
                     .dump()
              << "\n";
    }
    if (!results) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot write " + (directory / "results.jsonl").string());
    }
  }
  std::ofstream report(directory / "report.json", std::ios::trunc);
  report << ReportToJson(output.report).dump(2) << "\n";
  if (!report) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot write " + (directory / "report.json").string());
  }
}

}  // namespace phrase_attack::cli
