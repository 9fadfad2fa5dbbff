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

#include "phrase_attack/cli/app.hpp"

#include <csignal>
#include <fstream>
#include <map>

#include "CLI11.hpp"
#include "phrase_attack/cli/dataset.hpp"
#include "phrase_attack/error.hpp"
#include "phrase_attack/gateway/mock.hpp"
#include "phrase_attack/gateway/server.hpp"

namespace phrase_attack::cli {
namespace {

using Json = nlohmann::json;

std::atomic<bool> g_interrupted{false};

extern "C" void OnInterrupt(int) { g_interrupted.store(true); }

// Restores the previous SIGINT handler on scope exit.
class InterruptGuard {
 public:
  InterruptGuard() : previous_(std::signal(SIGINT, OnInterrupt)) {
    g_interrupted.store(false);
  }
  ~InterruptGuard() { std::signal(SIGINT, previous_); }

 private:
  void (*previous_)(int);
};

void PrintReport(const RunReport& report, const std::string& format,
                 std::ostream& out) {
  if (format == "json") {
    out << ReportToJson(report).dump(2) << "\n";
  } else {
    out << FormatReportTable(report);
  }
}

// Fills options not given on the command line from a flat key = value file
// (TOML or INI syntax). CLI11 only reads config files on the root app, so the
// items are fed to the subcommand's options by hand.
void ApplyConfigFile(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open config " + path);
  for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty()) {
      throw Error(ErrorCode::kParseError,
                  "config " + path + ": sections are not supported (" +
                      item.fullname() + ")");
    }
    CLI::Option* option = cmd.get_option_no_throw("--" + item.name);
    if (option == nullptr || item.name == "config") {
      throw Error(ErrorCode::kParseError,
                  "config " + path + ": unknown key " + item.name);
    }
    if (option->count() > 0) continue;  // the flag wins
    option->add_result(item.inputs);
    option->run_callback();
  }
}

void AddAttackOptions(CLI::App& cmd, RunConfig& config,
                      std::string& config_file, std::vector<std::string>& tags,
                      std::string& cache_dir, std::string& mock_models,
                      std::int64_t& time_budget_ms, bool& no_cache,
                      bool& whole_text) {
  cmd.add_option("--config", config_file,
                 "File of key = value pairs named after the long flags; "
                 "flags override it");
  cmd.add_option("--dataset", config.dataset, "Line-delimited JSON dataset");
  const std::map<std::string, TreeSource> tree_sources = {
      {"inline", TreeSource::kInline}, {"endpoint", TreeSource::kEndpoint}};
  cmd.add_option("--tree-source", config.tree_source,
                 "Where parse trees come from")
      ->transform(CLI::CheckedTransformer(tree_sources, CLI::ignore_case))
      ->option_text("inline|endpoint [inline]");
  cmd.add_option("--endpoint", config.endpoints.base,
                 "Base URL serving every role (http://host:port)");
  cmd.add_option("--classify-url", config.endpoints.classify);
  cmd.add_option("--infill-url", config.endpoints.infill);
  cmd.add_option("--cmlm-url", config.endpoints.cmlm);
  cmd.add_option("--parse-url", config.endpoints.parse);
  cmd.add_option("--perplexity-url", config.endpoints.perplexity,
                 "Enables the PPL metric");
  cmd.add_option("--mock-models", mock_models,
                 "Run against in-process mock models from this JSON file");
  cmd.add_option("--labels", config.labels,
                 "Label ids in victim order (default: from the classify "
                 "health check)")
      ->delimiter(',');
  cmd.add_option("--limit", config.limit, "Examples sampled from the dataset")
      ->capture_default_str();
  cmd.add_option("--workers", config.workers)->capture_default_str();
  cmd.add_option("--cache-dir", cache_dir,
                 "Persistent response cache (enables resume)");
  cmd.add_flag("--no-cache", no_cache, "Disable the response cache");
  cmd.add_option("--output-dir", config.output_dir)->capture_default_str();
  cmd.add_option("--seed", config.seed)->capture_default_str();

  AttackConfig& a = config.attack;
  cmd.add_option("--depth-d", a.max_depth, "Max candidate subtree depth")
      ->capture_default_str();
  cmd.add_option("--len-incr-l", a.max_length_increment,
                 "Max fill length over the phrase length")
      ->capture_default_str();
  cmd.add_option("--max-steps-T", a.max_steps, "Max search iterations")
      ->capture_default_str();
  cmd.add_option("--delta", a.delta, "Likelihood-ratio threshold")
      ->capture_default_str();
  cmd.add_option("--num-fills-N", a.num_fills, "Fills requested per phrase")
      ->capture_default_str();
  cmd.add_option("--top-k", a.top_k, "Infiller top-k width")
      ->capture_default_str();
  cmd.add_option("--mask-token", a.mask_token)->capture_default_str();
  cmd.add_option("--tags", tags, "Constituent tag whitelist")->delimiter(',');
  cmd.add_option("--time-budget", time_budget_ms,
                 "Per-example wall-clock budget in milliseconds");
  cmd.add_flag("--whole-text-likelihood", whole_text,
               "Score fills against the whole text, not their sentence");
}

int RunScore(const std::string& results_path, const std::string& output,
             const std::string& format, std::ostream& out) {
  bool with_perplexity = false;
  const auto summaries = ReadResults(results_path, &with_perplexity);
  const RunReport report = BuildReport(summaries, with_perplexity);
  if (!output.empty()) {
    std::ofstream file(output, std::ios::trunc);
    file << ReportToJson(report).dump(2) << "\n";
    if (!file) throw Error(ErrorCode::kInvalidArgument, "cannot write " + output);
  }
  PrintReport(report, format, out);
  return kExitOk;
}

int RunReportCommand(const std::string& path, const std::string& format,
                     std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path);
  const Json json = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded()) {
    throw Error(ErrorCode::kParseError, path + " is not valid JSON");
  }
  PrintReport(ReportFromJson(json), format, out);
  return kExitOk;
}

int RunMockServe(const std::string& models, const std::string& host, int port,
                 std::ostream& out) {
  auto router = std::make_shared<ProtocolRouter>(mock::LoadBackends(models));
  ProtocolHttpServer server(router);
  const int bound = server.Bind(host, port);
  out << "listening on http://" << host << ":" << bound << std::endl;
  server.Listen();
  return kExitOk;
}

}  // namespace

int RunAttackCommand(RunConfig config, std::ostream& out, std::ostream& err,
                     const std::atomic<bool>* stop) {
  config.attack.seed = config.seed;
  if (config.dataset.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--dataset is required");
  }
  const Runtime runtime = BuildRuntime(config);
  std::vector<std::string> warnings;
  std::vector<LabeledExample> examples = LoadDataset(
      config.dataset, runtime.backends.labels, config.limit, config.seed,
      &warnings);
  for (const auto& warning : warnings) err << "warning: " << warning << "\n";
  if (config.tree_source == TreeSource::kEndpoint) {
    for (auto& example : examples) {
      example.trees.assign(example.segments.size(), std::nullopt);
    }
  }

  const CampaignOutput output = RunCampaign(
      examples, runtime.backends, config.attack, config.workers, stop);
  WriteArtifacts(config.output_dir, output);
  out << FormatReportTable(output.report);
  if (output.interrupted) {
    err << "interrupted: wrote " << output.results.size() << " of "
        << examples.size() << " results to " << config.output_dir.string()
        << "\n";
    return kExitInterrupted;
  }
  return kExitOk;
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Phrase-level adversarial attacks on text classifiers",
               "phrase-attack");
  app.require_subcommand(1);

  RunConfig config;
  std::vector<std::string> tags;
  std::string config_file, cache_dir, mock_models;
  std::int64_t time_budget_ms = 0;
  bool no_cache = false;
  bool whole_text = false;
  CLI::App* attack = app.add_subcommand("attack", "Run an attack campaign");
  AddAttackOptions(*attack, config, config_file, tags, cache_dir, mock_models,
                   time_budget_ms, no_cache, whole_text);

  std::string results_path, score_output, format = "table";
  CLI::App* score =
      app.add_subcommand("score", "Recompute metrics from a results file");
  score->add_option("--results", results_path, "results.jsonl")->required();
  score->add_option("--output", score_output, "Also write report JSON here");
  score->add_option("--format", format)
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  std::string report_path;
  CLI::App* report = app.add_subcommand("report", "Print a report file");
  report->add_option("--report", report_path, "report.json")->required();
  report->add_option("--format", format)
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  std::string models_path, host = "127.0.0.1";
  int port = 8080;
  CLI::App* serve =
      app.add_subcommand("mock-serve", "Serve mock models over the protocol");
  serve->add_option("--models", models_path, "Mock model JSON")->required();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port, "0 picks a free port")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (attack->parsed() && !config_file.empty()) {
      ApplyConfigFile(*attack, config_file);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (attack->parsed()) {
      if (!tags.empty()) {
        config.attack.whitelist = TagWhitelist(tags.begin(), tags.end());
      }
      if (!cache_dir.empty()) config.cache_dir = cache_dir;
      if (!mock_models.empty()) config.mock_models = mock_models;
      if (time_budget_ms > 0) {
        config.attack.time_budget = std::chrono::milliseconds(time_budget_ms);
      }
      config.cache_enabled = !no_cache;
      config.attack.sentence_local_likelihood = !whole_text;
      InterruptGuard guard;
      return RunAttackCommand(std::move(config), out, err, &g_interrupted);
    }
    if (score->parsed()) return RunScore(results_path, score_output, format, out);
    if (report->parsed()) return RunReportCommand(report_path, format, out);
    if (serve->parsed()) return RunMockServe(models_path, host, port, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace phrase_attack::cli
