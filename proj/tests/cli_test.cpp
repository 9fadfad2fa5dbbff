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


#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "httplib.h"
#include "phrase_attack/cli/app.hpp"
#include "phrase_attack/cli/campaign.hpp"
#include "phrase_attack/cli/dataset.hpp"
#include "phrase_attack/gateway/mock.hpp"
#include "phrase_attack/gateway/server.hpp"
#include "test_util.hpp"

namespace phrase_attack::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using phrase_attack::testing::CodeOf;
using phrase_attack::testing::FixturePath;

const LabelSet kLabels = LabelSet::FromIds({"neg", "pos"});

// Fresh directory under the system temp dir, removed afterwards.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("phrase_attack_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream(path) << content;
}

std::string TenRecords() {
  std::string out;
  for (int i = 0; i < 10; ++i) {
    out += Json{{"id", "e" + std::to_string(i)},
                {"text", "word" + std::to_string(i) + " ."},
                {"label", i % 2 ? "pos" : "neg"}}
               .dump() +
           "\n";
  }
  return out;
}

std::vector<std::string> Ids(const std::vector<LabeledExample>& examples) {
  std::vector<std::string> ids;
  for (const auto& e : examples) ids.push_back(e.id);
  return ids;
}

int Cli(std::vector<std::string> args, std::string* out = nullptr,
        std::string* err = nullptr) {
  args.insert(args.begin(), "phrase-attack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

TEST(SampleIndicesTest, UniformWithoutReplacement) {
  const auto a = SampleIndices(100, 10, 5);
  EXPECT_EQ(a, SampleIndices(100, 10, 5));
  EXPECT_EQ(a.size(), 10u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 10u);
  EXPECT_LT(a.back(), 100u);
  EXPECT_EQ(SampleIndices(3, 10, 5), (std::vector<std::size_t>{0, 1, 2}));
  // Each index is drawn about equally often.
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (auto i : SampleIndices(10, 3, seed)) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h, 600, 90);
}

TEST(DatasetTest, SeededSampleKeepsFileOrder) {
  TempDir dir("dataset");
  WriteFile(dir / "data.jsonl", TenRecords());
  std::vector<std::string> warnings;
  const auto a = LoadDataset(dir / "data.jsonl", kLabels, 3, 7, &warnings);
  const auto b = LoadDataset(dir / "data.jsonl", kLabels, 3, 7, &warnings);
  EXPECT_EQ(Ids(a), Ids(b));
  EXPECT_EQ(a.size(), 3u);
  EXPECT_TRUE(warnings.empty());
  const auto indices = SampleIndices(10, 3, 7);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].id, "e" + std::to_string(indices[i]));
  }
  const auto all = LoadDataset(dir / "data.jsonl", kLabels, 50, 7, &warnings);
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(DatasetTest, RecordSchema) {
  const auto pair = ExampleFromJson(
      Json::parse(R"j({"id": 4, "premise": "a b c", "hypothesis": "d e",
                      "label": "pos", "premise_tree": "(S (X a) (X b) (X c))"})j"),
      kLabels, 1);
  EXPECT_EQ(pair.id, "4");
  ASSERT_EQ(pair.segments.size(), 2u);
  EXPECT_EQ(pair.attack_segment, 0u);
  ASSERT_EQ(pair.trees.size(), 2u);
  EXPECT_TRUE(pair.trees[0]);
  EXPECT_FALSE(pair.trees[1]);
  EXPECT_EQ(pair.gold.id, "pos");

  try {
    ExampleFromJson(Json::parse(R"({"id": "x", "text": "a"})"), kLabels, 4);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
  EXPECT_EQ(CodeOf([] {
              ExampleFromJson(
                  Json::parse(R"({"id": "x", "text": "a", "label": "meh"})"),
                  kLabels, 1);
            }),
            ErrorCode::kUnknownLabel);
  EXPECT_EQ(CodeOf([] {
              ExampleFromJson(
                  Json::parse(R"({"id": "x", "text": "  ", "label": "pos"})"),
                  kLabels, 1);
            }),
            ErrorCode::kParseError);
}

TEST(DatasetTest, BadLineNamesItsNumber) {
  TempDir dir("bad_dataset");
  WriteFile(dir / "data.jsonl",
            R"({"id": "a", "text": "x", "label": "pos"})"
            "\n\n{oops\n");
  try {
    LoadDataset(dir / "data.jsonl", kLabels, 10, 0, nullptr);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(RunConfigTest, Validate) {
  RunConfig config;
  EXPECT_EQ(CodeOf([&] { config.Validate(); }), ErrorCode::kInvalidArgument);
  config.endpoints.base = "http://localhost:8080";
  EXPECT_NO_THROW(config.Validate());
  config.endpoints.cmlm = "localhost:9";
  EXPECT_EQ(CodeOf([&] { config.Validate(); }), ErrorCode::kInvalidArgument);
  config.endpoints.cmlm.clear();
  config.workers = 0;
  EXPECT_EQ(CodeOf([&] { config.Validate(); }), ErrorCode::kInvalidArgument);
  RunConfig mocks;
  mocks.mock_models = FixturePath("mock_models.json");
  EXPECT_NO_THROW(mocks.Validate());
}

RunConfig FixtureConfig() {
  RunConfig config;
  config.dataset = FixturePath("reviews.jsonl");
  config.mock_models = FixturePath("mock_models.json");
  return config;
}

std::string ResultsDump(const CampaignOutput& output) {
  std::string out;
  for (std::size_t i = 0; i < output.results.size(); ++i) {
    out += ResultToJson(output.results[i], output.summaries[i], true).dump() + "\n";
  }
  return out;
}

TEST(CampaignTest, FixtureOutcome) {
  const RunConfig config = FixtureConfig();
  const Runtime runtime = BuildRuntime(config);
  const auto examples =
      LoadDataset(config.dataset, runtime.backends.labels, 1000, 0, nullptr);
  ASSERT_EQ(examples.size(), 20u);
  const auto output = RunCampaign(examples, runtime.backends, config.attack, 1);
  EXPECT_EQ(output.report.counts, (StatusCounts{14, 3, 3, 0}));
  EXPECT_NEAR(*output.report.asr, 14.0 / 17, 1e-12);
  EXPECT_FALSE(output.interrupted);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    EXPECT_EQ(output.results[i].original.id, examples[i].id);
  }
}

TEST(CampaignTest, WorkerCountDoesNotChangeOutput) {
  const RunConfig config = FixtureConfig();
  const Runtime one = BuildRuntime(config);
  const Runtime eight = BuildRuntime(config);
  const auto examples =
      LoadDataset(config.dataset, one.backends.labels, 1000, 0, nullptr);
  const auto a = RunCampaign(examples, one.backends, config.attack, 1);
  const auto b = RunCampaign(examples, eight.backends, config.attack, 8);
  EXPECT_EQ(ResultsDump(a), ResultsDump(b));
}

TEST(CampaignTest, StopFlagKeepsFinishedPrefix) {
  const RunConfig config = FixtureConfig();
  const Runtime runtime = BuildRuntime(config);
  const auto examples =
      LoadDataset(config.dataset, runtime.backends.labels, 1000, 0, nullptr);
  std::atomic<bool> stop{true};
  const auto output =
      RunCampaign(examples, runtime.backends, config.attack, 4, &stop);
  EXPECT_TRUE(output.interrupted);
  EXPECT_TRUE(output.results.empty());
}

TEST(CampaignTest, ResultRecordLayout) {
  const RunConfig config = FixtureConfig();
  const Runtime runtime = BuildRuntime(config);
  auto examples =
      LoadDataset(config.dataset, runtime.backends.labels, 1000, 0, nullptr);
  examples.resize(1);  // r01: "the food was great ." pos
  const auto output = RunCampaign(examples, runtime.backends, config.attack, 1);
  const Json record = ResultToJson(output.results[0], output.summaries[0], true);
  for (const char* key :
       {"id", "status", "gold", "segments", "attack_segment", "perturbed",
        "original_gold_prob", "original_label", "num_candidates",
        "committed_spans", "dis", "bleu", "ppl", "steps"}) {
    EXPECT_TRUE(record.contains(key)) << key;
  }
  EXPECT_EQ(record["status"], "success");
  ASSERT_FALSE(record["steps"].empty());
  for (const char* key :
       {"step", "tag", "span", "phrase", "depth", "importance", "fills_generated",
        "fills_surviving_filter", "chosen", "victim_prob_after",
        "victim_label_after"}) {
    EXPECT_TRUE(record["steps"][0].contains(key)) << key;
  }
  const ResultSummary back = SummaryFromJson(record);
  EXPECT_EQ(back.status, AttackStatus::kSuccess);
  EXPECT_NEAR(*back.dis, *output.summaries[0].dis, 1e-12);
  EXPECT_NEAR(*back.bleu, *output.summaries[0].bleu, 1e-12);
  EXPECT_EQ(back.committed_tags, output.summaries[0].committed_tags);
  EXPECT_FALSE(ResultToJson(output.results[0], output.summaries[0], false)
                   .contains("ppl"));
}

TEST(CliTest, AttackScoreAndReportAgree) {
  TempDir dir("cli");
  std::string attack_out, err;
  ASSERT_EQ(Cli({"attack", "--dataset", FixturePath("reviews.jsonl").string(),
                 "--mock-models", FixturePath("mock_models.json").string(),
                 "--output-dir", dir.path().string()},
                &attack_out, &err),
            kExitOk)
      << err;
  EXPECT_EQ(attack_out,
            "ASR     DIS     BLEU    PPL\n"
            "82.4    0.47    0.31    259.1\n"
            "success 14  failed 3  skipped 3  errored 0\n"
            "tags  VP 94.1%  WHNP 5.9%\n");
  ASSERT_TRUE(fs::exists(dir / "results.jsonl"));
  ASSERT_TRUE(fs::exists(dir / "report.json"));

  std::string score_out;
  ASSERT_EQ(Cli({"score", "--results", (dir / "results.jsonl").string(),
                 "--output", (dir / "rescored.json").string()},
                &score_out, &err),
            kExitOk)
      << err;
  EXPECT_EQ(score_out, attack_out);
  EXPECT_EQ(Json::parse(ReadFile(dir / "rescored.json")),
            Json::parse(ReadFile(dir / "report.json")));

  std::string report_out;
  ASSERT_EQ(Cli({"report", "--report", (dir / "report.json").string()},
                &report_out, &err),
            kExitOk);
  EXPECT_EQ(report_out, attack_out);
  ASSERT_EQ(Cli({"report", "--report", (dir / "report.json").string(),
                 "--format", "json"},
                &report_out, &err),
            kExitOk);
  EXPECT_EQ(Json::parse(report_out)["counts"]["success"], 14);
}

TEST(CliTest, RepeatedRunsAreByteIdentical) {
  TempDir a("cli_a"), b("cli_b");
  const std::string dataset = FixturePath("reviews.jsonl").string();
  const std::string models = FixturePath("mock_models.json").string();
  ASSERT_EQ(Cli({"attack", "--dataset", dataset, "--mock-models", models,
                 "--output-dir", a.path().string(), "--seed", "3"}),
            kExitOk);
  ASSERT_EQ(Cli({"attack", "--dataset", dataset, "--mock-models", models,
                 "--output-dir", b.path().string(), "--seed", "3", "--workers",
                 "8"}),
            kExitOk);
  EXPECT_EQ(ReadFile(a / "results.jsonl"), ReadFile(b / "results.jsonl"));
  EXPECT_EQ(ReadFile(a / "report.json"), ReadFile(b / "report.json"));
}

TEST(CliTest, CacheDirReplaysResponses) {
  TempDir dir("cli_cache");
  const std::vector<std::string> base = {
      "attack", "--dataset", FixturePath("reviews.jsonl").string(),
      "--mock-models", FixturePath("mock_models.json").string(),
      "--cache-dir", (dir / "cache").string()};
  auto with_output = [&](const std::string& name) {
    auto args = base;
    args.push_back("--output-dir");
    args.push_back((dir / name).string());
    return args;
  };
  ASSERT_EQ(Cli(with_output("first")), kExitOk);
  const std::string journal = ReadFile(dir / "cache" / "responses.jsonl");
  EXPECT_FALSE(journal.empty());
  ASSERT_EQ(Cli(with_output("second")), kExitOk);
  // Everything was served from the cache: nothing new was journaled.
  EXPECT_EQ(ReadFile(dir / "cache" / "responses.jsonl"), journal);
  EXPECT_EQ(ReadFile(dir / "first" / "results.jsonl"),
            ReadFile(dir / "second" / "results.jsonl"));
}

TEST(CliTest, InterruptWritesPartialResults) {
  TempDir dir("cli_interrupt");
  RunConfig config = FixtureConfig();
  config.output_dir = dir.path();
  std::atomic<bool> stop{true};
  std::ostringstream out, err;
  EXPECT_EQ(RunAttackCommand(config, out, err, &stop), kExitInterrupted);
  EXPECT_NE(err.str().find("interrupted"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "results.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(CliTest, ConfigFileWithFlagOverrides) {
  TempDir dir("cli_config");
  WriteFile(dir / "run.toml",
            "dataset = \"" + FixturePath("reviews.jsonl").string() + "\"\n" +
                "mock-models = \"" + FixturePath("mock_models.json").string() +
                "\"\n" + "output-dir = \"" + dir.path().string() + "\"\n" +
                "limit = 5\n" + "max-steps-T = 11\n");
  std::string err;
  ASSERT_EQ(Cli({"attack", "--config", (dir / "run.toml").string(),
                 "--max-steps-T", "1"},
                nullptr, &err),
            kExitOk)
      << err;
  std::ifstream results(dir / "results.jsonl");
  std::string line;
  int records = 0;
  while (std::getline(results, line)) {
    ++records;
    EXPECT_LE(Json::parse(line)["steps"].size(), 1u);
  }
  EXPECT_EQ(records, 5);
}

TEST(CliTest, UsageAndRuntimeErrors) {
  std::string out, err;
  EXPECT_EQ(Cli({}, &out, &err), kExitUsage);
  EXPECT_EQ(Cli({"attack", "--tree-source", "sideways"}, &out, &err), kExitUsage);
  EXPECT_EQ(Cli({"score"}, &out, &err), kExitUsage);
  EXPECT_EQ(Cli({"attack", "--mock-models",
                 FixturePath("mock_models.json").string()},
                &out, &err),
            kExitError);
  EXPECT_NE(err.find("error: "), std::string::npos);
  EXPECT_EQ(Cli({"attack", "--dataset", "/nonexistent.jsonl", "--mock-models",
                 FixturePath("mock_models.json").string()},
                &out, &err),
            kExitError);
  EXPECT_EQ(Cli({"score", "--results", "/nonexistent.jsonl"}, &out, &err),
            kExitError);
}

TEST(CliTest, UnhealthyEndpointFailsFast) {
  const int port = phrase_attack::testing::ClosedPort();
  std::string err;
  EXPECT_EQ(Cli({"attack", "--dataset", FixturePath("reviews.jsonl").string(),
                 "--endpoint", "http://127.0.0.1:" + std::to_string(port)},
                nullptr, &err),
            kExitError);
  EXPECT_NE(err.find("BackendUnavailable"), std::string::npos) << err;
}

TEST(CliTest, RemoteEndpointsMatchInProcessMocks) {
  ProtocolHttpServer server(std::make_shared<ProtocolRouter>(
      mock::LoadBackends(FixturePath("mock_models.json"))));
  const int port = server.Bind("127.0.0.1", 0);
  server.Start();
  const std::string url = "http://127.0.0.1:" + std::to_string(port);
  TempDir local("cli_local"), remote("cli_remote"), parsed("cli_parsed");
  const std::string dataset = FixturePath("reviews.jsonl").string();
  ASSERT_EQ(Cli({"attack", "--dataset", dataset, "--mock-models",
                 FixturePath("mock_models.json").string(), "--output-dir",
                 local.path().string()}),
            kExitOk);
  std::string err;
  ASSERT_EQ(Cli({"attack", "--dataset", dataset, "--endpoint", url,
                 "--perplexity-url", url, "--workers", "4", "--output-dir",
                 remote.path().string()},
                nullptr, &err),
            kExitOk)
      << err;
  EXPECT_EQ(ReadFile(local / "results.jsonl"), ReadFile(remote / "results.jsonl"));

  // Endpoint trees come from the chunk parser, so only completion is checked.
  ASSERT_EQ(Cli({"attack", "--dataset", dataset, "--endpoint", url,
                 "--tree-source", "endpoint", "--output-dir",
                 parsed.path().string()},
                nullptr, &err),
            kExitOk)
      << err;
  const auto summaries = ReadResults(parsed / "results.jsonl");
  EXPECT_EQ(summaries.size(), 20u);
  for (const auto& s : summaries) EXPECT_NE(s.status, AttackStatus::kErrored);
  server.Stop();
}

}  // namespace
}  // namespace phrase_attack::cli
