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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Oracles here are written independently of the
// library code they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "phrase_attack/attack/attack.hpp"
#include "phrase_attack/cli/app.hpp"
#include "phrase_attack/cli/campaign.hpp"
#include "phrase_attack/cli/dataset.hpp"
#include "phrase_attack/gateway/mock.hpp"
#include "phrase_attack/metrics.hpp"

namespace phrase_attack {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failing reason.
void Require(Outcome& o, bool condition, const std::string& reason) {
  if (!condition && o.pass) {
    o.pass = false;
    o.detail = reason;
  }
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

fs::path Fixture(const std::string& name) {
  return fs::path(PHRASE_ATTACK_FIXTURE_DIR) / name;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TokenSequence RandomTokens(std::mt19937_64& rng, std::size_t max_len,
                           int alphabet, bool allow_empty = true) {
  const std::size_t min_len = allow_empty ? 0 : 1;
  const std::size_t n = min_len + rng() % (max_len - min_len + 1);
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < n; ++i) {
    tokens.push_back("w" + std::to_string(rng() % alphabet));
  }
  return TokenSequence(tokens);
}

// Top-down recursion over suffixes with a memo table.
std::size_t OracleEditDistance(const std::vector<Token>& a,
                               const std::vector<Token>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> d =
      [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    const auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = (a[i] == b[j] ? 0 : 1) + d(i + 1, j + 1);
    best = std::min(best, 1 + d(i + 1, j));
    best = std::min(best, 1 + d(i, j + 1));
    memo[key] = best;
    return best;
  };
  return d(0, 0);
}

Outcome EditDistanceOracle() {
  Outcome o;
  std::mt19937_64 rng(20260101);
  const auto started = Clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Small alphabets make long shared runs likely.
    const int alphabet = 2 + static_cast<int>(rng() % 6);
    const TokenSequence a = RandomTokens(rng, 30, alphabet);
    const TokenSequence b = RandomTokens(rng, 30, alphabet);
    if (EditDistance(a, b) != OracleEditDistance(a.tokens(), b.tokens())) {
      ++mismatches;
    }
  }
  const double elapsed = Seconds(started);
  Require(o, mismatches == 0, std::to_string(mismatches) + " of 1000 differ");
  Require(o, elapsed < 5.0, Format("took %.2f s", elapsed));
  if (o.pass) {
    o.detail = "1000 pairs, len <= 30, exact, " + Format("%.2f s < 5 s", elapsed);
  }
  return o;
}

Outcome GreedyStepOptimality() {
  Outcome o;
  std::mt19937_64 rng(7);
  const LabelSet labels = LabelSet::FromIds({"neg", "pos"});
  constexpr int kVocab = 10;
  int scenarios = 0;
  for (; scenarios < 300 && o.pass; ++scenarios) {
    // Integer weights keep logits exact.
    mock::KeywordVictim::Weights weights;
    std::vector<int> margin(kVocab);  // w(neg) - w(pos) per word
    for (int w = 0; w < kVocab; ++w) {
      const int neg = static_cast<int>(rng() % 7) - 3;
      const int pos = static_cast<int>(rng() % 7) - 3;
      weights["w" + std::to_string(w)] = {{"neg", neg}, {"pos", pos}};
      margin[w] = neg - pos;
    }
    mock::KeywordVictim victim(labels, weights);
    const std::string gold = rng() % 2 ? "neg" : "pos";
    const TokenSequence text = RandomTokens(rng, 12, kVocab, false);
    const std::size_t start = rng() % text.size();
    const std::size_t end = start + rng() % (text.size() - start);
    const Span span{start, end};

    std::vector<FillCandidate> fills(1 + rng() % 20);
    for (std::size_t i = 0; i < fills.size(); ++i) {
      fills[i].fill = RandomTokens(rng, 4, kVocab, false);
      fills[i].generation_index = i;
    }
    ScoreEffectiveness(victim, {{text}, 0}, span, gold, fills);
    const std::size_t chosen = SelectBest(fills);

    // Exhaustive: P(gold) is increasing in the gold margin, so minimize the
    // integer margin of the perturbed text; earliest wins ties.
    std::size_t expected = 0;
    long best = std::numeric_limits<long>::max();
    for (std::size_t i = 0; i < fills.size(); ++i) {
      std::vector<Token> perturbed(text.tokens().begin(),
                                   text.tokens().begin() + start);
      perturbed.insert(perturbed.end(), fills[i].fill.tokens().begin(),
                       fills[i].fill.tokens().end());
      perturbed.insert(perturbed.end(), text.tokens().begin() + end + 1,
                       text.tokens().end());
      long neg_margin = 0;
      for (const auto& token : perturbed) neg_margin += margin[std::stoi(token.substr(1))];
      const long gold_margin = gold == "neg" ? neg_margin : -neg_margin;
      if (gold_margin < best) {
        best = gold_margin;
        expected = i;
      }
    }
    Require(o, chosen == expected,
            "scenario " + std::to_string(scenarios) + ": chose " +
                std::to_string(chosen) + ", argmin is " +
                std::to_string(expected));
  }
  if (o.pass) o.detail = std::to_string(scenarios) + " scenarios, <= 20 fills, exact";
  return o;
}

Outcome FilterMonotonicity() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> log_r(-5.0, 5.0);
  for (int draw = 0; draw < 1000 && o.pass; ++draw) {
    std::vector<FillCandidate> fills(rng() % 30);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < fills.size(); ++i) {
      fills[i].generation_index = i;
      fills[i].log_ratio = log_r(rng);
      ratios.push_back(std::exp(fills[i].log_ratio));
    }
    // Thresholds sometimes sit exactly on a ratio.
    auto threshold = [&] {
      if (!ratios.empty() && rng() % 3 == 0) return ratios[rng() % ratios.size()];
      return std::exp(log_r(rng));
    };
    double d1 = threshold(), d2 = threshold();
    if (d1 > d2) std::swap(d1, d2);
    std::set<std::size_t> s1, s2;
    for (const auto& f : LabelPreservationFilter(fills, d1)) s1.insert(f.generation_index);
    for (const auto& f : LabelPreservationFilter(fills, d2)) s2.insert(f.generation_index);
    Require(o, std::includes(s1.begin(), s1.end(), s2.begin(), s2.end()),
            "draw " + std::to_string(draw) + " is not monotone");
  }
  if (o.pass) o.detail = "1000 draws, exact";
  return o;
}

Outcome Symmetry() {
  Outcome o;
  std::mt19937_64 rng(5);
  double worst = 0.0;
  std::size_t ratios = 0;
  for (const auto& ids : std::vector<std::vector<std::string>>{
           {"neg", "pos"}, {"entailment", "neutral", "contradiction"}}) {
    const LabelSet labels = LabelSet::FromIds(ids);
    std::map<std::string, double> table;
    for (int w = 0; w < 10; ++w) {
      table["w" + std::to_string(w)] = 0.01 + 0.09 * static_cast<double>(w);
    }
    mock::UnigramCmlm::Tables tables;
    for (const auto& id : ids) tables[id] = table;
    mock::UnigramCmlm cmlm(labels, tables, 1e-5);
    for (int trial = 0; trial < 200; ++trial) {
      const TokenSequence text = RandomTokens(rng, 15, 14, false);
      const std::size_t start = rng() % text.size();
      const Span span{start, start + rng() % (text.size() - start)};
      std::vector<FillCandidate> fills(1 + rng() % 10);
      for (auto& f : fills) f.fill = RandomTokens(rng, 5, 14, false);
      const std::string gold = ids[rng() % ids.size()];
      ScoreLabelPreservation(cmlm, {{text}, 0}, span, labels, gold, fills,
                             rng() % 2 == 0);
      for (const auto& f : fills) {
        worst = std::max(worst, std::abs(f.ratio() - 1.0));
        ++ratios;
      }
      Require(o, LabelPreservationFilter(fills, 1.0).size() == fills.size(),
              "delta = 1 dropped a fill");
    }
  }
  Require(o, worst <= 1e-9, "max |R - 1| = " + Format("%.3g", worst));
  if (o.pass) {
    o.detail = std::to_string(ratios) + " ratios, max |R - 1| = " +
               Format("%.1g", worst) + " <= 1e-9, delta = 1 keeps all";
  }
  return o;
}

// Replays a trace from the original text.
TokenSequence ReplayTrace(const AttackResult& result) {
  TokenSequence text = result.original.AttackText();
  for (const auto& step : result.steps) {
    if (step.chosen) text = ApplyFill(text, step.target.span, step.chosen->fill);
  }
  return text;
}

Outcome AlgorithmConformance() {
  Outcome o;
  cli::RunConfig config;
  config.dataset = Fixture("reviews.jsonl");
  config.mock_models = Fixture("mock_models.json");
  const cli::Runtime runtime = cli::BuildRuntime(config);
  const auto examples = cli::LoadDataset(config.dataset, runtime.backends.labels,
                                         1000, 0, nullptr);
  const auto output =
      cli::RunCampaign(examples, runtime.backends, config.attack, 1);
  // The victim used for checking talks to the mock directly, not through
  // the protocol and cache.
  const BackendSet direct = mock::LoadBackends(*config.mock_models);

  std::size_t attacked = 0;
  for (const auto& r : output.results) {
    const std::string& id = r.original.id;
    Require(o, r.status != AttackStatus::kErrored, id + " errored: " + r.message);
    if (r.status != AttackStatus::kSuccess && r.status != AttackStatus::kFailed) {
      continue;
    }
    ++attacked;
    for (std::size_t i = 1; i < r.steps.size(); ++i) {
      Require(o, *r.steps[i].target.importance <= *r.steps[i - 1].target.importance,
              id + ": importance increases at step " + std::to_string(i + 1));
    }
    std::size_t commits = 0;
    for (const auto& step : r.steps) commits += step.chosen ? 1 : 0;
    Require(o, commits <= 11 && r.steps.size() <= 11, id + ": more than T steps");
    Require(o, commits == r.committed_spans.size(), id + ": commit count mismatch");
    for (std::size_t i = 0; i < r.committed_spans.size(); ++i) {
      for (std::size_t j = i + 1; j < r.committed_spans.size(); ++j) {
        const Span& a = r.committed_spans[i];
        const Span& b = r.committed_spans[j];
        Require(o, a.end < b.start || b.end < a.start,
                id + ": committed spans overlap");
      }
    }
    const TokenSequence final_text = ReplayTrace(r);
    if (r.perturbed) Require(o, *r.perturbed == final_text, id + ": replay differs");
    auto segments = r.original.segments;
    segments[r.original.attack_segment] = final_text;
    const bool flipped =
        direct.victim->Classify({segments}).Argmax() != r.original.gold.id;
    Require(o, flipped == (r.status == AttackStatus::kSuccess),
            id + ": success does not match the final victim label");
  }
  Require(o, attacked > 0, "no example was attacked");

  // Byte-identical artifacts: repeated runs and 1 vs 8 workers.
  const fs::path base = fs::temp_directory_path() / "phrase_attack_acceptance";
  fs::remove_all(base);
  std::vector<std::string> dumps;
  for (const auto& [name, workers] :
       std::vector<std::pair<std::string, std::size_t>>{
           {"run1", 1}, {"run2", 1}, {"run8", 8}}) {
    cli::RunConfig run = config;
    run.workers = workers;
    run.seed = 17;
    run.output_dir = base / name;
    std::ostringstream out, err;
    Require(o, cli::RunAttackCommand(run, out, err) == cli::kExitOk,
            name + " failed: " + err.str());
    dumps.push_back(ReadFile(run.output_dir / "results.jsonl") +
                    ReadFile(run.output_dir / "report.json"));
  }
  fs::remove_all(base);
  Require(o, dumps[0] == dumps[1], "repeated seeded runs differ");
  Require(o, dumps[0] == dumps[2], "workers 1 and 8 differ");
  if (o.pass) {
    o.detail = std::to_string(output.results.size()) + " examples, " +
               std::to_string(attacked) +
               " attacked traces checked, runs byte-identical (1, 1, 8 workers)";
  }
  return o;
}

Outcome KeywordEndToEnd() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "phrase_attack_keyword";
  fs::remove_all(dir);
  fs::create_directories(dir);
  // "awful" alone decides neg; without it the victim says pos.
  const Json models = {
      {"labels", {"neg", "pos"}},
      {"victim", {{"bias", {{"pos", 1.0}}}, {"weights", {{"awful", {{"neg", 4.0}}}}}}},
      {"infiller",
       {{"default", {"the usual", "a plain one", "this"}}}},
      {"cmlm",
       {{"floor", 1e-4},
        {"tables",
         {{"neg", {{"the", 0.2}, {"usual", 0.2}, {"a", 0.2}, {"plain", 0.2},
                   {"one", 0.2}, {"this", 0.2}}},
          {"pos", {{"the", 0.1}, {"usual", 0.1}, {"a", 0.1}, {"plain", 0.1},
                   {"one", 0.1}, {"this", 0.1}}}}}}}};
  std::ofstream(dir / "models.json") << models.dump();

  const std::vector<std::string> nouns = {"soup",  "pasta", "bread", "salad",
                                          "steak", "pie",   "rice",  "fish",
                                          "cake",  "tea"};
  std::ofstream data(dir / "data.jsonl");
  int n = 0;
  for (const auto& noun : nouns) {
    data << Json{{"id", "k" + std::to_string(n++)},
                 {"text", "the awful " + noun + " arrived late ."},
                 {"label", "neg"},
                 {"tree", "(ROOT (S (NP (DT the) (JJ awful) (NN " + noun +
                              ")) (VP (VBD arrived) (ADVP (RB late))) (. .)))"}}
                .dump()
         << "\n";
    data << Json{{"id", "k" + std::to_string(n++)},
                 {"text", "we ate " + noun + " with an awful sauce ."},
                 {"label", "neg"},
                 {"tree", "(ROOT (S (NP (PRP we)) (VP (VBD ate) (NP (NN " + noun +
                              ")) (PP (IN with) (NP (DT an) (JJ awful) (NN "
                              "sauce)))) (. .)))"}}
                .dump()
         << "\n";
  }
  data.close();

  cli::RunConfig config;
  config.dataset = dir / "data.jsonl";
  config.mock_models = dir / "models.json";
  const auto started = Clock::now();
  const cli::Runtime runtime = cli::BuildRuntime(config);
  const auto examples = cli::LoadDataset(config.dataset, runtime.backends.labels,
                                         1000, 0, nullptr);
  const auto output =
      cli::RunCampaign(examples, runtime.backends, config.attack, 1);
  const double elapsed = Seconds(started);
  fs::remove_all(dir);

  Require(o, examples.size() == 20, "expected 20 examples");
  Require(o, output.report.asr && *output.report.asr == 1.0,
          "ASR is not 100% (" + std::to_string(output.report.counts.success) +
              " successes)");
  for (const auto& r : output.results) {
    std::size_t commits = 0;
    for (const auto& step : r.steps) commits += step.chosen ? 1 : 0;
    Require(o, commits == 1, r.original.id + ": " + std::to_string(commits) + " commits");
  }
  Require(o, elapsed < 1.0, Format("took %.3f s", elapsed));
  if (o.pass) {
    o.detail = "20 examples, ASR 100%, 1 commit each, " +
               Format("%.3f s < 1 s", elapsed);
  }
  return o;
}

Outcome DefaultsAudit() {
  Outcome o;
  for (const AttackConfig& c : {AttackConfig{}, cli::RunConfig{}.attack}) {
    Require(o, c.max_depth == 4, "d != 4");
    Require(o, c.max_length_increment == 3, "l != 3");
    Require(o, c.max_steps == 11, "T != 11");
    Require(o, c.delta == 1.0, "delta != 1");
    Require(o, c.num_fills == 5000, "N != 5000");
    Require(o, c.top_k == 50, "k != 50");
  }
  if (o.pass) o.detail = "d=4 l=3 T=11 delta=1 N=5000 k=50";
  return o;
}

Outcome BleuSanity() {
  Outcome o;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const TokenSequence x = RandomTokens(rng, 25, 6, false);
    Require(o, Bleu(x, x) == 1.0, "BLEU(x, x) != 1 for " + x.Join());
  }
  // Candidate is a prefix of half the reference: every n-gram matches (no
  // 4-grams at all), c = 3, r = 6, so BLEU = BP = exp(1 - 6/3).
  const double value = Bleu(Tokenize("the cat sat on the mat"), Tokenize("the cat sat"));
  Require(o, std::abs(value - std::exp(-1.0)) <= 1e-9,
          "brevity example gives " + Format("%.12f", value));
  if (o.pass) {
    o.detail = "BLEU(x,x) = 1 exactly (200 texts), brevity example |diff| = " +
               Format("%.1g", std::abs(value - std::exp(-1.0))) + " <= 1e-9";
  }
  return o;
}

}  // namespace
}  // namespace phrase_attack

int main() {
  using phrase_attack::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"edit-distance oracle equivalence", phrase_attack::EditDistanceOracle},
      {"greedy-step optimality", phrase_attack::GreedyStepOptimality},
      {"filter monotonicity", phrase_attack::FilterMonotonicity},
      {"likelihood-ratio symmetry", phrase_attack::Symmetry},
      {"search-loop conformance on the fixture", phrase_attack::AlgorithmConformance},
      {"keyword end-to-end", phrase_attack::KeywordEndToEnd},
      {"defaults audit", phrase_attack::DefaultsAudit},
      {"BLEU sanity", phrase_attack::BleuSanity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s  %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
