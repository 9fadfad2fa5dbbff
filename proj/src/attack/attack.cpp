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

#include "phrase_attack/attack/attack.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "phrase_attack/error.hpp"

namespace phrase_attack {
namespace {

// Upper bound on items per batched backend request.
constexpr std::size_t kMaxBatch = 256;

std::vector<ClassDistribution> ClassifyChunked(
    VictimModel& victim, const std::vector<ClassifyRequest>& requests) {
  std::vector<ClassDistribution> out;
  out.reserve(requests.size());
  for (std::size_t begin = 0; begin < requests.size(); begin += kMaxBatch) {
    const std::size_t end = std::min(requests.size(), begin + kMaxBatch);
    auto chunk = victim.ClassifyBatch(
        {requests.begin() + static_cast<std::ptrdiff_t>(begin),
         requests.begin() + static_cast<std::ptrdiff_t>(end)});
    if (chunk.size() != end - begin) {
      throw Error(ErrorCode::kProtocolError,
                  "victim batch answer has the wrong size");
    }
    for (auto& d : chunk) out.push_back(std::move(d));
  }
  return out;
}

std::vector<CmlmTokenLikelihood> TokenProbChunked(
    ClassConditionedMlm& cmlm, const std::vector<CmlmQuery>& queries) {
  std::vector<CmlmTokenLikelihood> out;
  out.reserve(queries.size());
  for (std::size_t begin = 0; begin < queries.size(); begin += kMaxBatch) {
    const std::size_t end = std::min(queries.size(), begin + kMaxBatch);
    auto chunk = cmlm.TokenProbBatch(
        {queries.begin() + static_cast<std::ptrdiff_t>(begin),
         queries.begin() + static_cast<std::ptrdiff_t>(end)});
    if (chunk.size() != end - begin) {
      throw Error(ErrorCode::kProtocolError,
                  "cmlm batch answer has the wrong size");
    }
    out.insert(out.end(), chunk.begin(), chunk.end());
  }
  return out;
}

TokenSequence MaskSpan(const TokenSequence& text, const Span& span,
                       std::string_view mask_token) {
  std::vector<Token> tokens = text.tokens();
  for (std::size_t i = span.start; i <= span.end; ++i) {
    tokens[i] = std::string(mask_token);
  }
  return TokenSequence(std::move(tokens));
}

// One query per fill token for `label`, in fill order.
std::vector<CmlmQuery> FillQueries(const VictimInput& perturbed,
                                   const Span& fill_span,
                                   const std::string& label,
                                   bool sentence_local) {
  const TokenSequence& text = perturbed.text();
  if (!fill_span.ValidFor(text.size())) {
    throw Error(ErrorCode::kSpanOutOfRange, "fill span outside the text");
  }
  std::vector<TokenSequence> segments = perturbed.segments;
  std::size_t segment = perturbed.attack_segment;
  std::size_t offset = 0;
  if (sentence_local && perturbed.segments.size() == 1) {
    const Span sentence = SentenceAround(text, fill_span);
    segments = {text.Range(sentence.start, sentence.end + 1)};
    segment = 0;
    offset = sentence.start;
  }
  std::vector<CmlmQuery> queries;
  queries.reserve(fill_span.length());
  for (std::size_t k = fill_span.start; k <= fill_span.end; ++k) {
    queries.push_back({segments, segment, k - offset, label});
  }
  return queries;
}

double FlooredLog(double p) { return std::log(std::max(p, kLikelihoodFloor)); }

bool IsSentenceFinal(const Token& token) {
  return token == "." || token == "!" || token == "?";
}

bool StartsCapitalized(const Token& token) {
  return !token.empty() &&
         std::isupper(static_cast<unsigned char>(token.front())) != 0;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void AttackConfig::Validate() const {
  if (max_depth < 1 || max_length_increment < 1 || max_steps < 1 ||
      num_fills < 1 || top_k < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "d, l, T, N and k must all be >= 1");
  }
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must be > 0");
  }
  // Throws for an empty mask or one containing whitespace.
  TokenSequence({mask_token});
}

ClassifyRequest VictimInput::RequestWith(const TokenSequence& text) const {
  return {ReplaceSegment(segments, attack_segment, text)};
}

VictimInput VictimInput::With(TokenSequence text) const {
  return {ReplaceSegment(segments, attack_segment, std::move(text)),
          attack_segment};
}

double FillCandidate::ratio() const { return std::exp(log_ratio); }

void ScoreImportance(VictimModel& victim, const VictimInput& input,
                     const std::string& gold,
                     std::vector<PhraseCandidate>& candidates,
                     std::string_view mask_token) {
  if (candidates.empty()) return;
  std::vector<ClassifyRequest> requests;
  requests.reserve(candidates.size() + 1);
  requests.push_back(input.Request());
  for (const auto& candidate : candidates) {
    requests.push_back(
        input.RequestWith(MaskSpan(input.text(), candidate.span, mask_token)));
  }
  const auto distributions = ClassifyChunked(victim, requests);
  const double base = distributions.front().Prob(gold);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].importance = base - distributions[i + 1].Prob(gold);
  }
}

double PhraseImportance(VictimModel& victim, const VictimInput& input,
                        const std::string& gold,
                        const PhraseCandidate& candidate,
                        std::string_view mask_token) {
  std::vector<PhraseCandidate> one = {candidate};
  ScoreImportance(victim, input, gold, one, mask_token);
  return *one.front().importance;
}

void SortByImportance(std::vector<PhraseCandidate>& candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const PhraseCandidate& a, const PhraseCandidate& b) {
                     const double ia = a.importance.value_or(0.0);
                     const double ib = b.importance.value_or(0.0);
                     if (ia != ib) return ia > ib;
                     if (a.span.start != b.span.start) {
                       return a.span.start < b.span.start;
                     }
                     return a.span.length() < b.span.length();
                   });
}

std::vector<PhraseCandidate> RankByImportance(
    VictimModel& victim, const VictimInput& input, const std::string& gold,
    std::vector<PhraseCandidate> candidates, std::string_view mask_token) {
  ScoreImportance(victim, input, gold, candidates, mask_token);
  SortByImportance(candidates);
  return candidates;
}

std::vector<FillCandidate> GenerateFillSet(Infiller& infiller,
                                           const TokenSequence& text,
                                           const Span& span,
                                           const AttackConfig& config,
                                           std::uint64_t seed) {
  const TokenSequence phrase = text.Slice(span);
  InfillRequest request;
  request.left = text.Range(0, span.start);
  request.right = text.Range(span.end + 1, text.size());
  request.max_fill_len = phrase.size() + config.max_length_increment;
  request.num_samples = config.num_fills;
  request.top_k = config.top_k;
  request.seed = seed;
  const InfillResponse response = infiller.Infill(request);

  std::vector<FillCandidate> out;
  std::set<TokenSequence> seen;
  for (const auto& fill : response.fills) {
    if (fill.empty() || fill.size() > request.max_fill_len) continue;
    if (fill == phrase) continue;
    if (!seen.insert(fill).second) continue;
    FillCandidate candidate;
    candidate.fill = fill;
    candidate.generation_index = out.size();
    out.push_back(std::move(candidate));
  }
  return out;
}

Span SentenceAround(const TokenSequence& text, const Span& span) {
  // Sentence starts, ascending.
  std::vector<std::size_t> starts = {0};
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if (IsSentenceFinal(text[i]) && StartsCapitalized(text[i + 1])) {
      starts.push_back(i + 1);
    }
  }
  auto sentence_of = [&](std::size_t index) {
    return static_cast<std::size_t>(
        std::upper_bound(starts.begin(), starts.end(), index) - starts.begin() -
        1);
  };
  const std::size_t first = sentence_of(span.start);
  const std::size_t last = sentence_of(span.end);
  const std::size_t end =
      last + 1 < starts.size() ? starts[last + 1] - 1 : text.size() - 1;
  return {starts[first], end};
}

double PhraseLogLikelihood(ClassConditionedMlm& cmlm,
                           const VictimInput& perturbed, const Span& fill_span,
                           const std::string& label, bool sentence_local) {
  const auto queries =
      FillQueries(perturbed, fill_span, label, sentence_local);
  double total = 0.0;
  for (const auto& likelihood : TokenProbChunked(cmlm, queries)) {
    total += FlooredLog(likelihood.prob);
  }
  return total;
}

void ScoreLabelPreservation(ClassConditionedMlm& cmlm, const VictimInput& input,
                            const Span& span, const LabelSet& labels,
                            const std::string& gold,
                            std::vector<FillCandidate>& fills,
                            bool sentence_local) {
  if (fills.empty()) return;
  std::vector<CmlmQuery> queries;
  // (fill index, label index) owning each query, parallel to `queries`.
  std::vector<std::pair<std::size_t, std::size_t>> owners;
  for (std::size_t f = 0; f < fills.size(); ++f) {
    const TokenSequence& fill = fills[f].fill;
    const VictimInput perturbed =
        input.With(ApplyFill(input.text(), span, fill));
    const Span fill_span{span.start, span.start + fill.size() - 1};
    for (std::size_t l = 0; l < labels.size(); ++l) {
      for (auto& query : FillQueries(perturbed, fill_span,
                                     labels.labels()[l].id, sentence_local)) {
        queries.push_back(std::move(query));
        owners.emplace_back(f, l);
      }
    }
  }
  const auto likelihoods = TokenProbChunked(cmlm, queries);
  std::vector<std::vector<double>> sums(
      fills.size(), std::vector<double>(labels.size(), 0.0));
  for (std::size_t q = 0; q < likelihoods.size(); ++q) {
    sums[owners[q].first][owners[q].second] += FlooredLog(likelihoods[q].prob);
  }
  for (std::size_t f = 0; f < fills.size(); ++f) {
    fills[f].log_likelihoods.clear();
    for (std::size_t l = 0; l < labels.size(); ++l) {
      fills[f].log_likelihoods[labels.labels()[l].id] = sums[f][l];
    }
    fills[f].log_ratio =
        LogLikelihoodRatio(fills[f].log_likelihoods, gold, labels);
  }
}

double LogLikelihoodRatio(const std::map<std::string, double>& log_likelihoods,
                          const std::string& gold, const LabelSet& labels) {
  if (labels.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "likelihood ratio needs at least two labels");
  }
  double gold_value = 0.0;
  double best_other = -std::numeric_limits<double>::infinity();
  bool saw_gold = false;
  for (const auto& label : labels.labels()) {
    const auto it = log_likelihoods.find(label.id);
    if (it == log_likelihoods.end()) {
      throw Error(ErrorCode::kIncompleteLikelihoods,
                  "no likelihood for label '" + label.id + "'");
    }
    if (label.id == gold) {
      gold_value = it->second;
      saw_gold = true;
    } else {
      best_other = std::max(best_other, it->second);
    }
  }
  if (!saw_gold) {
    throw Error(ErrorCode::kUnknownLabel,
                "gold label '" + gold + "' not in label set");
  }
  return gold_value - best_other;
}

double LikelihoodRatio(const std::map<std::string, double>& log_likelihoods,
                       const std::string& gold, const LabelSet& labels) {
  return std::exp(LogLikelihoodRatio(log_likelihoods, gold, labels));
}

std::vector<FillCandidate> LabelPreservationFilter(
    const std::vector<FillCandidate>& fills, double delta) {
  // Compared in log space so that ratios beyond double range stay ordered.
  const double log_delta = std::log(delta);
  std::vector<FillCandidate> out;
  for (const auto& fill : fills) {
    if (fill.log_ratio >= log_delta) out.push_back(fill);
  }
  return out;
}

double EffectivenessScore(VictimModel& victim, const VictimInput& input,
                          const Span& span, const TokenSequence& fill,
                          const std::string& gold) {
  return -victim.Classify(input.RequestWith(ApplyFill(input.text(), span, fill)))
              .Prob(gold);
}

void ScoreEffectiveness(VictimModel& victim, const VictimInput& input,
                        const Span& span, const std::string& gold,
                        std::vector<FillCandidate>& fills) {
  std::vector<ClassifyRequest> requests;
  requests.reserve(fills.size());
  for (const auto& fill : fills) {
    requests.push_back(
        input.RequestWith(ApplyFill(input.text(), span, fill.fill)));
  }
  const auto distributions = ClassifyChunked(victim, requests);
  for (std::size_t i = 0; i < fills.size(); ++i) {
    fills[i].score = -distributions[i].Prob(gold);
  }
}

std::size_t SelectBest(const std::vector<FillCandidate>& fills) {
  if (fills.empty()) {
    throw Error(ErrorCode::kEmptyCandidateSet, "no fills to choose from");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < fills.size(); ++i) {
    if (fills[i].score.value() > fills[best].score.value()) best = i;
  }
  return best;
}

std::string_view AttackStatusName(AttackStatus status) {
  switch (status) {
    case AttackStatus::kSuccess: return "success";
    case AttackStatus::kFailed: return "failed";
    case AttackStatus::kSkippedMisclassified: return "skipped_misclassified";
    case AttackStatus::kErrored: return "errored";
  }
  return "unknown";
}

AttackStatus AttackStatusFromName(std::string_view name) {
  for (auto status : {AttackStatus::kSuccess, AttackStatus::kFailed,
                      AttackStatus::kSkippedMisclassified,
                      AttackStatus::kErrored}) {
    if (AttackStatusName(status) == name) return status;
  }
  throw Error(ErrorCode::kParseError,
              "unknown attack status '" + std::string(name) + "'");
}

std::uint64_t DeriveSeed(std::uint64_t base, std::string_view example_id,
                         std::size_t step) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const unsigned char c : example_id) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return SplitMix64(SplitMix64(base ^ hash) + step);
}

AttackResult Attack(const LabeledExample& example, const BackendSet& backends,
                    const AttackConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();

  AttackResult result;
  result.original = example;
  try {
    config.Validate();
    if (!backends.victim || !backends.infiller || !backends.cmlm) {
      throw Error(ErrorCode::kInvalidArgument,
                  "victim, infiller and cmlm backends are required");
    }
    VictimModel& victim = *backends.victim;
    const LabelSet& labels =
        backends.labels.empty() ? victim.labels() : backends.labels;
    const std::string& gold = example.gold.id;
    const VictimInput input{example.segments, example.attack_segment};
    if (input.text().empty()) {
      throw Error(ErrorCode::kEmptyText, "attack segment is empty");
    }

    const ClassDistribution original = victim.Classify(input.Request());
    result.original_gold_prob = original.Prob(gold);
    result.original_label = original.Argmax();
    if (result.original_label != gold) {
      result.status = AttackStatus::kSkippedMisclassified;
      return result;
    }

    std::string tree_text;
    if (example.attack_segment < example.trees.size() &&
        example.trees[example.attack_segment]) {
      tree_text = *example.trees[example.attack_segment];
    } else if (backends.parser) {
      tree_text = backends.parser->Parse(input.text());
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "no tree for the attack segment and no parser configured");
    }
    const ParseTree tree = ParsePtb(tree_text, input.text());
    std::vector<PhraseCandidate> remaining = RankByImportance(
        victim, input, gold,
        ExtractCandidates(tree, config.whitelist, config.max_depth),
        config.mask_token);
    result.num_candidates = remaining.size();

    TokenSequence current = input.text();
    double current_prob = result.original_gold_prob;
    std::string current_label = result.original_label;

    for (std::size_t t = 1; t <= config.max_steps; ++t) {
      if (remaining.empty()) break;
      if (config.time_budget && Clock::now() - started > *config.time_budget) {
        result.message = "time budget exceeded";
        break;
      }
      AttackStep step;
      step.step = t;
      step.target = remaining.front();
      remaining.erase(remaining.begin());
      const Span span = step.target.span;
      const VictimInput state = input.With(current);

      std::vector<FillCandidate> fills =
          GenerateFillSet(*backends.infiller, current, span, config,
                          DeriveSeed(config.seed, example.id, t));
      step.fills_generated = fills.size();
      ScoreLabelPreservation(*backends.cmlm, state, span, labels, gold, fills,
                             config.sentence_local_likelihood);
      std::vector<FillCandidate> survivors =
          LabelPreservationFilter(fills, config.delta);
      step.fills_surviving_filter = survivors.size();
      if (survivors.empty()) {
        step.victim_prob_after = current_prob;
        step.victim_label_after = current_label;
        result.steps.push_back(std::move(step));
        continue;
      }

      ScoreEffectiveness(victim, state, span, gold, survivors);
      FillCandidate chosen = survivors[SelectBest(survivors)];
      const std::size_t m = chosen.fill.size();
      current = ApplyFill(current, span, chosen.fill);
      remaining = PruneOverlapping(remaining, span, m);
      for (auto& committed : result.committed_spans) {
        committed = ShiftSpan(committed, span, m);
      }
      result.committed_spans.push_back({span.start, span.start + m - 1});

      const ClassDistribution after =
          victim.Classify(input.RequestWith(current));
      current_prob = after.Prob(gold);
      current_label = after.Argmax();
      step.chosen = std::move(chosen);
      step.victim_prob_after = current_prob;
      step.victim_label_after = current_label;
      result.steps.push_back(std::move(step));
      if (current_label != gold) {
        result.status = AttackStatus::kSuccess;
        result.perturbed = current;
        return result;
      }
    }
    result.status = AttackStatus::kFailed;
  } catch (const Error& e) {
    result.status = AttackStatus::kErrored;
    result.message = e.what();
  }
  return result;
}

}  // namespace phrase_attack
