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

// Phrase-level attack: importance ranking of constituent phrases, contextual
// infilling, the class-conditioned likelihood-ratio filter, and the greedy
// commit loop.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phrase_attack/attack/config.hpp"
#include "phrase_attack/gateway/backends.hpp"
#include "phrase_attack/syntax.hpp"
#include "phrase_attack/text.hpp"

namespace phrase_attack {

// What the victim sees: every segment of the example, one of which is being
// perturbed.
struct VictimInput {
  std::vector<TokenSequence> segments;
  std::size_t attack_segment = 0;

  const TokenSequence& text() const { return segments.at(attack_segment); }
  ClassifyRequest Request() const { return {segments}; }
  // Same input with the attacked segment replaced by `text`.
  ClassifyRequest RequestWith(const TokenSequence& text) const;
  VictimInput With(TokenSequence text) const;
};

// A perturbation b for one target phrase.
struct FillCandidate {
  TokenSequence fill;
  // Position in the deduplicated infill output; breaks score ties.
  std::size_t generation_index = 0;
  // log L(x, b, label) for every label.
  std::map<std::string, double> log_likelihoods;
  // log R; R itself is exp(log_ratio).
  double log_ratio = 0.0;
  // S = -P_F(gold | x with b); set only for fills that pass the filter.
  std::optional<double> score;

  double ratio() const;
};

// P_F(gold | x) - P_F(gold | x with the phrase masked token by token).
double PhraseImportance(VictimModel& victim, const VictimInput& input,
                        const std::string& gold,
                        const PhraseCandidate& candidate,
                        std::string_view mask_token);

// Sets `importance` on every candidate (one batched victim call).
void ScoreImportance(VictimModel& victim, const VictimInput& input,
                     const std::string& gold,
                     std::vector<PhraseCandidate>& candidates,
                     std::string_view mask_token);

// Stable sort, descending importance; ties by smaller start, then shorter
// span. Unscored candidates sort as importance 0.
void SortByImportance(std::vector<PhraseCandidate>& candidates);

// ScoreImportance followed by SortByImportance.
std::vector<PhraseCandidate> RankByImportance(
    VictimModel& victim, const VictimInput& input, const std::string& gold,
    std::vector<PhraseCandidate> candidates, std::string_view mask_token);

// Blanks `span` of `text` with a single gap and asks for N fills of at most
// |phrase| + l tokens. Exact duplicates, fills equal to the phrase and
// over-long fills are dropped; an empty result is not an error.
std::vector<FillCandidate> GenerateFillSet(Infiller& infiller,
                                           const TokenSequence& text,
                                           const Span& span,
                                           const AttackConfig& config,
                                           std::uint64_t seed);

// Span of the sentence(s) of `text` touched by `span`. Sentences end at a
// '.', '!' or '?' token followed by the end of text or a capitalized token.
Span SentenceAround(const TokenSequence& text, const Span& span);

// sum over fill tokens z_k of log max(eps, P_CMLM(z_k | context with z_k
// masked; label)). `perturbed` holds the text with the fill applied and
// `fill_span` locates the fill in it.
double PhraseLogLikelihood(ClassConditionedMlm& cmlm,
                           const VictimInput& perturbed, const Span& fill_span,
                           const std::string& label,
                           bool sentence_local = true);

// Fills log_likelihoods and log_ratio for every fill with batched CMLM calls.
// `span` is the target span in input.text() before any fill.
void ScoreLabelPreservation(ClassConditionedMlm& cmlm, const VictimInput& input,
                            const Span& span, const LabelSet& labels,
                            const std::string& gold,
                            std::vector<FillCandidate>& fills,
                            bool sentence_local = true);

// log R = log L(gold) - max over other labels of log L.
// Throws kIncompleteLikelihoods if a label is missing, kInvalidArgument for
// fewer than two labels.
double LogLikelihoodRatio(const std::map<std::string, double>& log_likelihoods,
                          const std::string& gold, const LabelSet& labels);
double LikelihoodRatio(const std::map<std::string, double>& log_likelihoods,
                       const std::string& gold, const LabelSet& labels);

// Keeps exactly the fills with R >= delta, in order.
std::vector<FillCandidate> LabelPreservationFilter(
    const std::vector<FillCandidate>& fills, double delta);

// S = -P_F(gold | x with span replaced by fill).
double EffectivenessScore(VictimModel& victim, const VictimInput& input,
                          const Span& span, const TokenSequence& fill,
                          const std::string& gold);

// Sets `score` on every fill (one batched victim call).
void ScoreEffectiveness(VictimModel& victim, const VictimInput& input,
                        const Span& span, const std::string& gold,
                        std::vector<FillCandidate>& fills);

// Index of the highest score; the earliest wins ties.
// Throws kEmptyCandidateSet for an empty list.
std::size_t SelectBest(const std::vector<FillCandidate>& fills);

enum class AttackStatus { kSuccess, kFailed, kSkippedMisclassified, kErrored };

std::string_view AttackStatusName(AttackStatus status);
// Throws kParseError for unknown names.
AttackStatus AttackStatusFromName(std::string_view name);

struct AttackStep {
  std::size_t step = 0;  // 1-based
  // Target with its span in the coordinates of the text at this step.
  PhraseCandidate target;
  std::size_t fills_generated = 0;
  std::size_t fills_surviving_filter = 0;
  std::optional<FillCandidate> chosen;
  // P_F(gold | text after this step) and the victim's argmax.
  double victim_prob_after = 0.0;
  std::string victim_label_after;
};

struct AttackResult {
  AttackStatus status = AttackStatus::kFailed;
  LabeledExample original;
  std::optional<TokenSequence> perturbed;
  std::vector<AttackStep> steps;
  // Committed spans in the coordinates of the final text.
  std::vector<Span> committed_spans;
  double original_gold_prob = 0.0;
  std::string original_label;
  std::size_t num_candidates = 0;
  // Set for kErrored and for a failure caused by the time budget.
  std::string message;
};

// Seed for the infill request of step `step` of example `example_id`.
std::uint64_t DeriveSeed(std::uint64_t base, std::string_view example_id,
                         std::size_t step);

// Runs the greedy search on one example. Backend failures are caught and
// reported as kErrored. Needs example.trees[attack_segment] or a parser.
AttackResult Attack(const LabeledExample& example, const BackendSet& backends,
                    const AttackConfig& config);

}  // namespace phrase_attack
