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

// Word-level text model shared by every other module: tokens, spans, labels
// and labeled examples. All edits and metrics operate in word-token space.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phrase_attack {

using Token = std::string;

// Inclusive token range [start, end].
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool Intersects(const Span& other) const {
    return start <= other.end && other.start <= end;
  }
  bool ValidFor(std::size_t n) const { return start <= end && end < n; }

  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

// Ordered, immutable list of non-empty, whitespace-free tokens.
class TokenSequence {
 public:
  TokenSequence() = default;
  // Throws kInvalidArgument if a token is empty or contains whitespace.
  explicit TokenSequence(std::vector<Token> tokens);
  TokenSequence(std::initializer_list<Token> tokens)
      : TokenSequence(std::vector<Token>(tokens)) {}

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const Token& operator[](std::size_t i) const { return tokens_[i]; }
  const std::vector<Token>& tokens() const { return tokens_; }
  auto begin() const { return tokens_.begin(); }
  auto end() const { return tokens_.end(); }

  // Tokens inside `span`; throws kSpanOutOfRange if the span is invalid.
  TokenSequence Slice(const Span& span) const;
  // Half-open [from, to) range, clamped to the sequence.
  TokenSequence Range(std::size_t from, std::size_t to) const;

  // Space-joined surface text.
  std::string Join() const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
  friend auto operator<=>(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<Token> tokens_;
};

// Whitespace + punctuation tokenizer. Throws kEmptyText on blank input.
TokenSequence Tokenize(std::string_view raw);
std::string Detokenize(const TokenSequence& tokens);

// True for characters split off as standalone tokens.
bool IsSplitPunctuation(char c);

// x[0..i-1] + fill + x[j+1..n-1]. Never mutates `x`.
// Throws kSpanOutOfRange for an invalid span, kInvalidArgument for an empty
// fill.
TokenSequence ApplyFill(const TokenSequence& x, const Span& span,
                        const TokenSequence& fill);

struct Label {
  std::string id;
  std::string display;

  friend bool operator==(const Label&, const Label&) = default;
};

// Ordered set of task labels. Order defines argmax tie-breaking and the
// layout of class distributions on the wire.
class LabelSet {
 public:
  LabelSet() = default;
  // Throws kInvalidArgument on duplicate ids.
  explicit LabelSet(std::vector<Label> labels);
  static LabelSet FromIds(const std::vector<std::string>& ids);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<Label>& labels() const { return labels_; }
  std::vector<std::string> ids() const;
  bool Contains(std::string_view id) const;
  std::optional<std::size_t> IndexOf(std::string_view id) const;
  // Matches by id first, then display text. Throws kUnknownLabel.
  const Label& Resolve(std::string_view id_or_display) const;

 private:
  std::vector<Label> labels_;
};

struct LabeledExample {
  std::string id;
  // One segment (single text) or two (premise, hypothesis).
  std::vector<TokenSequence> segments;
  std::size_t attack_segment = 0;
  Label gold;
  // Optional precomputed PTB trees, parallel to `segments`.
  std::vector<std::optional<std::string>> trees;

  const TokenSequence& AttackText() const { return segments[attack_segment]; }
};

// Single segment -> 0; pair -> the longer one, ties -> 1.
std::size_t ChooseAttackSegment(const LabeledExample& example);

// Returns a copy of `segments` with `segments[index]` replaced by `text`.
std::vector<TokenSequence> ReplaceSegment(
    const std::vector<TokenSequence>& segments, std::size_t index,
    TokenSequence text);

}  // namespace phrase_attack
