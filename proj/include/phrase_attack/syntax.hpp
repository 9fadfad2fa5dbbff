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

// PTB bracketed constituency trees and phrase-candidate extraction.

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phrase_attack/text.hpp"

namespace phrase_attack {

// A constituency tree node. Leaves carry the index of the token they cover;
// internal nodes carry a tag and at least one child.
class ParseTree {
 public:
  static ParseTree Leaf(std::size_t index, Token token);
  static ParseTree Node(std::string tag, std::vector<ParseTree> children);

  bool is_leaf() const { return leaf_index_.has_value(); }
  const std::string& tag() const { return tag_; }
  const std::vector<ParseTree>& children() const { return children_; }
  // Leaf-only accessors.
  std::size_t leaf_index() const { return *leaf_index_; }
  const Token& token() const { return token_; }

  // (leftmost leaf index, rightmost leaf index).
  Span span() const { return span_; }

 private:
  ParseTree() = default;

  std::string tag_;
  std::vector<ParseTree> children_;
  std::optional<std::size_t> leaf_index_;
  Token token_;
  Span span_;
};

// Parses `bracketed` and checks its terminals against `x`.
// Throws kMalformedTree for syntax errors, kTokenMismatch when the leaves are
// not exactly x[0..n-1].
ParseTree ParsePtb(std::string_view bracketed, const TokenSequence& x);

// Leaves 0, preterminals 1, otherwise 1 + deepest child.
int SubtreeDepth(const ParseTree& node);

using TagWhitelist = std::set<std::string, std::less<>>;

// ADJP, ADVP, CONJP, NP, NNP, PP, QP, VP, WHADJP, WHADVP, WHNP, WHVP.
const TagWhitelist& DefaultTagWhitelist();

// "NP-SBJ" -> "NP", "NP=2" -> "NP"; tags starting with '-' are kept whole.
std::string_view BaseTag(std::string_view tag);

struct PhraseCandidate {
  TokenSequence phrase;
  Span span;
  std::string tag;
  int depth = 0;
  std::optional<double> importance;
};

constexpr int kUnboundedDepth = std::numeric_limits<int>::max();

// Preorder (top-down, left-to-right) walk; keeps whitelisted nodes with
// depth <= max_depth. Nested candidates are retained; (span, tag) duplicates
// are dropped.
std::vector<PhraseCandidate> ExtractCandidates(const ParseTree& tree,
                                               const TagWhitelist& whitelist,
                                               int max_depth);

// Drops candidates intersecting `committed` (a span of the sequence before
// the fill) and shifts the ones right of it by fill_length - |committed|.
std::vector<PhraseCandidate> PruneOverlapping(
    const std::vector<PhraseCandidate>& candidates, const Span& committed,
    std::size_t fill_length);

// Shifts a span lying strictly right of `committed` after a fill of
// `fill_length` tokens replaced it; other spans are returned unchanged.
Span ShiftSpan(const Span& span, const Span& committed,
               std::size_t fill_length);

}  // namespace phrase_attack
