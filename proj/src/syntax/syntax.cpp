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

#include "phrase_attack/syntax.hpp"

#include <algorithm>
#include <utility>

#include "phrase_attack/error.hpp"

namespace phrase_attack {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Terminal spellings emitted by PTB-style parsers for characters that would
// otherwise clash with the bracket syntax.
bool TerminalMatches(std::string_view terminal, std::string_view token) {
  if (terminal == token) return true;
  static constexpr std::pair<std::string_view, std::string_view> kEscapes[] = {
      {"-LRB-", "("}, {"-RRB-", ")"}, {"-LSB-", "["}, {"-RSB-", "]"},
      {"-LCB-", "{"}, {"-RCB-", "}"}, {"``", "\""},   {"''", "\""},
  };
  for (const auto& [escaped, plain] : kEscapes) {
    if (terminal == escaped && token == plain) return true;
  }
  return false;
}

struct Lexeme {
  enum Kind { kOpen, kClose, kAtom } kind;
  std::string text;
};

std::vector<Lexeme> Lex(std::string_view text) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (IsSpace(c)) {
      ++i;
    } else if (c == '(') {
      out.push_back({Lexeme::kOpen, {}});
      ++i;
    } else if (c == ')') {
      out.push_back({Lexeme::kClose, {}});
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !IsSpace(text[j]) && text[j] != '(' &&
             text[j] != ')') {
        ++j;
      }
      out.push_back({Lexeme::kAtom, std::string(text.substr(i, j - i))});
      i = j;
    }
  }
  return out;
}

class PtbReader {
 public:
  PtbReader(std::vector<Lexeme> lexemes, const TokenSequence& x)
      : lexemes_(std::move(lexemes)), x_(x) {}

  ParseTree ReadTree() {
    ParseTree tree = ReadNode();
    if (pos_ != lexemes_.size()) {
      throw Error(ErrorCode::kMalformedTree,
                  "trailing input after the root constituent");
    }
    if (next_leaf_ != x_.size()) {
      throw Error(ErrorCode::kTokenMismatch,
                  "tree has " + std::to_string(next_leaf_) +
                      " leaves, sequence has " + std::to_string(x_.size()) +
                      " tokens");
    }
    return tree;
  }

 private:
  ParseTree ReadNode() {
    Expect(Lexeme::kOpen);
    std::string tag;
    if (Peek() == Lexeme::kAtom) tag = lexemes_[pos_++].text;
    std::vector<ParseTree> children;
    while (Peek() != Lexeme::kClose) {
      if (Peek() == Lexeme::kOpen) {
        children.push_back(ReadNode());
      } else {
        children.push_back(ReadLeaf(lexemes_[pos_++].text));
      }
    }
    ++pos_;
    if (children.empty()) {
      throw Error(ErrorCode::kMalformedTree,
                  "constituent '" + tag + "' has no children");
    }
    return ParseTree::Node(std::move(tag), std::move(children));
  }

  ParseTree ReadLeaf(const std::string& terminal) {
    if (next_leaf_ >= x_.size()) {
      throw Error(ErrorCode::kTokenMismatch,
                  "tree has more leaves than the sequence has tokens");
    }
    if (!TerminalMatches(terminal, x_[next_leaf_])) {
      throw Error(ErrorCode::kTokenMismatch,
                  "leaf " + std::to_string(next_leaf_) + " is '" + terminal +
                      "', token is '" + x_[next_leaf_] + "'");
    }
    ParseTree leaf = ParseTree::Leaf(next_leaf_, x_[next_leaf_]);
    ++next_leaf_;
    return leaf;
  }

  Lexeme::Kind Peek() const {
    if (pos_ >= lexemes_.size()) {
      throw Error(ErrorCode::kMalformedTree, "unbalanced brackets");
    }
    return lexemes_[pos_].kind;
  }

  void Expect(Lexeme::Kind kind) {
    if (Peek() != kind) {
      throw Error(ErrorCode::kMalformedTree,
                  "unexpected token at position " + std::to_string(pos_));
    }
    ++pos_;
  }

  std::vector<Lexeme> lexemes_;
  const TokenSequence& x_;
  std::size_t pos_ = 0;
  std::size_t next_leaf_ = 0;
};

void Collect(const ParseTree& node, const TagWhitelist& whitelist,
             int max_depth, const TokenSequence& tokens,
             std::set<std::pair<Span, std::string>>& seen,
             std::vector<PhraseCandidate>& out) {
  if (node.is_leaf()) return;
  const int depth = SubtreeDepth(node);
  const std::string_view base = BaseTag(node.tag());
  if (depth <= max_depth && whitelist.contains(base)) {
    std::string tag(base);
    if (seen.emplace(node.span(), tag).second) {
      out.push_back({tokens.Slice(node.span()), node.span(), std::move(tag),
                     depth, std::nullopt});
    }
  }
  for (const auto& child : node.children()) {
    Collect(child, whitelist, max_depth, tokens, seen, out);
  }
}

void CollectLeaves(const ParseTree& node, std::vector<Token>& out) {
  if (node.is_leaf()) {
    out.push_back(node.token());
    return;
  }
  for (const auto& child : node.children()) CollectLeaves(child, out);
}

}  // namespace

ParseTree ParseTree::Leaf(std::size_t index, Token token) {
  ParseTree leaf;
  leaf.leaf_index_ = index;
  leaf.token_ = std::move(token);
  leaf.span_ = {index, index};
  return leaf;
}

ParseTree ParseTree::Node(std::string tag, std::vector<ParseTree> children) {
  if (children.empty()) {
    throw Error(ErrorCode::kMalformedTree, "internal node without children");
  }
  ParseTree node;
  node.tag_ = std::move(tag);
  node.span_ = {children.front().span().start, children.back().span().end};
  node.children_ = std::move(children);
  return node;
}

ParseTree ParsePtb(std::string_view bracketed, const TokenSequence& x) {
  std::vector<Lexeme> lexemes = Lex(bracketed);
  if (lexemes.empty()) {
    throw Error(ErrorCode::kMalformedTree, "empty tree text");
  }
  PtbReader reader(std::move(lexemes), x);
  return reader.ReadTree();
}

int SubtreeDepth(const ParseTree& node) {
  if (node.is_leaf()) return 0;
  int deepest = 0;
  for (const auto& child : node.children()) {
    deepest = std::max(deepest, SubtreeDepth(child));
  }
  return 1 + deepest;
}

const TagWhitelist& DefaultTagWhitelist() {
  static const TagWhitelist kTags = {"ADJP", "ADVP", "CONJP",  "NP",
                                     "NNP",  "PP",   "QP",     "VP",
                                     "WHADJP", "WHADVP", "WHNP", "WHVP"};
  return kTags;
}

std::string_view BaseTag(std::string_view tag) {
  if (tag.empty() || tag.front() == '-') return tag;
  const auto cut = tag.find_first_of("-=");
  return cut == std::string_view::npos ? tag : tag.substr(0, cut);
}

std::vector<PhraseCandidate> ExtractCandidates(const ParseTree& tree,
                                               const TagWhitelist& whitelist,
                                               int max_depth) {
  std::vector<Token> leaves;
  CollectLeaves(tree, leaves);
  const TokenSequence tokens(std::move(leaves));
  std::set<std::pair<Span, std::string>> seen;
  std::vector<PhraseCandidate> out;
  Collect(tree, whitelist, max_depth, tokens, seen, out);
  return out;
}

Span ShiftSpan(const Span& span, const Span& committed,
               std::size_t fill_length) {
  if (span.start <= committed.end) return span;
  // The result stays non-negative: span.start > committed.end >= |committed|-1.
  const auto delta = static_cast<std::ptrdiff_t>(fill_length) -
                     static_cast<std::ptrdiff_t>(committed.length());
  return {static_cast<std::size_t>(static_cast<std::ptrdiff_t>(span.start) +
                                   delta),
          static_cast<std::size_t>(static_cast<std::ptrdiff_t>(span.end) +
                                   delta)};
}

std::vector<PhraseCandidate> PruneOverlapping(
    const std::vector<PhraseCandidate>& candidates, const Span& committed,
    std::size_t fill_length) {
  std::vector<PhraseCandidate> out;
  out.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    if (candidate.span.Intersects(committed)) continue;
    PhraseCandidate kept = candidate;
    kept.span = ShiftSpan(candidate.span, committed, fill_length);
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace phrase_attack
