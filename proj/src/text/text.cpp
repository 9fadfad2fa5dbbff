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

#include "phrase_attack/text.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "phrase_attack/error.hpp"

namespace phrase_attack {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

// Punctuation rule table. Every listed character becomes its own token,
// except '.' and ',' sitting between two digits (decimals, thousands).
constexpr std::string_view kSplitPunctuation = ",.!?;:\"()[]{}";

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kSpanOutOfRange: return "SpanOutOfRange";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedTree: return "MalformedTree";
    case ErrorCode::kTokenMismatch: return "TokenMismatch";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kIncompleteLikelihoods: return "IncompleteLikelihoods";
    case ErrorCode::kEmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

ErrorCode ErrorCodeFromName(std::string_view name) {
  for (auto code :
       {ErrorCode::kEmptyText, ErrorCode::kSpanOutOfRange,
        ErrorCode::kInvalidArgument, ErrorCode::kMalformedTree,
        ErrorCode::kTokenMismatch, ErrorCode::kBackendUnavailable,
        ErrorCode::kProtocolError, ErrorCode::kUnknownLabel,
        ErrorCode::kIncompleteLikelihoods, ErrorCode::kEmptyCandidateSet,
        ErrorCode::kParseError}) {
    if (ErrorCodeName(code) == name) return code;
  }
  return ErrorCode::kProtocolError;
}

TokenSequence::TokenSequence(std::vector<Token> tokens)
    : tokens_(std::move(tokens)) {
  for (const auto& token : tokens_) {
    if (token.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty token");
    }
    if (std::any_of(token.begin(), token.end(), IsSpace)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token contains whitespace: '" + token + "'");
    }
  }
}

TokenSequence TokenSequence::Slice(const Span& span) const {
  if (!span.ValidFor(size())) {
    throw Error(ErrorCode::kSpanOutOfRange,
                "span (" + std::to_string(span.start) + "," +
                    std::to_string(span.end) + ") outside sequence of length " +
                    std::to_string(size()));
  }
  return Range(span.start, span.end + 1);
}

TokenSequence TokenSequence::Range(std::size_t from, std::size_t to) const {
  to = std::min(to, size());
  from = std::min(from, to);
  TokenSequence out;
  out.tokens_.assign(tokens_.begin() + static_cast<std::ptrdiff_t>(from),
                     tokens_.begin() + static_cast<std::ptrdiff_t>(to));
  return out;
}

std::string TokenSequence::Join() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens_[i];
  }
  return out;
}

bool IsSplitPunctuation(char c) {
  return kSplitPunctuation.find(c) != std::string_view::npos;
}

TokenSequence Tokenize(std::string_view raw) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (IsSpace(c)) {
      flush();
      continue;
    }
    if (IsSplitPunctuation(c)) {
      const bool numeric_separator =
          (c == '.' || c == ',') && !current.empty() &&
          IsDigit(current.back()) && i + 1 < raw.size() && IsDigit(raw[i + 1]);
      if (!numeric_separator) {
        flush();
        tokens.emplace_back(1, c);
        continue;
      }
    }
    current += c;
  }
  flush();
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyText, "input contains no tokens");
  }
  return TokenSequence(std::move(tokens));
}

std::string Detokenize(const TokenSequence& tokens) { return tokens.Join(); }

TokenSequence ApplyFill(const TokenSequence& x, const Span& span,
                        const TokenSequence& fill) {
  if (!span.ValidFor(x.size())) {
    throw Error(ErrorCode::kSpanOutOfRange,
                "span (" + std::to_string(span.start) + "," +
                    std::to_string(span.end) + ") outside sequence of length " +
                    std::to_string(x.size()));
  }
  if (fill.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "fill must be non-empty");
  }
  std::vector<Token> out;
  out.reserve(x.size() - span.length() + fill.size());
  out.insert(out.end(), x.begin(),
             x.begin() + static_cast<std::ptrdiff_t>(span.start));
  out.insert(out.end(), fill.begin(), fill.end());
  out.insert(out.end(), x.begin() + static_cast<std::ptrdiff_t>(span.end + 1),
             x.end());
  return TokenSequence(std::move(out));
}

LabelSet::LabelSet(std::vector<Label> labels) : labels_(std::move(labels)) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels_) {
    if (label.id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty label id");
    }
    if (!seen.insert(label.id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate label id '" + label.id + "'");
    }
  }
}

LabelSet LabelSet::FromIds(const std::vector<std::string>& ids) {
  std::vector<Label> labels;
  labels.reserve(ids.size());
  for (const auto& id : ids) labels.push_back({id, id});
  return LabelSet(std::move(labels));
}

std::vector<std::string> LabelSet::ids() const {
  std::vector<std::string> out;
  out.reserve(labels_.size());
  for (const auto& label : labels_) out.push_back(label.id);
  return out;
}

bool LabelSet::Contains(std::string_view id) const {
  return IndexOf(id).has_value();
}

std::optional<std::size_t> LabelSet::IndexOf(std::string_view id) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].id == id) return i;
  }
  return std::nullopt;
}

const Label& LabelSet::Resolve(std::string_view id_or_display) const {
  for (const auto& label : labels_) {
    if (label.id == id_or_display) return label;
  }
  for (const auto& label : labels_) {
    if (label.display == id_or_display) return label;
  }
  throw Error(ErrorCode::kUnknownLabel,
              "label '" + std::string(id_or_display) + "' not in label set");
}

std::size_t ChooseAttackSegment(const LabeledExample& example) {
  if (example.segments.size() < 2) return 0;
  return example.segments[0].size() > example.segments[1].size() ? 0 : 1;
}

std::vector<TokenSequence> ReplaceSegment(
    const std::vector<TokenSequence>& segments, std::size_t index,
    TokenSequence text) {
  std::vector<TokenSequence> out = segments;
  out.at(index) = std::move(text);
  return out;
}

}  // namespace phrase_attack
