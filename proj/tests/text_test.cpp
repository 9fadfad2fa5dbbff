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

#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "phrase_attack/error.hpp"
#include "test_util.hpp"

namespace phrase_attack {
namespace {

using testing::CodeOf;

TEST(TokenizeTest, SplitsOnWhitespace) {
  EXPECT_EQ(Tokenize("the dog runs"), (TokenSequence{"the", "dog", "runs"}));
  EXPECT_EQ(Tokenize("  the\tdog\n runs "),
            (TokenSequence{"the", "dog", "runs"}));
}

TEST(TokenizeTest, PunctuationIsItsOwnToken) {
  EXPECT_EQ(Tokenize("good, cheap!"),
            (TokenSequence{"good", ",", "cheap", "!"}));
  EXPECT_EQ(Tokenize("(really?) \"yes\";no:"),
            (TokenSequence{"(", "really", "?", ")", "\"", "yes", "\"", ";",
                           "no", ":"}));
}

TEST(TokenizeTest, KeepsNumbersWhole) {
  EXPECT_EQ(Tokenize("paid 3.50 for 1,000 fries."),
            (TokenSequence{"paid", "3.50", "for", "1,000", "fries", "."}));
}

TEST(TokenizeTest, KeepsApostrophesAndHyphens) {
  EXPECT_EQ(Tokenize("don't over-cook"),
            (TokenSequence{"don't", "over-cook"}));
}

TEST(TokenizeTest, EmptyInputIsRejected) {
  EXPECT_EQ(CodeOf([] { Tokenize(""); }), ErrorCode::kEmptyText);
  EXPECT_EQ(CodeOf([] { Tokenize(" \t\n"); }), ErrorCode::kEmptyText);
}

TEST(TokenizeTest, DetokenizeRoundTrips) {
  const std::vector<std::string> inputs = {
      "the dog runs", "good, cheap!", "a  b\tc", "(x) [y] {z}", "3.5, 4."};
  for (const auto& raw : inputs) {
    const TokenSequence tokens = Tokenize(raw);
    EXPECT_EQ(Tokenize(Detokenize(tokens)), tokens) << raw;
  }
  EXPECT_EQ(Detokenize(Tokenize("a  b\tc")), "a b c");
}

TEST(TokenSequenceTest, RejectsBadTokens) {
  EXPECT_EQ(CodeOf([] { TokenSequence({"a", ""}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { TokenSequence({"a b"}); }),
            ErrorCode::kInvalidArgument);
}

TEST(TokenSequenceTest, SliceAndRange) {
  const TokenSequence x = {"a", "b", "c", "d"};
  EXPECT_EQ(x.Slice({1, 2}), (TokenSequence{"b", "c"}));
  EXPECT_EQ(x.Range(0, 1), (TokenSequence{"a"}));
  EXPECT_TRUE(x.Range(2, 2).empty());
  EXPECT_EQ(x.Range(3, 99), (TokenSequence{"d"}));
  EXPECT_EQ(CodeOf([&] { x.Slice({2, 4}); }), ErrorCode::kSpanOutOfRange);
  EXPECT_EQ(CodeOf([&] { x.Slice({2, 1}); }), ErrorCode::kSpanOutOfRange);
}

TEST(SpanTest, Intersects) {
  EXPECT_TRUE((Span{0, 2}).Intersects({2, 3}));
  EXPECT_TRUE((Span{1, 1}).Intersects({0, 5}));
  EXPECT_FALSE((Span{0, 1}).Intersects({2, 3}));
  EXPECT_EQ((Span{3, 5}).length(), 3u);
}

TEST(ApplyFillTest, Splices) {
  const TokenSequence x = {"a", "b", "c"};
  EXPECT_EQ(ApplyFill(x, {1, 1}, {"X", "Y"}),
            (TokenSequence{"a", "X", "Y", "c"}));
  EXPECT_EQ(ApplyFill(x, {0, 2}, {"Z"}), (TokenSequence{"Z"}));
  EXPECT_EQ(x, (TokenSequence{"a", "b", "c"}));
}

TEST(ApplyFillTest, Errors) {
  EXPECT_EQ(CodeOf([] { ApplyFill({"a"}, {0, 3}, {"Z"}); }),
            ErrorCode::kSpanOutOfRange);
  EXPECT_EQ(CodeOf([] { ApplyFill({"a"}, {0, 0}, {}); }),
            ErrorCode::kInvalidArgument);
}

TEST(ApplyFillTest, IdentityFillAndContextPreservation) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> tokens(1 + rng() % 12);
    for (auto& t : tokens) t = vocab[rng() % vocab.size()];
    const TokenSequence x(tokens);
    std::size_t i = rng() % x.size();
    std::size_t j = i + rng() % (x.size() - i);
    const Span span{i, j};
    EXPECT_EQ(ApplyFill(x, span, x.Slice(span)), x);

    std::vector<std::string> fill(1 + rng() % 4, "F");
    const TokenSequence out = ApplyFill(x, span, TokenSequence(fill));
    ASSERT_EQ(out.size(), x.size() - span.length() + fill.size());
    for (std::size_t k = 0; k < i; ++k) EXPECT_EQ(out[k], x[k]);
    for (std::size_t k = j + 1; k < x.size(); ++k) {
      EXPECT_EQ(out[k - span.length() + fill.size()], x[k]);
    }
  }
}

LabeledExample WithSegments(std::vector<TokenSequence> segments) {
  LabeledExample example;
  example.segments = std::move(segments);
  return example;
}

TEST(ChooseAttackSegmentTest, LongerSegmentWins) {
  const TokenSequence five = {"a", "b", "c", "d", "e"};
  const TokenSequence seven = {"a", "b", "c", "d", "e", "f", "g"};
  const TokenSequence twelve = Tokenize("a b c d e f g h i j k l");
  EXPECT_EQ(ChooseAttackSegment(WithSegments({five})), 0u);
  EXPECT_EQ(ChooseAttackSegment(WithSegments({five, twelve})), 1u);
  EXPECT_EQ(ChooseAttackSegment(WithSegments({twelve, five})), 0u);
  // Ties go to the second segment.
  EXPECT_EQ(ChooseAttackSegment(WithSegments({seven, seven})), 1u);
}

TEST(LabelSetTest, ResolveByIdOrDisplay) {
  const LabelSet labels({{"0", "negative"}, {"1", "positive"}});
  EXPECT_EQ(labels.Resolve("1").display, "positive");
  EXPECT_EQ(labels.Resolve("negative").id, "0");
  EXPECT_EQ(labels.IndexOf("1"), 1u);
  EXPECT_FALSE(labels.Contains("2"));
  EXPECT_EQ(CodeOf([&] { labels.Resolve("neutral"); }),
            ErrorCode::kUnknownLabel);
  EXPECT_EQ(CodeOf([] { LabelSet::FromIds({"a", "a"}); }),
            ErrorCode::kInvalidArgument);
}

TEST(ErrorCodeTest, NamesRoundTrip) {
  for (ErrorCode code :
       {ErrorCode::kEmptyText, ErrorCode::kSpanOutOfRange,
        ErrorCode::kMalformedTree, ErrorCode::kBackendUnavailable,
        ErrorCode::kProtocolError, ErrorCode::kUnknownLabel,
        ErrorCode::kIncompleteLikelihoods, ErrorCode::kEmptyCandidateSet,
        ErrorCode::kParseError}) {
    EXPECT_EQ(ErrorCodeFromName(ErrorCodeName(code)), code);
  }
  EXPECT_EQ(Error(ErrorCode::kEmptyText, "x").what(), std::string("EmptyText: x"));
}

}  // namespace
}  // namespace phrase_attack
