// Copyright 2026 The Cleme Authors.
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

#include "cleme/corpus_io.h"

#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace cleme {
namespace {

using ::testing::HasSubstr;

TEST(ParseM2, SingleSubstitution) {
  auto sets = ParseM2("S A B\nA 1 2|||X|||c|||REQUIRED|||-NONE-|||0\n");
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].source, (TokenSeq{"A", "B"}));
  ASSERT_EQ(sets[0].references.size(), 1u);
  EXPECT_EQ(sets[0].references[0], (TokenSeq{"A", "c"}));
  EXPECT_EQ(sets[0].annotator_ids, (std::vector<std::string>{"0"}));
}

TEST(ParseM2, SourceOnlyBlockYieldsSourceAsReference) {
  auto sets = ParseM2("S a b c\n\n");
  ASSERT_EQ(sets.size(), 1u);
  ASSERT_EQ(sets[0].references.size(), 1u);
  EXPECT_EQ(sets[0].references[0], sets[0].source);
}

TEST(ParseM2, TwoAnnotators) {
  // Hand-applied: annotator 0 deletes "b"; annotator 1 inserts "x" at 0.
  const char* text =
      "S a b c\n"
      "A 1 2|||U|||-NONE-|||REQUIRED|||-NONE-|||0\n"
      "A 0 0|||M|||x|||REQUIRED|||-NONE-|||1\n";
  auto sets = ParseM2(text);
  ASSERT_EQ(sets.size(), 1u);
  ASSERT_EQ(sets[0].references.size(), 2u);
  EXPECT_EQ(sets[0].references[0], (TokenSeq{"a", "c"}));
  EXPECT_EQ(sets[0].references[1], (TokenSeq{"x", "a", "b", "c"}));
}

TEST(ParseM2, NoopAndAbsentAnnotatorGiveUnchangedReference) {
  const char* text =
      "S a b\n"
      "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
      "A 0 1|||R|||z|||REQUIRED|||-NONE-|||1\n"
      "\n"
      "S c d\n"
      "A 1 2|||R|||e|||REQUIRED|||-NONE-|||0\n";
  auto sets = ParseM2(text);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].references[0], (TokenSeq{"a", "b"}));
  EXPECT_EQ(sets[0].references[1], (TokenSeq{"z", "b"}));
  // Annotator 1 has no lines in the second block.
  EXPECT_EQ(sets[1].references[0], (TokenSeq{"c", "e"}));
  EXPECT_EQ(sets[1].references[1], (TokenSeq{"c", "d"}));
}

TEST(ParseM2, MalformedSpanReportsLine) {
  try {
    ParseM2("S a b\nA 2 1|||R|||x|||REQUIRED|||-NONE-|||0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    ParseM2("S a b\n\nS c\nA 0 2|||R|||x|||REQUIRED|||-NONE-|||0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ParseM2, OverlappingSpansFromOneAnnotatorFail) {
  const char* text =
      "S a b c\n"
      "A 0 2|||R|||x|||REQUIRED|||-NONE-|||0\n"
      "A 1 3|||R|||y|||REQUIRED|||-NONE-|||0\n";
  try {
    ParseM2(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_THAT(std::string(e.what()), HasSubstr("overlaps"));
  }
  // The same spans from different annotators are fine.
  EXPECT_NO_THROW(ParseM2(
      "S a b c\n"
      "A 0 2|||R|||x|||REQUIRED|||-NONE-|||0\n"
      "A 1 3|||R|||y|||REQUIRED|||-NONE-|||1\n"));
}

// Applying edits left to right, or right to left without offset tracking,
// must agree when spans do not overlap.
TEST(ParseM2, EditOrderIndependence) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    TokenSeq src = testing::RandomSentence(rng, 10);
    // Random non-overlapping spans, ascending.
    std::vector<std::pair<Span, TokenSeq>> edits;
    std::size_t pos = 0;
    std::bernoulli_distribution coin(0.4);
    std::uniform_int_distribution<std::size_t> width(0, 2);
    while (pos <= src.size()) {
      if (coin(rng)) {
        std::size_t w = std::min(width(rng), src.size() - pos);
        edits.push_back({Span{pos, pos + w}, testing::RandomSentence(rng, 2)});
        if (w == 0 && edits.back().second.empty()) edits.back().second = {"ins"};
        pos += w + 1;
      } else {
        ++pos;
      }
    }
    std::string m2 = "S " + Join(src) + "\n";
    // File order is reversed to exercise sorting.
    for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
      std::string corr = it->second.empty() ? "-NONE-" : Join(it->second);
      m2 += "A " + std::to_string(it->first.begin) + " " +
            std::to_string(it->first.end) + "|||R|||" + corr +
            "|||REQUIRED|||-NONE-|||0\n";
    }
    if (edits.empty()) continue;
    TokenSeq descending = src;
    for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
      descending.erase(descending.begin() + static_cast<long>(it->first.begin),
                       descending.begin() + static_cast<long>(it->first.end));
      descending.insert(descending.begin() + static_cast<long>(it->first.begin),
                        it->second.begin(), it->second.end());
    }
    auto sets = ParseM2(m2);
    ASSERT_EQ(sets.size(), 1u);
    EXPECT_EQ(sets[0].references[0], descending) << m2;
    // Serialize and re-tokenize: idempotent.
    EXPECT_EQ(Tokenize(Join(sets[0].references[0])), sets[0].references[0]);
  }
}

TEST(ReadParallel, PairsLines) {
  auto pairs = ReadParallel("a b\nc\n", "a  b\n\n");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].second, (TokenSeq{"a", "b"}));
  EXPECT_TRUE(pairs[1].second.empty());
}

TEST(ReadParallel, LineCountMismatchCarriesCounts) {
  try {
    ReadParallel("a\nb\n", "a\nb\nc\n");
    FAIL() << "expected LineCountMismatch";
  } catch (const LineCountMismatch& e) {
    EXPECT_EQ(e.source_lines(), 2u);
    EXPECT_EQ(e.hypothesis_lines(), 3u);
  }
}

TEST(FilterUnchangedReferences, DropsIdentityReference) {
  ReferenceSet rs{{"a", "b"}, {{"a", "b"}, {"a", "c"}}, {"0", "1"}};
  ReferenceSet out = FilterUnchangedReferences(rs);
  ASSERT_EQ(out.references.size(), 1u);
  EXPECT_EQ(out.references[0], (TokenSeq{"a", "c"}));
  EXPECT_EQ(out.annotator_ids, (std::vector<std::string>{"1"}));
}

TEST(FilterUnchangedReferences, KeepsAllWhenAllUnchanged) {
  ReferenceSet rs{{"a"}, {{"a"}, {"a"}}, {}};
  EXPECT_EQ(FilterUnchangedReferences(rs).references.size(), 2u);
}

TEST(FilterUnchangedReferences, NeverEmpty) {
  std::mt19937 rng(3);
  for (int i = 0; i < 1000; ++i) {
    ReferenceSet rs;
    rs.source = testing::RandomSentence(rng, 4, 2);
    std::uniform_int_distribution<int> n(1, 3);
    for (int k = n(rng); k > 0; --k) {
      rs.references.push_back(testing::Mutate(rs.source, rng, 2));
    }
    EXPECT_FALSE(FilterUnchangedReferences(rs).references.empty());
  }
}

TEST(LoadWeights, ParsesRecordsAndComments) {
  WeightFile w = LoadWeights("# header\n0 4 0.028\n1\t2\t3\n\n");
  EXPECT_EQ(w.entries.size(), 2u);
  EXPECT_DOUBLE_EQ(*w.Lookup(0, 4), 0.028);
  EXPECT_DOUBLE_EQ(*w.Lookup(1, 2), 3.0);
  EXPECT_FALSE(w.Lookup(0, 0).has_value());
}

TEST(LoadWeights, EmptyFile) {
  EXPECT_TRUE(LoadWeights("").entries.empty());
}

TEST(LoadWeights, DuplicateLastWins) {
  WeightFile w = LoadWeights("0 1 0.5\n0 1 0.25\n");
  EXPECT_DOUBLE_EQ(*w.Lookup(0, 1), 0.25);
  EXPECT_EQ(w.duplicate_count, 1u);
}

TEST(LoadWeights, RejectsNegativeAndNonFinite) {
  for (const char* bad : {"0 1 -0.5\n", "0 0 1\n0 1 inf\n", "0 1 nan\n",
                          "0 1 x\n", "0 1\n"}) {
    EXPECT_THROW(LoadWeights(bad), ParseError) << bad;
  }
  try {
    LoadWeights("0 0 1\n0 1 -0.5\n");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadWeights, FormatRoundTripsAtSixDecimals) {
  WeightFile w;
  w.entries[{0, 4}] = 0.0281234;
  w.entries[{3, 1}] = 2.0;
  WeightFile back = LoadWeights(FormatWeights(w));
  EXPECT_NEAR(*back.Lookup(0, 4), 0.028123, 1e-12);
  EXPECT_DOUBLE_EQ(*back.Lookup(3, 1), 2.0);
}

TEST(ParseJudgments, ReadsOutcomes) {
  JudgmentSet j = ParseJudgments("# c\n1 AMU CAMB A\n2 CAMB UFC T\n3 AMU UFC B\n");
  EXPECT_EQ(j.systems, (std::vector<std::string>{"AMU", "CAMB", "UFC"}));
  ASSERT_EQ(j.comparisons.size(), 3u);
  EXPECT_EQ(j.comparisons[0].outcome, Outcome::kAWins);
  EXPECT_EQ(j.comparisons[1].outcome, Outcome::kTie);
  EXPECT_EQ(j.comparisons[2].outcome, Outcome::kBWins);
}

TEST(ParseJudgments, RejectsSelfComparisonAndBadOutcome) {
  EXPECT_THROW(ParseJudgments("1 A A A\n"), ParseError);
  EXPECT_THROW(ParseJudgments("1 A B W\n"), ParseError);
}

TEST(ReadFile, MissingFileIsIoError) {
  EXPECT_THROW(ReadFile("/nonexistent/cleme/file"), IoError);
}

}  // namespace
}  // namespace cleme
