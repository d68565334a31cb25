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

#ifndef CLEME_CORPUS_IO_H_
#define CLEME_CORPUS_IO_H_

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cleme/tokens.h"

namespace cleme {

// Raised for malformed input files. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LineCountMismatch : public std::runtime_error {
 public:
  LineCountMismatch(std::size_t source_lines, std::size_t hypothesis_lines);
  std::size_t source_lines() const { return source_lines_; }
  std::size_t hypothesis_lines() const { return hypothesis_lines_; }

 private:
  std::size_t source_lines_;
  std::size_t hypothesis_lines_;
};

struct ReferenceSet {
  TokenSeq source;
  std::vector<TokenSeq> references;
  // Empty, or one id per reference.
  std::vector<std::string> annotator_ids;
};

// Parses CoNLL-style M2 text. Every annotator id seen anywhere in the file
// yields one reference per block; an annotator without edits in a block
// contributes the unchanged source.
std::vector<ReferenceSet> ParseM2(std::string_view text);

// Splits text into lines (LF, trailing CR stripped). A final newline does not
// produce an extra empty line.
std::vector<std::string_view> SplitLines(std::string_view text);

std::vector<TokenSeq> ReadTokenizedLines(std::string_view text);

std::vector<std::pair<TokenSeq, TokenSeq>> ReadParallel(
    std::string_view source_lines, std::string_view hypothesis_lines);

// Drops references identical to the source unless that would drop all of
// them, in which case the set is returned as is.
ReferenceSet FilterUnchangedReferences(const ReferenceSet& rs);

struct WeightFile {
  // (sentence index, chunk column index) -> weight.
  std::map<std::pair<std::size_t, std::size_t>, double> entries;
  std::size_t duplicate_count = 0;

  std::optional<double> Lookup(std::size_t sentence, std::size_t column) const;
};

WeightFile LoadWeights(std::string_view text);

// Writes the shared weight-file format, 6 decimal places.
std::string FormatWeights(const WeightFile& weights);

enum class Outcome { kAWins, kBWins, kTie };

struct Comparison {
  std::string sentence_id;
  std::string system_a;
  std::string system_b;
  Outcome outcome = Outcome::kTie;
};

struct JudgmentSet {
  // Order of first appearance.
  std::vector<std::string> systems;
  std::vector<Comparison> comparisons;
};

JudgmentSet ParseJudgments(std::string_view text);

// Whole-file read; throws IoError naming the path.
std::string ReadFile(const std::string& path);

}  // namespace cleme

#endif  // CLEME_CORPUS_IO_H_
