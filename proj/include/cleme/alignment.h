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

#ifndef CLEME_ALIGNMENT_H_
#define CLEME_ALIGNMENT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "cleme/tokens.h"

namespace cleme {

enum class OpKind { kEqual, kSubstitute, kInsert, kDelete };

// A run of consecutive alignment steps of one kind.
struct AlignOp {
  OpKind kind = OpKind::kEqual;
  Span source;
  Span target;

  friend bool operator==(const AlignOp&, const AlignOp&) = default;
};

// Replaces source[span] with `target`. Pure insertion when span is empty.
struct Edit {
  Span source;
  TokenSeq target;

  friend bool operator==(const Edit&, const Edit&) = default;
};

// Minimal unit-cost Levenshtein alignment. Among equal-cost paths the
// backtrace, walking from the end, prefers equal, substitute, delete, insert.
// Consecutive steps of the same kind are merged into one op.
std::vector<AlignOp> AlignTokens(const TokenSeq& source, const TokenSeq& target);

// Sum of unit costs over the path.
std::size_t AlignmentCost(std::span<const AlignOp> ops);

// Merges each maximal run of non-equal ops into one Edit. `target` is the
// sequence the ops were aligned against.
std::vector<Edit> ExtractEdits(std::span<const AlignOp> ops,
                               const TokenSeq& target);

// Applies non-overlapping edits sorted by source position.
TokenSeq ApplyEdits(const TokenSeq& source, std::span<const Edit> edits);

}  // namespace cleme

#endif  // CLEME_ALIGNMENT_H_
