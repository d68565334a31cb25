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

#ifndef CLEME_CHUNKING_H_
#define CLEME_CHUNKING_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cleme/tokens.h"

namespace cleme {

enum class ChunkKind { kUnchanged, kCorrected, kDummy };

struct Chunk {
  TokenSeq tokens;
  ChunkKind kind = ChunkKind::kUnchanged;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

// Source, hypothesis and every reference cut into the same number of
// columns. Column c covers source tokens `source_spans[c]`.
struct ChunkAlignment {
  std::vector<Span> source_spans;
  std::vector<Chunk> source;
  std::vector<Chunk> hypothesis;
  std::vector<std::vector<Chunk>> references;

  std::size_t num_columns() const { return source.size(); }

  // True when at least one sequence edits this column.
  bool IsChangeColumn(std::size_t column) const;
};

// A target chunk is an edit when its tokens differ from the source chunk.
// An empty chunk over an empty source span is not an edit even though its
// kind is DUMMY.
bool IsEdited(const Chunk& target, const Chunk& source);

ChunkAlignment Partition(const TokenSeq& source, const TokenSeq& hypothesis,
                         std::span<const TokenSeq> references);

struct ColumnKinds {
  ChunkKind hypothesis = ChunkKind::kUnchanged;
  std::vector<ChunkKind> references;
};

// Throws std::out_of_range for a bad column.
ColumnKinds GetColumnKinds(const ChunkAlignment& ca, std::size_t column);

// Concatenation of a chunk list's tokens.
TokenSeq Reconstruct(std::span<const Chunk> chunks);

const char* ChunkKindName(ChunkKind kind);

// One header line `#S<TAB>index<TAB>chosen_ref<TAB>num_columns` followed by
// one line per column:
//   col<TAB>SRC:tokens<TAB>HYP:kind:tokens<TAB>REF0:kind:tokens...
// `chosen_ref` is -1 when no reference was selected.
std::string DumpChunks(const ChunkAlignment& ca, std::size_t sentence_index,
                       std::optional<std::size_t> chosen_ref);

}  // namespace cleme

#endif  // CLEME_CHUNKING_H_
