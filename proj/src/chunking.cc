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

#include "cleme/chunking.h"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "cleme/alignment.h"

namespace cleme {
namespace {

// Where each source boundary lands in one target. For boundary p, `before`
// is the target index ahead of any insertion at p and `after` the index past
// it.
struct BoundaryMap {
  std::vector<std::size_t> before;
  std::vector<std::size_t> after;
};

BoundaryMap MapBoundaries(std::span<const AlignOp> ops, std::size_t n) {
  BoundaryMap map{std::vector<std::size_t>(n + 1, 0),
                  std::vector<std::size_t>(n + 1, 0)};
  for (const AlignOp& op : ops) {
    if (op.kind == OpKind::kInsert) {
      map.after[op.source.begin] = op.target.end;
      continue;
    }
    for (std::size_t p = op.source.begin + 1; p <= op.source.end; ++p) {
      std::size_t k = op.kind == OpKind::kDelete
                          ? op.target.begin
                          : op.target.begin + (p - op.source.begin);
      map.before[p] = k;
      map.after[p] = k;
    }
  }
  return map;
}

struct TargetView {
  const TokenSeq* tokens;
  BoundaryMap map;
};

ChunkKind KindFor(const TokenSeq& tokens, const TokenSeq& source_tokens) {
  if (tokens.empty()) return ChunkKind::kDummy;
  return tokens == source_tokens ? ChunkKind::kUnchanged : ChunkKind::kCorrected;
}

}  // namespace

bool IsEdited(const Chunk& target, const Chunk& source) {
  return target.tokens != source.tokens;
}

bool ChunkAlignment::IsChangeColumn(std::size_t column) const {
  const Chunk& src = source.at(column);
  if (IsEdited(hypothesis.at(column), src)) return true;
  return std::any_of(references.begin(), references.end(),
                     [&](const std::vector<Chunk>& ref) {
                       return IsEdited(ref.at(column), src);
                     });
}

ChunkAlignment Partition(const TokenSeq& source, const TokenSeq& hypothesis,
                         std::span<const TokenSeq> references) {
  if (references.empty()) {
    throw std::invalid_argument("partition needs at least one reference");
  }
  const std::size_t n = source.size();

  std::vector<TargetView> targets;
  std::vector<Span> regions;
  auto add_target = [&](const TokenSeq& t) {
    std::vector<AlignOp> ops = AlignTokens(source, t);
    for (const Edit& e : ExtractEdits(ops, t)) regions.push_back(e.source);
    targets.push_back({&t, MapBoundaries(ops, n)});
  };
  add_target(hypothesis);
  for (const TokenSeq& r : references) add_target(r);

  // Closed-interval merge: touching spans (including zero-width ones) join.
  std::sort(regions.begin(), regions.end(), [](Span a, Span b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
  });
  std::vector<Span> merged;
  for (Span s : regions) {
    if (!merged.empty() && s.begin <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }

  ChunkAlignment ca;
  ca.references.resize(references.size());
  auto emit = [&](Span span, bool change) {
    TokenSeq src = Slice(source, span);
    ca.source_spans.push_back(span);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const TargetView& view = targets[t];
      Chunk chunk;
      if (change) {
        chunk.tokens = Slice(*view.tokens, Span{view.map.before[span.begin],
                                                view.map.after[span.end]});
      } else {
        chunk.tokens = src;
      }
      chunk.kind = KindFor(chunk.tokens, src);
      if (t == 0) {
        ca.hypothesis.push_back(std::move(chunk));
      } else {
        ca.references[t - 1].push_back(std::move(chunk));
      }
    }
    ChunkKind src_kind = src.empty() ? ChunkKind::kDummy : ChunkKind::kUnchanged;
    ca.source.push_back(Chunk{std::move(src), src_kind});
  };

  std::size_t pos = 0;
  for (Span region : merged) {
    if (pos < region.begin) emit(Span{pos, region.begin}, false);
    emit(region, true);
    pos = region.end;
  }
  if (pos < n) emit(Span{pos, n}, false);
  return ca;
}

ColumnKinds GetColumnKinds(const ChunkAlignment& ca, std::size_t column) {
  if (column >= ca.num_columns()) {
    throw std::out_of_range(fmt::format("column {} out of range ({} columns)",
                                        column, ca.num_columns()));
  }
  ColumnKinds out;
  out.hypothesis = ca.hypothesis[column].kind;
  for (const auto& ref : ca.references) out.references.push_back(ref[column].kind);
  return out;
}

TokenSeq Reconstruct(std::span<const Chunk> chunks) {
  TokenSeq out;
  for (const Chunk& c : chunks) out.insert(out.end(), c.tokens.begin(), c.tokens.end());
  return out;
}

const char* ChunkKindName(ChunkKind kind) {
  switch (kind) {
    case ChunkKind::kUnchanged:
      return "UNCHANGED";
    case ChunkKind::kCorrected:
      return "CORRECTED";
    case ChunkKind::kDummy:
      return "DUMMY";
  }
  return "?";
}

std::string DumpChunks(const ChunkAlignment& ca, std::size_t sentence_index,
                       std::optional<std::size_t> chosen_ref) {
  std::string out = fmt::format(
      "#S\t{}\t{}\t{}\n", sentence_index,
      chosen_ref ? static_cast<long>(*chosen_ref) : -1L, ca.num_columns());
  for (std::size_t c = 0; c < ca.num_columns(); ++c) {
    out += fmt::format("{}\tSRC:{}\tHYP:{}:{}", c, Join(ca.source[c].tokens),
                       ChunkKindName(ca.hypothesis[c].kind),
                       Join(ca.hypothesis[c].tokens));
    for (std::size_t r = 0; r < ca.references.size(); ++r) {
      out += fmt::format("\tREF{}:{}:{}", r, ChunkKindName(ca.references[r][c].kind),
                         Join(ca.references[r][c].tokens));
    }
    out += '\n';
  }
  return out;
}

}  // namespace cleme
