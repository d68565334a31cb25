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

#include "cleme/alignment.h"

#include <algorithm>
#include <stdexcept>

namespace cleme {
namespace {

struct Step {
  OpKind kind;
  std::size_t i;  // source position before the step
  std::size_t j;  // target position before the step
};

std::size_t SourceWidth(OpKind k) {
  return k == OpKind::kInsert ? 0 : 1;
}
std::size_t TargetWidth(OpKind k) {
  return k == OpKind::kDelete ? 0 : 1;
}

}  // namespace

std::vector<AlignOp> AlignTokens(const TokenSeq& source, const TokenSeq& target) {
  const std::size_t n = source.size();
  const std::size_t m = target.size();
  const std::size_t width = m + 1;
  std::vector<std::size_t> cost((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * width + j];
  };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t diag = at(i - 1, j - 1) + (source[i - 1] == target[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  std::vector<Step> steps;
  steps.reserve(n + m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = at(i, j);
    if (i > 0 && j > 0) {
      bool same = source[i - 1] == target[j - 1];
      if (same && at(i - 1, j - 1) == here) {
        steps.push_back({OpKind::kEqual, --i, --j});
        continue;
      }
      if (!same && at(i - 1, j - 1) + 1 == here) {
        steps.push_back({OpKind::kSubstitute, --i, --j});
        continue;
      }
    }
    if (i > 0 && at(i - 1, j) + 1 == here) {
      steps.push_back({OpKind::kDelete, --i, j});
      continue;
    }
    steps.push_back({OpKind::kInsert, i, --j});
  }
  std::reverse(steps.begin(), steps.end());

  std::vector<AlignOp> ops;
  for (const Step& s : steps) {
    std::size_t si = s.i + SourceWidth(s.kind);
    std::size_t tj = s.j + TargetWidth(s.kind);
    if (!ops.empty() && ops.back().kind == s.kind) {
      ops.back().source.end = si;
      ops.back().target.end = tj;
    } else {
      ops.push_back({s.kind, Span{s.i, si}, Span{s.j, tj}});
    }
  }
  return ops;
}

std::size_t AlignmentCost(std::span<const AlignOp> ops) {
  std::size_t total = 0;
  for (const AlignOp& op : ops) {
    if (op.kind == OpKind::kEqual) continue;
    total += std::max(op.source.size(), op.target.size());
  }
  return total;
}

std::vector<Edit> ExtractEdits(std::span<const AlignOp> ops,
                               const TokenSeq& target) {
  std::vector<Edit> edits;
  bool open = false;
  Span src, tgt;
  auto flush = [&] {
    if (!open) return;
    edits.push_back({src, Slice(target, tgt)});
    open = false;
  };
  for (const AlignOp& op : ops) {
    if (op.kind == OpKind::kEqual) {
      flush();
      continue;
    }
    if (!open) {
      src = op.source;
      tgt = op.target;
      open = true;
    } else {
      src.end = op.source.end;
      tgt.end = op.target.end;
    }
  }
  flush();
  return edits;
}

TokenSeq ApplyEdits(const TokenSeq& source, std::span<const Edit> edits) {
  TokenSeq out;
  std::size_t cursor = 0;
  for (const Edit& e : edits) {
    if (e.source.begin < cursor || e.source.end > source.size() ||
        e.source.begin > e.source.end) {
      throw std::invalid_argument("edits must be sorted and non-overlapping");
    }
    out.insert(out.end(), source.begin() + static_cast<long>(cursor),
               source.begin() + static_cast<long>(e.source.begin));
    out.insert(out.end(), e.target.begin(), e.target.end());
    cursor = e.source.end;
  }
  out.insert(out.end(), source.begin() + static_cast<long>(cursor), source.end());
  return out;
}

}  // namespace cleme
