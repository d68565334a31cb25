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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace cleme {
namespace {

constexpr std::string_view kM2Sep = "|||";

std::vector<std::string_view> SplitOn(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = s.find(sep, pos);
    if (hit == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, hit - pos));
    pos = hit + sep.size();
  }
}

bool ParseLong(std::string_view s, long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseSize(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

struct M2Edit {
  Span span;
  TokenSeq correction;
  std::size_t line = 0;
};

struct M2Block {
  TokenSeq source;
  std::size_t line = 0;
  // annotator id -> edits in file order
  std::map<std::string, std::vector<M2Edit>> edits;
};

TokenSeq ApplyM2Edits(const M2Block& block, std::vector<M2Edit> edits) {
  std::stable_sort(edits.begin(), edits.end(),
                   [](const M2Edit& a, const M2Edit& b) {
                     return a.span.begin < b.span.begin;
                   });
  for (std::size_t i = 1; i < edits.size(); ++i) {
    const Span& prev = edits[i - 1].span;
    const Span& cur = edits[i].span;
    if (cur.begin < prev.end) {
      throw ParseError(edits[i].line,
                       fmt::format("edit span {} {} overlaps span {} {}",
                                   cur.begin, cur.end, prev.begin, prev.end));
    }
  }
  TokenSeq out;
  std::size_t cursor = 0;
  for (const M2Edit& e : edits) {
    out.insert(out.end(), block.source.begin() + static_cast<long>(cursor),
               block.source.begin() + static_cast<long>(e.span.begin));
    out.insert(out.end(), e.correction.begin(), e.correction.end());
    cursor = e.span.end;
  }
  out.insert(out.end(), block.source.begin() + static_cast<long>(cursor),
             block.source.end());
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, what) : what),
      line_(line) {}

LineCountMismatch::LineCountMismatch(std::size_t source_lines,
                                     std::size_t hypothesis_lines)
    : std::runtime_error(fmt::format(
          "line count mismatch: source has {} lines, hypothesis has {}",
          source_lines, hypothesis_lines)),
      source_lines_(source_lines),
      hypothesis_lines_(hypothesis_lines) {}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  if (text.empty()) return lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(pos)
                                : text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::vector<TokenSeq> ReadTokenizedLines(std::string_view text) {
  std::vector<TokenSeq> out;
  for (std::string_view line : SplitLines(text)) out.push_back(Tokenize(line));
  return out;
}

std::vector<ReferenceSet> ParseM2(std::string_view text) {
  std::vector<M2Block> blocks;
  std::set<std::string> annotators;
  bool in_block = false;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    if (IsBlank(line)) {
      in_block = false;
      continue;
    }
    if (line.starts_with("S ") || line == "S") {
      blocks.push_back(M2Block{Tokenize(line.substr(1)), line_no, {}});
      in_block = true;
      continue;
    }
    if (!line.starts_with("A ")) {
      throw ParseError(line_no, "expected an S or A line");
    }
    if (!in_block) throw ParseError(line_no, "A line outside a block");
    std::vector<std::string_view> fields = SplitOn(line.substr(2), kM2Sep);
    if (fields.size() < 3) {
      throw ParseError(line_no, "A line needs span|||type|||correction");
    }
    TokenSeq span_fields = Tokenize(fields[0]);
    long start = 0, end = 0;
    if (span_fields.size() != 2 || !ParseLong(span_fields[0], start) ||
        !ParseLong(span_fields[1], end)) {
      throw ParseError(line_no, "malformed edit span");
    }
    std::string annotator = "0";
    if (fields.size() >= 6) {
      TokenSeq id = Tokenize(fields[5]);
      if (!id.empty()) annotator = id[0];
    }
    annotators.insert(annotator);
    M2Block& block = blocks.back();
    auto& edits = block.edits[annotator];  // registers the annotator
    std::string_view type = fields[1];
    if (type == "noop" || (start == -1 && end == -1)) continue;
    if (start < 0 || end < 0 || start > end ||
        static_cast<std::size_t>(end) > block.source.size()) {
      throw ParseError(line_no, fmt::format("malformed span {} {} for a "
                                            "{}-token source",
                                            start, end, block.source.size()));
    }
    TokenSeq correction = Tokenize(fields[2]);
    if (correction.size() == 1 && correction[0] == "-NONE-") correction.clear();
    edits.push_back(M2Edit{Span{static_cast<std::size_t>(start),
                                static_cast<std::size_t>(end)},
                           std::move(correction), line_no});
  }

  // Numeric ids sort numerically.
  std::vector<std::string> ids(annotators.begin(), annotators.end());
  std::stable_sort(ids.begin(), ids.end(),
                   [](const std::string& a, const std::string& b) {
                     long x = 0, y = 0;
                     bool nx = ParseLong(a, x), ny = ParseLong(b, y);
                     if (nx && ny) return x < y;
                     if (nx != ny) return nx;
                     return a < b;
                   });

  std::vector<ReferenceSet> out;
  out.reserve(blocks.size());
  for (const M2Block& block : blocks) {
    ReferenceSet rs;
    rs.source = block.source;
    if (ids.empty()) {
      rs.references.push_back(block.source);
    } else {
      for (const std::string& id : ids) {
        auto it = block.edits.find(id);
        rs.references.push_back(it == block.edits.end()
                                    ? block.source
                                    : ApplyM2Edits(block, it->second));
        rs.annotator_ids.push_back(id);
      }
    }
    out.push_back(std::move(rs));
  }
  return out;
}

std::vector<std::pair<TokenSeq, TokenSeq>> ReadParallel(
    std::string_view source_lines, std::string_view hypothesis_lines) {
  std::vector<TokenSeq> src = ReadTokenizedLines(source_lines);
  std::vector<TokenSeq> hyp = ReadTokenizedLines(hypothesis_lines);
  if (src.size() != hyp.size()) throw LineCountMismatch(src.size(), hyp.size());
  std::vector<std::pair<TokenSeq, TokenSeq>> out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.emplace_back(std::move(src[i]), std::move(hyp[i]));
  }
  return out;
}

ReferenceSet FilterUnchangedReferences(const ReferenceSet& rs) {
  ReferenceSet out;
  out.source = rs.source;
  for (std::size_t i = 0; i < rs.references.size(); ++i) {
    if (rs.references[i] == rs.source) continue;
    out.references.push_back(rs.references[i]);
    if (!rs.annotator_ids.empty()) out.annotator_ids.push_back(rs.annotator_ids[i]);
  }
  if (out.references.empty()) return rs;
  return out;
}

std::optional<double> WeightFile::Lookup(std::size_t sentence,
                                         std::size_t column) const {
  auto it = entries.find({sentence, column});
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

WeightFile LoadWeights(std::string_view text) {
  WeightFile out;
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    TokenSeq fields = Tokenize(line);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected `sentence column weight`");
    }
    std::size_t sentence = 0, column = 0;
    if (!ParseSize(fields[0], sentence) || !ParseSize(fields[1], column)) {
      throw ParseError(line_no, "sentence and column must be non-negative "
                                "integers");
    }
    double weight = 0.0;
    const std::string& field = fields[2];
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), weight);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw ParseError(line_no, "weight is not a number: " + field);
    }
    if (!std::isfinite(weight) || weight < 0.0) {
      throw ParseError(line_no, "weight must be finite and non-negative: " +
                                    fields[2]);
    }
    auto [it, inserted] = out.entries.insert_or_assign({sentence, column}, weight);
    if (!inserted) ++out.duplicate_count;
  }
  return out;
}

std::string FormatWeights(const WeightFile& weights) {
  std::string out;
  for (const auto& [key, w] : weights.entries) {
    out += fmt::format("{}\t{}\t{:.6f}\n", key.first, key.second, w);
  }
  return out;
}

JudgmentSet ParseJudgments(std::string_view text) {
  JudgmentSet out;
  std::set<std::string> seen;
  auto note = [&](const std::string& s) {
    if (seen.insert(s).second) out.systems.push_back(s);
  };
  std::size_t line_no = 0;
  for (std::string_view line : SplitLines(text)) {
    ++line_no;
    TokenSeq fields = Tokenize(line);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (fields.size() != 4) {
      throw ParseError(line_no,
                       "expected `sentence_id system_a system_b outcome`");
    }
    Comparison c{fields[0], fields[1], fields[2], Outcome::kTie};
    if (c.system_a == c.system_b) {
      throw ParseError(line_no, "a system cannot be compared with itself");
    }
    if (fields[3] == "A") {
      c.outcome = Outcome::kAWins;
    } else if (fields[3] == "B") {
      c.outcome = Outcome::kBWins;
    } else if (fields[3] == "T") {
      c.outcome = Outcome::kTie;
    } else {
      throw ParseError(line_no, "outcome must be A, B or T");
    }
    note(c.system_a);
    note(c.system_b);
    out.comparisons.push_back(std::move(c));
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

}  // namespace cleme
