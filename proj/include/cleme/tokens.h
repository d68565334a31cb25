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

#ifndef CLEME_TOKENS_H_
#define CLEME_TOKENS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cleme {

// A pre-tokenized sentence. Tokens are never empty and hold no whitespace.
using TokenSeq = std::vector<std::string>;

// Half-open token interval [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const Span&, const Span&) = default;
};

// Splits on any run of ASCII whitespace.
TokenSeq Tokenize(std::string_view line);

std::string Join(const TokenSeq& tokens, std::string_view sep = " ");

// Copies tokens[span.begin, span.end).
TokenSeq Slice(const TokenSeq& tokens, Span span);

}  // namespace cleme

#endif  // CLEME_TOKENS_H_
