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

#ifndef CLEME_WEIGHTING_H_
#define CLEME_WEIGHTING_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cleme/alignment.h"
#include "cleme/chunking.h"
#include "cleme/corpus_io.h"
#include "cleme/scoring.h"

namespace cleme {

std::vector<double> UnitWeights(const ChunkAlignment& ca);

// max(source, hypothesis, reference) chunk length per column, at least 1.
// Without a chosen reference the longest reference chunk is used.
std::vector<double> LengthWeights(const ChunkAlignment& ca,
                                  std::optional<std::size_t> chosen_ref);

enum class RequestShape { kCompletion, kChat };

struct LlmClientConfig {
  std::string endpoint;  // e.g. http://localhost:8000/v1/completions
  std::string model;
  std::string api_key;
  double temperature = 0.1;
  int max_retries = 3;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_concurrency = 4;
  RequestShape shape = RequestShape::kCompletion;

  // CLEME_LLM_ENDPOINT, CLEME_LLM_API_KEY, CLEME_LLM_MODEL.
  static LlmClientConfig FromEnvironment();
};

class LlmError : public std::runtime_error {
 public:
  LlmError(std::size_t edit_index, const std::string& what);
  std::size_t edit_index() const { return edit_index_; }

 private:
  std::size_t edit_index_;
};

// `source -> target` with an empty side written as ε.
std::string FormatEdit(const TokenSeq& source_tokens,
                       const TokenSeq& target_tokens);

// The edit-importance prompt with the sentence and edit filled in.
std::string BuildEditPrompt(const TokenSeq& sentence, std::string_view edit);

// First integer in the reply, if any.
std::optional<int> ParseScoreReply(std::string_view reply);

// Sends a JSON request body, returns the response body. Throws on transport
// failure.
using LlmTransport = std::function<std::string(const std::string& body)>;

LlmTransport MakeHttpTransport(const LlmClientConfig& cfg);

// Scores edits one request at a time, under a shared concurrency bound.
class LlmClient {
 public:
  static constexpr int kDefaultWeight = 3;

  explicit LlmClient(LlmClientConfig cfg);
  LlmClient(LlmClientConfig cfg, LlmTransport transport);

  std::string BuildRequestBody(const std::string& prompt) const;
  // Text of the first choice, for either request shape.
  std::string ExtractReplyText(const std::string& response_body) const;

  // One weight in 1..5 per edit, in edit order.
  std::vector<double> WeighEdits(const TokenSeq& sentence,
                                 const std::vector<std::string>& edits);

  std::size_t fallback_count() const { return fallbacks_.load(); }

 private:
  int WeighOne(const TokenSeq& sentence, const std::string& edit,
               std::size_t index);

  LlmClientConfig cfg_;
  LlmTransport transport_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
  std::atomic<std::size_t> fallbacks_{0};
};

// The edit sent to the LLM for each column; empty string for TN columns.
// A hypothesis edit when the hypothesis changes the column, otherwise the
// chosen (or first edited) reference's edit.
std::vector<std::string> ColumnEdits(const ChunkAlignment& ca,
                                     const Classification& cls);

enum class WeightingKind { kUnit, kLength, kFile, kLlm };

WeightingKind ParseWeightingKind(std::string_view name);
const char* WeightingKindName(WeightingKind kind);

struct WeightStrategy {
  WeightingKind kind = WeightingKind::kUnit;
  std::string weight_file;  // kFile
  LlmClientConfig llm;      // kLlm
};

// Dispatches to a strategy. Safe to call from several threads.
class WeightResolver {
 public:
  // kFile loads the weight file here; a bad file throws IoError/ParseError.
  explicit WeightResolver(const WeightStrategy& strategy);
  // kFile from already-parsed weights.
  explicit WeightResolver(WeightFile weights);
  // kLlm with a caller-supplied transport.
  WeightResolver(LlmClientConfig cfg, LlmTransport transport);

  std::vector<double> Resolve(const WeightRequest& request);

  WeightProvider AsProvider();

  WeightingKind kind() const { return kind_; }
  std::size_t missing_count() const { return missing_.load(); }
  std::size_t duplicate_count() const { return weights_.duplicate_count; }
  std::size_t llm_fallback_count() const {
    return llm_ ? llm_->fallback_count() : 0;
  }

 private:
  WeightingKind kind_;
  WeightFile weights_;
  std::unique_ptr<LlmClient> llm_;
  std::atomic<std::size_t> missing_{0};
};

}  // namespace cleme

#endif  // CLEME_WEIGHTING_H_
