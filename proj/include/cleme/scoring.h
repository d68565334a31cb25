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

#ifndef CLEME_SCORING_H_
#define CLEME_SCORING_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cleme/chunking.h"
#include "cleme/corpus_io.h"

namespace cleme {

enum class EditClass { kTP, kFPNe, kFPUn, kFN, kTN };

const char* EditClassName(EditClass c);

// Raw counts and weighted masses of the four edit types.
struct WeightedCounts {
  double w_tp = 0.0;
  double w_fpne = 0.0;
  double w_fpun = 0.0;
  double w_fn = 0.0;
  std::size_t n_tp = 0;
  std::size_t n_fpne = 0;
  std::size_t n_fpun = 0;
  std::size_t n_fn = 0;

  WeightedCounts& operator+=(const WeightedCounts& other);
  friend bool operator==(const WeightedCounts&, const WeightedCounts&) = default;
};

struct DisentangledScores {
  double hit = 0.0;
  double wrong = 0.0;
  double under = 0.0;
  double over = 0.0;
  // w_tp + w_fpne + w_fn.
  double necessity = 0.0;
};

class TradeOffFactors {
 public:
  // Throws std::invalid_argument unless every factor is in (0, 1) and the
  // sum is 1 within 1e-9.
  TradeOffFactors(double a1, double a2, double a3, double a4);

  static TradeOffFactors CorpusDefault() { return {0.45, 0.35, 0.15, 0.05}; }
  static TradeOffFactors SentenceDefault() { return {0.35, 0.25, 0.20, 0.20}; }

  double a1() const { return a_[0]; }
  double a2() const { return a_[1]; }
  double a3() const { return a_[2]; }
  double a4() const { return a_[3]; }
  double operator[](std::size_t i) const { return a_[i]; }

  friend bool operator==(const TradeOffFactors&, const TradeOffFactors&) = default;

 private:
  double a_[4];
};

enum class Assumption { kDependent, kIndependent };
enum class Level { kCorpus, kSentence };

const char* AssumptionName(Assumption a);
const char* LevelName(Level l);

struct Classification {
  std::vector<EditClass> classes;
  // Set under the dependence assumption.
  std::optional<std::size_t> chosen_reference;
};

// Dependence: classify against each reference alone and keep the reference
// with the most TPs (then fewest FPs, then lowest index). Independence: a
// hypothesis edit may match any reference.
Classification Classify(const ChunkAlignment& ca, Assumption assumption);

// Throws std::invalid_argument on size mismatch or a negative/non-finite
// weight on a non-TN column.
WeightedCounts Accumulate(std::span<const EditClass> classes,
                          std::span<const double> weights);

// With no necessary edits hit is 1 and wrong/under are 0; with no hypothesis
// edits over is 0.
DisentangledScores Disentangle(const WeightedCounts& c);

double Comprehensive(const DisentangledScores& s, const TradeOffFactors& f);

// What a weight provider sees for one sentence.
struct WeightRequest {
  std::size_t sentence_index = 0;
  const TokenSeq& source;
  const ChunkAlignment& alignment;
  const Classification& classification;
};

// Returns one weight per column of the alignment.
using WeightProvider = std::function<std::vector<double>(const WeightRequest&)>;

struct EvalConfig {
  Assumption assumption = Assumption::kIndependent;
  Level level = Level::kSentence;
  TradeOffFactors factors = TradeOffFactors::SentenceDefault();
  std::string weighting = "unit";
  bool exclude_unchanged_refs = false;
};

struct SentenceResult {
  ChunkAlignment alignment;
  Classification classification;
  std::vector<double> weights;
  WeightedCounts counts;
  DisentangledScores scores;
  double score = 0.0;
};

struct SystemReport {
  EvalConfig config;
  std::size_t num_sentences = 0;
  // Summed over the corpus at both levels.
  WeightedCounts counts;
  // Corpus level: from the pooled counts. Sentence level: per-sentence mean.
  DisentangledScores scores;
  double score = 0.0;
};

// Thrown when the weight provider fails for a sentence.
class SentenceError : public std::runtime_error {
 public:
  SentenceError(std::size_t sentence_index, const std::string& what);
  std::size_t sentence_index() const { return sentence_index_; }

 private:
  std::size_t sentence_index_;
};

SentenceResult EvaluateSentence(const ReferenceSet& refs,
                                const TokenSeq& hypothesis,
                                std::size_t sentence_index,
                                const EvalConfig& cfg,
                                const WeightProvider& weights);

struct CorpusEntry {
  ReferenceSet refs;
  TokenSeq hypothesis;
};

// Sentences are evaluated on up to `jobs` threads; the fold runs in sentence
// order so the result does not depend on `jobs`.
SystemReport EvaluateSystem(std::span<const CorpusEntry> corpus,
                            const EvalConfig& cfg,
                            const WeightProvider& weights, unsigned jobs = 1);

}  // namespace cleme

#endif  // CLEME_SCORING_H_
