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

#ifndef CLEME_META_EVAL_H_
#define CLEME_META_EVAL_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cleme/corpus_io.h"
#include "cleme/scoring.h"

namespace cleme {

class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Product-moment correlation. Throws UndefinedCorrelation for constant
// input, and std::invalid_argument for unequal lengths or n < 2.
double Pearson(std::span<const double> xs, std::span<const double> ys);

// 1-based ranks; ties share the average rank.
std::vector<double> FractionalRanks(std::span<const double> xs);

double Spearman(std::span<const double> xs, std::span<const double> ys);

struct RankingScore {
  std::vector<std::string> systems;
  std::vector<double> scores;
  // False where the ranking method could not score the system.
  std::vector<bool> defined;

  std::optional<double> ScoreOf(const std::string& system) const;
  // Defined systems by descending score, ties by name.
  std::vector<std::string> RankOrder() const;
};

// Mean decisive win rate against each opponent met in at least one
// decisive comparison. Ties are ignored.
RankingScore ExpectedWins(const JudgmentSet& judgments);

struct TrueSkillParams {
  double mu0 = 25.0;
  double sigma0 = 25.0 / 3.0;
  double beta = 25.0 / 6.0;
  double tau = 25.0 / 300.0;
  double draw_probability = 0.10;

  void Validate() const;
};

struct Rating {
  double mu = 0.0;
  double sigma = 0.0;
};

// Two-player update. With `draw` the winner/loser roles only fix the sign.
void TrueSkillUpdate(Rating& winner, Rating& loser, bool draw,
                     const TrueSkillParams& p);

// Sequential updates in comparison order (`passes` times); the score is the
// conservative estimate mu - 3 sigma.
RankingScore TrueSkillRank(const JudgmentSet& judgments,
                           const TrueSkillParams& params = {},
                           int passes = 1);

std::vector<Rating> TrueSkillRatings(const JudgmentSet& judgments,
                                     const TrueSkillParams& params = {},
                                     int passes = 1);

// Every (a1..a4) with each a_i a positive multiple of `step` summing to 1, in
// lexicographic order. Throws std::invalid_argument when step does not
// divide 1 or leaves no grid point.
std::vector<TradeOffFactors> FactorGrid(double step);

// Per-system metric scores for the given factors.
using FactorScoreFn =
    std::function<std::vector<double>(const TradeOffFactors&)>;

struct GridSearchResult {
  TradeOffFactors best = TradeOffFactors::CorpusDefault();
  double pearson = 0.0;
  std::size_t evaluated = 0;
};

// Grid point with the highest Pearson correlation against `human`. The first
// point in lexicographic order wins ties. Points whose scores are constant
// are skipped.
GridSearchResult GridSearchFactors(const FactorScoreFn& score_fn,
                                   std::span<const double> human, double step);

struct CrossEvalFold {
  std::size_t held_out = 0;
  TradeOffFactors factors = TradeOffFactors::CorpusDefault();
  double train_pearson = 0.0;
  double held_out_pearson = 0.0;
};

struct CrossEvalResult {
  std::vector<CrossEvalFold> folds;
  TradeOffFactors best = TradeOffFactors::CorpusDefault();
};

// Leave-one-out over reference sets: each fold searches the grid on the
// mean Pearson of the remaining sets; the result is the fold optimum with
// the best held-out correlation.
CrossEvalResult CrossEvaluateFactors(std::span<const FactorScoreFn> per_set,
                                     std::span<const double> human,
                                     double step);

}  // namespace cleme

#endif  // CLEME_META_EVAL_H_
