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

#include "cleme/meta_eval.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

namespace cleme {
namespace {

double Pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double Cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Additive and multiplicative corrections for a win, x = t - eps.
double VWin(double t, double eps) {
  double x = t - eps;
  double denom = Cdf(x);
  if (denom < 1e-300) return -x;
  return Pdf(x) / denom;
}

double WWin(double t, double eps) {
  double v = VWin(t, eps);
  return v * (v + t - eps);
}

double VDraw(double t, double eps) {
  double denom = Cdf(eps - t) - Cdf(-eps - t);
  if (denom < 1e-300) return t < 0.0 ? -t - eps : -t + eps;
  return (Pdf(-eps - t) - Pdf(eps - t)) / denom;
}

double WDraw(double t, double eps) {
  double denom = Cdf(eps - t) - Cdf(-eps - t);
  if (denom < 1e-300) return 1.0;
  double v = VDraw(t, eps);
  return v * v + ((eps - t) * Pdf(eps - t) + (eps + t) * Pdf(eps + t)) / denom;
}

double DrawMargin(const TrueSkillParams& p) {
  if (p.draw_probability <= 0.0) return 0.0;
  boost::math::normal standard;
  return boost::math::quantile(standard, (p.draw_probability + 1.0) / 2.0) *
         std::sqrt(2.0) * p.beta;
}

void CheckPair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument(
        fmt::format("correlation inputs differ in length ({} vs {})", xs.size(),
                    ys.size()));
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("correlation needs at least two points");
  }
}

// Best grid point under `objective`; nullopt objective values are skipped.
template <typename Objective>
GridSearchResult SearchGrid(const Objective& objective, double step) {
  std::vector<TradeOffFactors> grid = FactorGrid(step);
  std::optional<std::size_t> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::optional<double> v = objective(grid[i]);
    if (v && *v > best_value) {
      best_value = *v;
      best = i;
    }
  }
  if (!best) throw std::invalid_argument("no grid point yields a correlation");
  return GridSearchResult{grid[*best], best_value, grid.size()};
}

std::optional<double> SafePearson(std::span<const double> xs,
                                  std::span<const double> ys) {
  try {
    return Pearson(xs, ys);
  } catch (const UndefinedCorrelation&) {
    return std::nullopt;
  }
}

}  // namespace

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  CheckPair(xs, ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelation("correlation is undefined for constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> FractionalRanks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    // positions i..j (0-based) share ranks i+1..j+1
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  CheckPair(xs, ys);
  std::vector<double> rx = FractionalRanks(xs);
  std::vector<double> ry = FractionalRanks(ys);
  return Pearson(rx, ry);
}

std::optional<double> RankingScore::ScoreOf(const std::string& system) const {
  for (std::size_t i = 0; i < systems.size(); ++i) {
    if (systems[i] == system && defined[i]) return scores[i];
  }
  return std::nullopt;
}

std::vector<std::string> RankingScore::RankOrder() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    if (defined[i]) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return systems[a] < systems[b];
  });
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(systems[i]);
  return out;
}

RankingScore ExpectedWins(const JudgmentSet& judgments) {
  const std::size_t n = judgments.systems.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[judgments.systems[i]] = i;
  // wins[i][j]: decisive wins of i over j
  std::vector<std::vector<std::size_t>> wins(n, std::vector<std::size_t>(n, 0));
  for (const Comparison& c : judgments.comparisons) {
    auto a = index.find(c.system_a);
    auto b = index.find(c.system_b);
    if (a == index.end() || b == index.end()) {
      throw std::invalid_argument("comparison names an unknown system");
    }
    if (c.outcome == Outcome::kAWins) ++wins[a->second][b->second];
    if (c.outcome == Outcome::kBWins) ++wins[b->second][a->second];
  }
  RankingScore out;
  out.systems = judgments.systems;
  out.scores.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.defined.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t opponents = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t decisive = wins[i][j] + wins[j][i];
      if (decisive == 0) continue;
      sum += static_cast<double>(wins[i][j]) / static_cast<double>(decisive);
      ++opponents;
    }
    if (opponents > 0) {
      out.scores[i] = sum / static_cast<double>(opponents);
      out.defined[i] = true;
    }
  }
  return out;
}

void TrueSkillParams::Validate() const {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (!(draw_probability >= 0.0 && draw_probability < 1.0)) {
    throw std::invalid_argument("draw probability must be in [0, 1)");
  }
}

void TrueSkillUpdate(Rating& winner, Rating& loser, bool draw,
                     const TrueSkillParams& p) {
  const double eps_abs = DrawMargin(p);
  // Zero draw margin makes a draw carry no information.
  if (draw && eps_abs == 0.0) return;
  double var_w = winner.sigma * winner.sigma + p.tau * p.tau;
  double var_l = loser.sigma * loser.sigma + p.tau * p.tau;
  const double c = std::sqrt(2.0 * p.beta * p.beta + var_w + var_l);
  const double t = (winner.mu - loser.mu) / c;
  const double eps = eps_abs / c;
  const double v = draw ? VDraw(t, eps) : VWin(t, eps);
  const double w = draw ? WDraw(t, eps) : WWin(t, eps);
  winner.mu += var_w / c * v;
  loser.mu -= var_l / c * v;
  winner.sigma = std::sqrt(var_w * std::max(1.0 - var_w / (c * c) * w, 1e-12));
  loser.sigma = std::sqrt(var_l * std::max(1.0 - var_l / (c * c) * w, 1e-12));
}

std::vector<Rating> TrueSkillRatings(const JudgmentSet& judgments,
                                     const TrueSkillParams& params, int passes) {
  params.Validate();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < judgments.systems.size(); ++i) {
    index[judgments.systems[i]] = i;
  }
  std::vector<Rating> ratings(judgments.systems.size(),
                              Rating{params.mu0, params.sigma0});
  for (int pass = 0; pass < passes; ++pass) {
    for (const Comparison& c : judgments.comparisons) {
      auto a = index.find(c.system_a);
      auto b = index.find(c.system_b);
      if (a == index.end() || b == index.end()) {
        throw std::invalid_argument("comparison names an unknown system");
      }
      Rating& ra = ratings[a->second];
      Rating& rb = ratings[b->second];
      switch (c.outcome) {
        case Outcome::kAWins:
          TrueSkillUpdate(ra, rb, false, params);
          break;
        case Outcome::kBWins:
          TrueSkillUpdate(rb, ra, false, params);
          break;
        case Outcome::kTie:
          TrueSkillUpdate(ra, rb, true, params);
          break;
      }
    }
  }
  return ratings;
}

RankingScore TrueSkillRank(const JudgmentSet& judgments,
                           const TrueSkillParams& params, int passes) {
  std::vector<Rating> ratings = TrueSkillRatings(judgments, params, passes);
  RankingScore out;
  out.systems = judgments.systems;
  for (const Rating& r : ratings) {
    out.scores.push_back(r.mu - 3.0 * r.sigma);
    out.defined.push_back(true);
  }
  return out;
}

std::vector<TradeOffFactors> FactorGrid(double step) {
  if (!(step > 0.0) || step >= 1.0) {
    throw std::invalid_argument(fmt::format("grid step {} outside (0, 1)", step));
  }
  const long units = std::lround(1.0 / step);
  if (std::abs(static_cast<double>(units) * step - 1.0) > 1e-9) {
    throw std::invalid_argument(fmt::format("grid step {} does not divide 1", step));
  }
  if (units < 4) {
    throw std::invalid_argument(fmt::format("grid step {} leaves no grid point", step));
  }
  const double u = static_cast<double>(units);
  std::vector<TradeOffFactors> grid;
  for (long i1 = 1; i1 <= units - 3; ++i1) {
    for (long i2 = 1; i2 <= units - i1 - 2; ++i2) {
      for (long i3 = 1; i3 <= units - i1 - i2 - 1; ++i3) {
        const long i4 = units - i1 - i2 - i3;
        grid.emplace_back(i1 / u, i2 / u, i3 / u, i4 / u);
      }
    }
  }
  return grid;
}

GridSearchResult GridSearchFactors(const FactorScoreFn& score_fn,
                                   std::span<const double> human, double step) {
  return SearchGrid(
      [&](const TradeOffFactors& f) {
        std::vector<double> scores = score_fn(f);
        return SafePearson(scores, human);
      },
      step);
}

CrossEvalResult CrossEvaluateFactors(std::span<const FactorScoreFn> per_set,
                                     std::span<const double> human,
                                     double step) {
  if (per_set.size() < 2) {
    throw std::invalid_argument("cross-evaluation needs at least two sets");
  }
  CrossEvalResult out;
  std::optional<double> best_held_out;
  for (std::size_t k = 0; k < per_set.size(); ++k) {
    GridSearchResult fold = SearchGrid(
        [&](const TradeOffFactors& f) -> std::optional<double> {
          double sum = 0.0;
          for (std::size_t s = 0; s < per_set.size(); ++s) {
            if (s == k) continue;
            std::optional<double> r = SafePearson(per_set[s](f), human);
            if (!r) return std::nullopt;
            sum += *r;
          }
          return sum / static_cast<double>(per_set.size() - 1);
        },
        step);
    std::optional<double> held = SafePearson(per_set[k](fold.best), human);
    double held_value = held.value_or(-1.0);
    out.folds.push_back({k, fold.best, fold.pearson, held_value});
    if (!best_held_out || held_value > *best_held_out) {
      best_held_out = held_value;
      out.best = fold.best;
    }
  }
  return out;
}

}  // namespace cleme
