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

#include "cleme/scoring.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace cleme {
namespace {

constexpr double kSimplexTolerance = 1e-9;

struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
};

ClassCounts Count(const std::vector<EditClass>& classes) {
  ClassCounts c;
  for (EditClass e : classes) {
    if (e == EditClass::kTP) ++c.tp;
    if (e == EditClass::kFPNe || e == EditClass::kFPUn) ++c.fp;
  }
  return c;
}

// Classification against the references listed in `refs`, any of which may
// be matched.
std::vector<EditClass> ClassifyAgainst(const ChunkAlignment& ca,
                                       std::span<const std::size_t> refs) {
  std::vector<EditClass> out(ca.num_columns(), EditClass::kTN);
  for (std::size_t c = 0; c < ca.num_columns(); ++c) {
    const Chunk& src = ca.source[c];
    const Chunk& hyp = ca.hypothesis[c];
    bool any_ref_edited = false;
    bool any_ref_unchanged = false;
    bool matched = false;
    for (std::size_t r : refs) {
      const Chunk& ref = ca.references[r][c];
      if (IsEdited(ref, src)) {
        any_ref_edited = true;
        if (ref.tokens == hyp.tokens) matched = true;
      } else {
        any_ref_unchanged = true;
      }
    }
    if (IsEdited(hyp, src)) {
      if (matched) {
        out[c] = EditClass::kTP;
      } else if (!any_ref_edited) {
        out[c] = EditClass::kFPUn;
      } else {
        out[c] = EditClass::kFPNe;
      }
    } else if (!any_ref_unchanged) {
      out[c] = EditClass::kFN;
    }
  }
  return out;
}

void CheckWeight(double w) {
  if (!std::isfinite(w) || w < 0.0) {
    throw std::invalid_argument(fmt::format("invalid edit weight {}", w));
  }
}

}  // namespace

const char* EditClassName(EditClass c) {
  switch (c) {
    case EditClass::kTP:
      return "TP";
    case EditClass::kFPNe:
      return "FP_NE";
    case EditClass::kFPUn:
      return "FP_UN";
    case EditClass::kFN:
      return "FN";
    case EditClass::kTN:
      return "TN";
  }
  return "?";
}

const char* AssumptionName(Assumption a) {
  return a == Assumption::kDependent ? "dep" : "ind";
}

const char* LevelName(Level l) {
  return l == Level::kCorpus ? "corpus" : "sentence";
}

WeightedCounts& WeightedCounts::operator+=(const WeightedCounts& o) {
  w_tp += o.w_tp;
  w_fpne += o.w_fpne;
  w_fpun += o.w_fpun;
  w_fn += o.w_fn;
  n_tp += o.n_tp;
  n_fpne += o.n_fpne;
  n_fpun += o.n_fpun;
  n_fn += o.n_fn;
  return *this;
}

TradeOffFactors::TradeOffFactors(double a1, double a2, double a3, double a4)
    : a_{a1, a2, a3, a4} {
  double sum = 0.0;
  for (double a : a_) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument(
          fmt::format("trade-off factor {} outside (0, 1)", a));
    }
    sum += a;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument(
        fmt::format("trade-off factors sum to {}, expected 1", sum));
  }
}

Classification Classify(const ChunkAlignment& ca, Assumption assumption) {
  const std::size_t num_refs = ca.references.size();
  Classification out;
  if (assumption == Assumption::kIndependent) {
    std::vector<std::size_t> all(num_refs);
    for (std::size_t r = 0; r < num_refs; ++r) all[r] = r;
    out.classes = ClassifyAgainst(ca, all);
    return out;
  }
  ClassCounts best_counts;
  for (std::size_t r = 0; r < num_refs; ++r) {
    const std::size_t one[] = {r};
    std::vector<EditClass> classes = ClassifyAgainst(ca, one);
    ClassCounts counts = Count(classes);
    bool better = !out.chosen_reference || counts.tp > best_counts.tp ||
                  (counts.tp == best_counts.tp && counts.fp < best_counts.fp);
    if (better) {
      out.classes = std::move(classes);
      out.chosen_reference = r;
      best_counts = counts;
    }
  }
  return out;
}

WeightedCounts Accumulate(std::span<const EditClass> classes,
                          std::span<const double> weights) {
  if (classes.size() != weights.size()) {
    throw std::invalid_argument(fmt::format(
        "{} weights for {} columns", weights.size(), classes.size()));
  }
  WeightedCounts c;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == EditClass::kTN) continue;
    double w = weights[i];
    CheckWeight(w);
    switch (classes[i]) {
      case EditClass::kTP:
        c.w_tp += w;
        ++c.n_tp;
        break;
      case EditClass::kFPNe:
        c.w_fpne += w;
        ++c.n_fpne;
        break;
      case EditClass::kFPUn:
        c.w_fpun += w;
        ++c.n_fpun;
        break;
      case EditClass::kFN:
        c.w_fn += w;
        ++c.n_fn;
        break;
      case EditClass::kTN:
        break;
    }
  }
  return c;
}

DisentangledScores Disentangle(const WeightedCounts& c) {
  DisentangledScores s;
  s.necessity = c.w_tp + c.w_fpne + c.w_fn;
  if (s.necessity > 0.0) {
    s.hit = c.w_tp / s.necessity;
    s.wrong = c.w_fpne / s.necessity;
    s.under = c.w_fn / s.necessity;
  } else {
    s.hit = 1.0;
  }
  const double proposed = c.w_tp + c.w_fpne + c.w_fpun;
  s.over = proposed > 0.0 ? c.w_fpun / proposed : 0.0;
  return s;
}

double Comprehensive(const DisentangledScores& s, const TradeOffFactors& f) {
  double score = f.a1() * s.hit + f.a2() * (1.0 - s.wrong) +
                 f.a3() * (1.0 - s.under) + f.a4() * (1.0 - s.over);
  return std::clamp(score, 0.0, 1.0);
}

SentenceError::SentenceError(std::size_t sentence_index, const std::string& what)
    : std::runtime_error(fmt::format("sentence {}: {}", sentence_index, what)),
      sentence_index_(sentence_index) {}

SentenceResult EvaluateSentence(const ReferenceSet& refs,
                                const TokenSeq& hypothesis,
                                std::size_t sentence_index,
                                const EvalConfig& cfg,
                                const WeightProvider& weights) {
  const ReferenceSet& used = cfg.exclude_unchanged_refs
                                 ? FilterUnchangedReferences(refs)
                                 : refs;
  if (used.references.empty()) {
    throw SentenceError(sentence_index, "no references");
  }
  SentenceResult out;
  out.alignment = Partition(used.source, hypothesis, used.references);
  out.classification = Classify(out.alignment, cfg.assumption);
  try {
    out.weights = weights(WeightRequest{sentence_index, used.source,
                                        out.alignment, out.classification});
    out.counts = Accumulate(out.classification.classes, out.weights);
  } catch (const SentenceError&) {
    throw;
  } catch (const std::exception& e) {
    throw SentenceError(sentence_index, e.what());
  }
  out.scores = Disentangle(out.counts);
  out.score = Comprehensive(out.scores, cfg.factors);
  return out;
}

SystemReport EvaluateSystem(std::span<const CorpusEntry> corpus,
                            const EvalConfig& cfg,
                            const WeightProvider& weights, unsigned jobs) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");

  struct Slot {
    WeightedCounts counts;
    DisentangledScores scores;
    double score = 0.0;
  };
  std::vector<Slot> slots(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        SentenceResult r = EvaluateSentence(corpus[i].refs, corpus[i].hypothesis,
                                            i, cfg, weights);
        slots[i] = Slot{r.counts, r.scores, r.score};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1,
                              static_cast<unsigned>(corpus.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SystemReport report;
  report.config = cfg;
  report.num_sentences = corpus.size();
  for (const Slot& s : slots) report.counts += s.counts;
  if (cfg.level == Level::kCorpus) {
    report.scores = Disentangle(report.counts);
    report.score = Comprehensive(report.scores, cfg.factors);
    return report;
  }
  const double n = static_cast<double>(slots.size());
  for (const Slot& s : slots) {
    report.scores.hit += s.scores.hit;
    report.scores.wrong += s.scores.wrong;
    report.scores.under += s.scores.under;
    report.scores.over += s.scores.over;
    report.score += s.score;
  }
  report.scores.hit /= n;
  report.scores.wrong /= n;
  report.scores.under /= n;
  report.scores.over /= n;
  report.scores.necessity =
      report.counts.w_tp + report.counts.w_fpne + report.counts.w_fn;
  report.score /= n;
  return report;
}

}  // namespace cleme
