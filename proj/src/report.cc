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

#include "cleme/report.h"

#include <fmt/format.h>

#include "cleme/corpus_io.h"

namespace cleme {

using nlohmann::ordered_json;

ordered_json ReportRecord(const SystemReport& r, std::string_view system) {
  ordered_json j;
  j["system"] = system;
  j["sentences"] = r.num_sentences;
  j["tp"] = r.counts.n_tp;
  j["fp_ne"] = r.counts.n_fpne;
  j["fp_un"] = r.counts.n_fpun;
  j["fn"] = r.counts.n_fn;
  j["w_tp"] = r.counts.w_tp;
  j["w_fp_ne"] = r.counts.w_fpne;
  j["w_fp_un"] = r.counts.w_fpun;
  j["w_fn"] = r.counts.w_fn;
  j["hit"] = r.scores.hit;
  j["wrong"] = r.scores.wrong;
  j["under"] = r.scores.under;
  j["over"] = r.scores.over;
  j["score"] = r.score;
  j["level"] = LevelName(r.config.level);
  j["assumption"] = AssumptionName(r.config.assumption);
  j["weighting"] = r.config.weighting;
  j["factors"] = {r.config.factors.a1(), r.config.factors.a2(),
                  r.config.factors.a3(), r.config.factors.a4()};
  j["exclude_unchanged_refs"] = r.config.exclude_unchanged_refs;
  return j;
}

std::string ReportText(const SystemReport& r, std::string_view system) {
  const auto& c = r.counts;
  const auto& s = r.scores;
  const auto& f = r.config.factors;
  std::string out;
  out += fmt::format("system={}\n", system);
  out += fmt::format("level={}\nassumption={}\nweighting={}\n",
                     LevelName(r.config.level),
                     AssumptionName(r.config.assumption), r.config.weighting);
  out += fmt::format("factors={},{},{},{}\n", f.a1(), f.a2(), f.a3(), f.a4());
  out += fmt::format("sentences={}\n", r.num_sentences);
  out += fmt::format("tp={}\nfp_ne={}\nfp_un={}\nfn={}\n", c.n_tp, c.n_fpne,
                     c.n_fpun, c.n_fn);
  out += fmt::format("w_tp={:.3f}\nw_fp_ne={:.3f}\nw_fp_un={:.3f}\nw_fn={:.3f}\n",
                     c.w_tp, c.w_fpne, c.w_fpun, c.w_fn);
  out += fmt::format("hit={:.3f}\nwrong={:.3f}\nunder={:.3f}\nover={:.3f}\n",
                     s.hit, s.wrong, s.under, s.over);
  out += fmt::format("score={:.3f}\n", r.score);
  return out;
}

LoadedReport ParseReportRecord(std::string_view json_text) {
  LoadedReport out;
  try {
    nlohmann::json j = nlohmann::json::parse(json_text);
    out.system = j.at("system").get<std::string>();
    out.assumption = j.at("assumption").get<std::string>();
    out.level = j.at("level").get<std::string>();
    out.weighting = j.at("weighting").get<std::string>();
    out.scores.hit = j.at("hit").get<double>();
    out.scores.wrong = j.at("wrong").get<double>();
    out.scores.under = j.at("under").get<double>();
    out.scores.over = j.at("over").get<double>();
    out.score = j.at("score").get<double>();
    const auto& f = j.at("factors");
    if (!f.is_array() || f.size() != 4) {
      throw ParseError(0, "bad report record: factors must hold four numbers");
    }
    for (std::size_t k = 0; k < 4; ++k) out.factors[k] = f[k].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("bad report record: ") + e.what());
  }
  return out;
}

ordered_json MetaRecords(const std::vector<MetaRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const MetaRow& r : rows) {
    ordered_json j;
    j["ranking"] = r.ranking;
    j["assumption"] = r.assumption;
    j["level"] = r.level;
    j["weighting"] = r.weighting;
    j["a1"] = r.a[0];
    j["a2"] = r.a[1];
    j["a3"] = r.a[2];
    j["a4"] = r.a[3];
    j["pearson"] = r.pearson;
    j["spearman"] = r.spearman;
    j["searched"] = r.searched;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string MetaTable(const std::vector<MetaRow>& rows) {
  std::string out = fmt::format("{:<8}{:<12}{:<10}{:<10}{:<24}{:>9}{:>9}\n",
                                "ranking", "assumption", "level", "weighting",
                                "factors", "pearson", "spearman");
  for (const MetaRow& r : rows) {
    std::string factors = fmt::format("{:.2f},{:.2f},{:.2f},{:.2f}{}", r.a[0],
                                      r.a[1], r.a[2], r.a[3],
                                      r.searched ? "*" : "");
    out += fmt::format("{:<8}{:<12}{:<10}{:<10}{:<24}{:>9.3f}{:>9.3f}\n",
                       r.ranking, r.assumption, r.level, r.weighting, factors,
                       r.pearson, r.spearman);
  }
  return out;
}

}  // namespace cleme
