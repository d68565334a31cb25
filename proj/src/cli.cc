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

#include "cleme/cli.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "cleme/chunking.h"
#include "cleme/corpus_io.h"
#include "cleme/meta_eval.h"
#include "cleme/report.h"
#include "cleme/scoring.h"
#include "cleme/weighting.h"

namespace cleme {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Flag combinations that cannot run; exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputFile {
  std::string role;
  std::string path;
  std::string content;
};

InputFile Load(const std::string& role, const std::string& path) {
  return InputFile{role, path, ReadFile(path)};
}

// Re-raises a parse failure as `path:line: message`.
template <typename Fn>
auto WithPath(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(0, path + ":" + e.what());
  }
}

bool LooksLikeM2(const InputFile& f) {
  if (f.path.ends_with(".m2")) return true;
  for (std::string_view line : SplitLines(f.content)) {
    if (line.empty()) continue;
    return line.starts_with("S ");
  }
  return false;
}

struct CorpusOptions {
  std::string src;
  std::string hyp;
  std::vector<std::string> refs;
  bool exclude_unchanged = false;
};

struct LoadedCorpus {
  std::vector<CorpusEntry> entries;
  std::vector<InputFile> inputs;
};

LoadedCorpus LoadCorpus(const CorpusOptions& opt) {
  if (opt.refs.empty()) throw UsageError("--ref is required");
  LoadedCorpus out;
  std::vector<ReferenceSet> sets;

  std::optional<InputFile> src;
  if (!opt.src.empty()) src = Load("src", opt.src);
  std::vector<InputFile> refs;
  for (const std::string& p : opt.refs) refs.push_back(Load("ref", p));

  if (refs.size() == 1 && LooksLikeM2(refs[0])) {
    sets = WithPath(refs[0].path, [&] { return ParseM2(refs[0].content); });
    if (src) {
      std::vector<TokenSeq> lines = ReadTokenizedLines(src->content);
      if (lines.size() != sets.size()) {
        throw ParseError(0, fmt::format("{}: {} lines but {} has {} blocks",
                                        src->path, lines.size(), refs[0].path,
                                        sets.size()));
      }
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i] != sets[i].source) {
          throw ParseError(0, fmt::format("{}:{}: source differs from the "
                                          "M2 S line",
                                          src->path, i + 1));
        }
      }
    }
  } else {
    if (!src) throw UsageError("plain-text references need --src");
    std::vector<TokenSeq> sources = ReadTokenizedLines(src->content);
    sets.resize(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) sets[i].source = sources[i];
    for (const InputFile& r : refs) {
      std::vector<TokenSeq> lines = ReadTokenizedLines(r.content);
      if (lines.size() != sources.size()) {
        throw ParseError(0, fmt::format("{}: {} lines, expected {}", r.path,
                                        lines.size(), sources.size()));
      }
      for (std::size_t i = 0; i < lines.size(); ++i) {
        sets[i].references.push_back(std::move(lines[i]));
      }
    }
  }

  InputFile hyp = Load("hyp", opt.hyp);
  std::vector<TokenSeq> hyps = ReadTokenizedLines(hyp.content);
  if (hyps.size() != sets.size()) {
    throw LineCountMismatch(sets.size(), hyps.size());
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    out.entries.push_back(CorpusEntry{std::move(sets[i]), std::move(hyps[i])});
  }
  if (src) out.inputs.push_back(std::move(*src));
  out.inputs.push_back(std::move(hyp));
  for (InputFile& r : refs) out.inputs.push_back(std::move(r));
  return out;
}

TradeOffFactors ParseFactors(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  ss.imbue(std::locale::classic());
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--factors expects four numbers: " + text);
    }
  }
  if (v.size() != 4) throw UsageError("--factors expects four numbers: " + text);
  try {
    return TradeOffFactors(v[0], v[1], v[2], v[3]);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--factors: ") + e.what());
  }
}

void WriteFile(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("cannot write " + path.string());
}

std::string UtcTimestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json Manifest(const std::string& command, const ordered_json& config,
                      const std::vector<InputFile>& inputs) {
  ordered_json m;
  m["tool"] = "cleme";
  m["version"] = kVersion;
  m["command"] = command;
  m["timestamp"] = UtcTimestamp();
  m["config"] = config;
  ordered_json files = ordered_json::array();
  for (const InputFile& f : inputs) {
    files.push_back({{"role", f.role}, {"path", f.path},
                     {"sha256", Sha256Hex(f.content)}});
  }
  m["inputs"] = std::move(files);
  return m;
}

struct EvaluateOptions {
  CorpusOptions corpus;
  std::string assumption = "ind";
  std::string level = "sentence";
  std::string weighting = "unit";
  std::string weights;
  std::string factors;
  unsigned jobs = 1;
  std::string out_dir;
  std::string name;
  std::string llm_model;
  std::string llm_shape = "completion";
  double llm_temperature = 0.1;
  int llm_retries = 3;
  int llm_timeout_ms = 30000;
  std::size_t llm_concurrency = 4;
};

EvalConfig BuildConfig(const EvaluateOptions& o) {
  EvalConfig cfg;
  cfg.assumption = o.assumption == "dep" ? Assumption::kDependent
                                         : Assumption::kIndependent;
  cfg.level = o.level == "corpus" ? Level::kCorpus : Level::kSentence;
  cfg.factors = o.factors.empty()
                    ? (cfg.level == Level::kCorpus ? TradeOffFactors::CorpusDefault()
                                                   : TradeOffFactors::SentenceDefault())
                    : ParseFactors(o.factors);
  cfg.weighting = o.weighting;
  cfg.exclude_unchanged_refs = o.corpus.exclude_unchanged;
  return cfg;
}

WeightStrategy BuildStrategy(const EvaluateOptions& o) {
  WeightStrategy s;
  s.kind = ParseWeightingKind(o.weighting);
  if (s.kind == WeightingKind::kFile && o.weights.empty()) {
    throw UsageError("--weighting file needs --weights PATH");
  }
  if (s.kind != WeightingKind::kFile && !o.weights.empty()) {
    throw UsageError("--weights is only used with --weighting file");
  }
  s.weight_file = o.weights;
  if (s.kind == WeightingKind::kLlm) {
    s.llm = LlmClientConfig::FromEnvironment();
    if (!o.llm_model.empty()) s.llm.model = o.llm_model;
    s.llm.shape = o.llm_shape == "chat" ? RequestShape::kChat
                                        : RequestShape::kCompletion;
    s.llm.temperature = o.llm_temperature;
    s.llm.max_retries = o.llm_retries;
    s.llm.timeout = std::chrono::milliseconds(o.llm_timeout_ms);
    s.llm.max_concurrency = o.llm_concurrency;
    if (s.llm.endpoint.empty()) {
      throw UsageError("--weighting llm needs CLEME_LLM_ENDPOINT");
    }
  }
  return s;
}

int CmdEvaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  EvalConfig cfg = BuildConfig(o);
  WeightStrategy strategy = BuildStrategy(o);
  LoadedCorpus corpus = LoadCorpus(o.corpus);
  std::optional<WeightResolver> resolver;
  WithPath(o.weights, [&] { resolver.emplace(strategy); });
  SystemReport report =
      EvaluateSystem(corpus.entries, cfg, resolver->AsProvider(), o.jobs);

  std::string name = o.name.empty() ? fs::path(o.corpus.hyp).stem().string() : o.name;
  if (resolver->missing_count() > 0) {
    err << "warning: " << resolver->missing_count()
        << " edit columns had no weight in " << o.weights << "; used 1.0\n";
  }
  if (resolver->duplicate_count() > 0) {
    err << "warning: " << resolver->duplicate_count()
        << " duplicate weight entries; the last one was kept\n";
  }
  if (resolver->llm_fallback_count() > 0) {
    err << "warning: " << resolver->llm_fallback_count()
        << " LLM replies were unusable; used weight "
        << LlmClient::kDefaultWeight << "\n";
  }

  std::string text = ReportText(report, name);
  if (o.out_dir.empty()) {
    out << text;
    return 0;
  }
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  WriteFile(dir / "report.txt", text);
  WriteFile(dir / "report.json", ReportRecord(report, name).dump(2) + "\n");
  ordered_json config = ReportRecord(report, name);
  ordered_json echo;
  for (const char* key : {"level", "assumption", "weighting", "factors",
                          "exclude_unchanged_refs"}) {
    echo[key] = config[key];
  }
  echo["jobs"] = o.jobs;
  if (!o.weights.empty()) echo["weights"] = o.weights;
  std::vector<InputFile> inputs = corpus.inputs;
  if (!o.weights.empty()) inputs.push_back(Load("weights", o.weights));
  WriteFile(dir / "manifest.json", Manifest("evaluate", echo, inputs).dump(2) + "\n");
  out << text;
  return 0;
}

struct DumpOptions {
  CorpusOptions corpus;
  std::string out_path;
};

int CmdDumpChunks(const DumpOptions& o, std::ostream& out) {
  LoadedCorpus corpus = LoadCorpus(o.corpus);
  std::string dump;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const CorpusEntry& e = corpus.entries[i];
    const ReferenceSet refs = o.corpus.exclude_unchanged
                                  ? FilterUnchangedReferences(e.refs)
                                  : e.refs;
    ChunkAlignment ca = Partition(refs.source, e.hypothesis, refs.references);
    Classification dep = Classify(ca, Assumption::kDependent);
    dump += DumpChunks(ca, i, dep.chosen_reference);
  }
  if (o.out_path.empty()) {
    out << dump;
  } else {
    WriteFile(o.out_path, dump);
  }
  return 0;
}

struct MetaOptions {
  std::string judgments;
  std::vector<std::string> reports;
  std::string ranking = "both";
  bool search = false;
  double grid = 0.05;
  int ts_passes = 1;
  std::string out_dir;
};

int CmdMeta(const MetaOptions& o, std::ostream& out) {
  if (o.reports.size() < 2) throw UsageError("meta needs at least two --report");
  InputFile jfile = Load("judgments", o.judgments);
  JudgmentSet judgments = WithPath(jfile.path, [&] { return ParseJudgments(jfile.content); });

  std::vector<LoadedReport> reports;
  std::vector<InputFile> inputs{jfile};
  for (const std::string& spec : o.reports) {
    std::string name, path = spec;
    if (auto eq = spec.find('='); eq != std::string::npos) {
      name = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    }
    InputFile f = Load("report", path);
    LoadedReport r = WithPath(path, [&] { return ParseReportRecord(f.content); });
    if (!name.empty()) r.system = name;
    reports.push_back(std::move(r));
    inputs.push_back(std::move(f));
  }

  std::vector<std::pair<std::string, RankingScore>> rankings;
  if (o.ranking == "ew" || o.ranking == "both") {
    rankings.emplace_back("ew", ExpectedWins(judgments));
  }
  if (o.ranking == "ts" || o.ranking == "both") {
    rankings.emplace_back("ts", TrueSkillRank(judgments, {}, o.ts_passes));
  }

  std::vector<MetaRow> rows;
  for (const auto& [method, ranking] : rankings) {
    std::vector<double> human, metric;
    for (const LoadedReport& r : reports) {
      std::optional<double> h = ranking.ScoreOf(r.system);
      if (!h) {
        throw ParseError(0, fmt::format("{}: system '{}' has no {} score in "
                                        "the judgments",
                                        o.judgments, r.system, method));
      }
      human.push_back(*h);
      metric.push_back(r.score);
    }
    MetaRow row;
    row.ranking = method;
    row.assumption = reports[0].assumption;
    row.level = reports[0].level;
    row.weighting = reports[0].weighting;
    for (int k = 0; k < 4; ++k) row.a[k] = reports[0].factors[k];
    row.pearson = Pearson(metric, human);
    row.spearman = Spearman(metric, human);
    rows.push_back(row);
    if (o.search) {
      auto score_fn = [&](const TradeOffFactors& f) {
        std::vector<double> s;
        for (const LoadedReport& r : reports) s.push_back(Comprehensive(r.scores, f));
        return s;
      };
      GridSearchResult best = GridSearchFactors(score_fn, human, o.grid);
      MetaRow searched = row;
      for (int k = 0; k < 4; ++k) searched.a[k] = best.best[k];
      std::vector<double> s = score_fn(best.best);
      searched.pearson = best.pearson;
      searched.spearman = Spearman(s, human);
      searched.searched = true;
      rows.push_back(searched);
    }
  }

  std::string table = MetaTable(rows);
  out << table;
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    WriteFile(dir / "meta.txt", table);
    WriteFile(dir / "meta.json", MetaRecords(rows).dump(2) + "\n");
    ordered_json echo{{"ranking", o.ranking}, {"search_factors", o.search},
                      {"grid", o.grid}, {"ts_passes", o.ts_passes}};
    WriteFile(dir / "manifest.json", Manifest("meta", echo, inputs).dump(2) + "\n");
  }
  return 0;
}

void AddCorpusFlags(CLI::App* cmd, CorpusOptions& c) {
  cmd->add_option("--src", c.src, "Tokenized source sentences, one per line");
  cmd->add_option("--hyp", c.hyp, "Tokenized hypothesis sentences")->required();
  cmd->add_option("--ref", c.refs,
                  "An M2 file, or one plain-text reference file per annotator")
      ->required();
  cmd->add_flag("--exclude-unchanged-refs", c.exclude_unchanged,
                "Drop references identical to the source");
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Interpretable grammatical error correction evaluation", "cleme"};
  app.require_subcommand(1);

  EvaluateOptions eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score one system output");
  AddCorpusFlags(evaluate, eval.corpus);
  evaluate->add_option("--assumption", eval.assumption, "dep or ind")
      ->check(CLI::IsMember({"dep", "ind"}))
      ->capture_default_str();
  evaluate->add_option("--level", eval.level, "corpus or sentence")
      ->check(CLI::IsMember({"corpus", "sentence"}))
      ->capture_default_str();
  evaluate->add_option("--weighting", eval.weighting, "unit, length, file or llm")
      ->check(CLI::IsMember({"unit", "length", "file", "llm"}))
      ->capture_default_str();
  evaluate->add_option("--weights", eval.weights, "Weight file for --weighting file");
  evaluate->add_option("--factors", eval.factors,
                       "a1,a2,a3,a4 (default 0.45,0.35,0.15,0.05 for corpus, "
                       "0.35,0.25,0.20,0.20 for sentence)");
  evaluate->add_option("--jobs", eval.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--out", eval.out_dir, "Directory for report and manifest");
  evaluate->add_option("--name", eval.name, "System name (default: hyp file stem)");
  evaluate->add_option("--llm-model", eval.llm_model, "Model id (or CLEME_LLM_MODEL)");
  evaluate->add_option("--llm-shape", eval.llm_shape, "completion or chat")
      ->check(CLI::IsMember({"completion", "chat"}))
      ->capture_default_str();
  evaluate->add_option("--llm-temperature", eval.llm_temperature)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  evaluate->add_option("--llm-retries", eval.llm_retries)
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  evaluate->add_option("--llm-timeout-ms", eval.llm_timeout_ms)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--llm-concurrency", eval.llm_concurrency)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  DumpOptions dump;
  CLI::App* dump_cmd =
      app.add_subcommand("dump-chunks", "Write the chunk partition of a corpus");
  AddCorpusFlags(dump_cmd, dump.corpus);
  dump_cmd->add_option("--out", dump.out_path, "Output file (default stdout)");

  MetaOptions meta;
  CLI::App* meta_cmd =
      app.add_subcommand("meta", "Correlate system reports with human judgments");
  meta_cmd->add_option("--judgments", meta.judgments, "Pairwise judgment file")
      ->required();
  meta_cmd->add_option("--report", meta.reports,
                       "report.json of one system, optionally NAME=PATH")
      ->required();
  meta_cmd->add_option("--ranking", meta.ranking, "ew, ts or both")
      ->check(CLI::IsMember({"ew", "ts", "both"}))
      ->capture_default_str();
  meta_cmd->add_flag("--search-factors", meta.search,
                     "Grid-search trade-off factors");
  meta_cmd->add_option("--grid", meta.grid, "Grid step for --search-factors")
      ->capture_default_str();
  meta_cmd->add_option("--ts-passes", meta.ts_passes, "TrueSkill passes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  meta_cmd->add_option("--out", meta.out_dir, "Directory for records and manifest");

  CLI::App* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "cleme: " << e.what() << "\n";
    return 2;
  }

  try {
    if (version->parsed()) {
      out << "cleme " << kVersion << "\n";
      return 0;
    }
    if (evaluate->parsed()) return CmdEvaluate(eval, out, err);
    if (dump_cmd->parsed()) return CmdDumpChunks(dump, out);
    if (meta_cmd->parsed()) return CmdMeta(meta, out);
  } catch (const UsageError& e) {
    err << "cleme: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "cleme: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cleme
