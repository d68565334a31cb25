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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cleme/corpus_io.h"
#include "cleme/report.h"
#include "cleme/scoring.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace cleme {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using nlohmann::json;

const std::string kData = CLEME_TEST_DATA_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cleme");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("cleme_cli_") + info->name() + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Write(const std::string& name, const std::string& content) {
    fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  static json ReadJson(const std::string& path) { return json::parse(ReadFile(path)); }

  std::vector<std::string> Case1(std::vector<std::string> extra = {}) {
    std::vector<std::string> a{"evaluate", "--src", kData + "/example1.src",
                               "--ref", kData + "/example1.ref", "--hyp",
                               kData + "/example1.hyp"};
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  }

  fs::path dir_;
};

TEST_F(CliTest, Version) {
  Result r = Cli({"version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "cleme 0.1.0\n");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli(Case1({"--assumption", "both"})).code, 2);
  EXPECT_EQ(Cli(Case1({"--jobs", "0"})).code, 2);
  EXPECT_EQ(Cli({"evaluate", "--hyp", "x"}).code, 2);

  Result no_weights = Cli(Case1({"--weighting", "file"}));
  EXPECT_EQ(no_weights.code, 2);
  EXPECT_THAT(no_weights.err, HasSubstr("--weights"));
  EXPECT_EQ(Cli(Case1({"--weights", kData + "/example1.weights"})).code, 2);
  EXPECT_EQ(Cli(Case1({"--factors", "0.5,0.5"})).code, 2);
  EXPECT_EQ(Cli(Case1({"--factors", "0.5,0.5,0,0"})).code, 2);
  EXPECT_EQ(Cli(Case1({"--factors", "a,b,c,d"})).code, 2);
  EXPECT_EQ(Cli({"evaluate", "--ref", kData + "/example1.ref", "--hyp",
                 kData + "/example1.hyp"})
                .code,
            2);
}

TEST_F(CliTest, InputErrorsExitOne) {
  Result missing = Cli(Case1({"--weighting", "file", "--weights", Path("missing.tsv")}));
  EXPECT_EQ(missing.code, 1);
  EXPECT_THAT(missing.err, HasSubstr("missing.tsv"));

  std::string bad = Write("bad.weights", "0\t0\n");
  Result malformed = Cli(Case1({"--weighting", "file", "--weights", bad}));
  EXPECT_EQ(malformed.code, 1);
  EXPECT_THAT(malformed.err, HasSubstr("bad.weights:line 1"));

  std::string two = Write("two.hyp", "a\nb\n");
  EXPECT_EQ(Cli({"evaluate", "--src", kData + "/example1.src", "--ref",
                 kData + "/example1.ref", "--hyp", two})
                .code,
            1);
  EXPECT_EQ(Cli({"evaluate", "--src", kData + "/example1.src", "--ref",
                 kData + "/example1.ref", "--hyp", Path("nope.hyp")})
                .code,
            1);
}

TEST_F(CliTest, EvaluateWorkedExampleWithFileWeights) {
  Result r = Cli(Case1({"--assumption", "dep", "--level", "corpus", "--weighting",
                        "file", "--weights", kData + "/example1.weights",
                        "--out", Path("out")}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_THAT(r.out, HasSubstr("hit=0.000\nwrong=0.789\nunder=0.211\nover=0.000\n"));
  EXPECT_THAT(r.out, HasSubstr("score=0.242\n"));
  EXPECT_EQ(r.err, "");

  json rep = ReadJson(Path("out/report.json"));
  EXPECT_EQ(rep["system"], "example1");
  EXPECT_EQ(rep["fn"], 1);
  EXPECT_EQ(rep["fp_ne"], 2);
  EXPECT_NEAR(rep["w_fp_ne"].get<double>(), 0.105, 1e-12);
  EXPECT_EQ(rep["level"], "corpus");
  EXPECT_EQ(rep["factors"], json({0.45, 0.35, 0.15, 0.05}));
  EXPECT_EQ(ReadFile(Path("out/report.txt")), r.out);

  json man = ReadJson(Path("out/manifest.json"));
  EXPECT_EQ(man["command"], "evaluate");
  EXPECT_EQ(man["version"], "0.1.0");
  EXPECT_EQ(man["config"]["assumption"], "dep");
  ASSERT_EQ(man["inputs"].size(), 4u);
  for (const auto& in : man["inputs"]) {
    EXPECT_EQ(in["sha256"], Sha256Hex(ReadFile(in["path"].get<std::string>())));
  }
}

TEST_F(CliTest, MissingWeightColumnsWarn) {
  std::string partial = Write("partial.weights", "0\t0\t0.5\n0\t0\t0.6\n");
  Result r = Cli(Case1({"--weighting", "file", "--weights", partial}));
  EXPECT_EQ(r.code, 0);
  EXPECT_THAT(r.err, HasSubstr("2 edit columns had no weight"));
  EXPECT_THAT(r.err, HasSubstr("1 duplicate weight entries"));
}

TEST_F(CliTest, Sha256KnownVector) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, SingleSentenceLevelsAgree) {
  for (const char* a : {"dep", "ind"}) {
    ASSERT_EQ(Cli(Case1({"--assumption", a, "--level", "corpus", "--out", Path("c")})).code, 0);
    ASSERT_EQ(Cli(Case1({"--assumption", a, "--level", "sentence", "--out", Path("s")})).code, 0);
    json c = ReadJson(Path("c/report.json")), s = ReadJson(Path("s/report.json"));
    for (const char* k : {"hit", "wrong", "under", "over", "tp", "fp_ne", "fp_un", "fn"}) {
      EXPECT_EQ(c[k], s[k]) << k;
    }
    ASSERT_EQ(Cli(Case1({"--assumption", a, "--level", "sentence", "--factors",
                         "0.45,0.35,0.15,0.05", "--out", Path("s2")}))
                  .code,
              0);
    EXPECT_EQ(c["score"], ReadJson(Path("s2/report.json"))["score"]);
  }
}

TEST_F(CliTest, M2AndPlainReferencesAgree) {
  std::string m2 = Write(
      "case1.m2",
      "S Do one who suffered from this disease keep it a secret of infrom their "
      "relatives ?\n"
      "A 0 1|||R:VERB:SVA|||Does|||REQUIRED|||-NONE-|||0\n"
      "A 3 4|||R:VERB:TENSE|||suffers|||REQUIRED|||-NONE-|||0\n"
      "A 11 13|||R:OTHER|||or inform|||REQUIRED|||-NONE-|||0\n\n");
  ASSERT_EQ(Cli({"evaluate", "--ref", m2, "--hyp", kData + "/example1.hyp",
                 "--out", Path("m2")})
                .code,
            0);
  ASSERT_EQ(Cli(Case1({"--out", Path("plain")})).code, 0);
  EXPECT_EQ(ReadFile(Path("m2/report.json")), ReadFile(Path("plain/report.json")));

  std::string other_src = Write("other.src", "Something else entirely\n");
  EXPECT_EQ(Cli({"evaluate", "--src", other_src, "--ref", m2, "--hyp",
                 kData + "/example1.hyp"})
                .code,
            1);
}

TEST_F(CliTest, JobsDoNotChangeReport) {
  std::mt19937 rng(41);
  std::string src, ref, hyp;
  for (int i = 0; i < 60; ++i) {
    TokenSeq s = testing::RandomSentence(rng, 10, 6);
    if (s.empty()) s = {"w0"};
    src += Join(s) + "\n";
    ref += Join(testing::Mutate(s, rng)) + "\n";
    hyp += Join(testing::Mutate(s, rng)) + "\n";
  }
  std::vector<std::string> base{"evaluate", "--src", Write("c.src", src), "--ref",
                                Write("c.ref", ref), "--hyp", Write("c.hyp", hyp),
                                "--weighting", "length"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  ASSERT_EQ(Cli(with({"--jobs", "1", "--out", Path("j1")})).code, 0);
  ASSERT_EQ(Cli(with({"--jobs", "8", "--out", Path("j8")})).code, 0);
  EXPECT_EQ(ReadFile(Path("j1/report.json")), ReadFile(Path("j8/report.json")));
  json m1 = ReadJson(Path("j1/manifest.json")), m8 = ReadJson(Path("j8/manifest.json"));
  EXPECT_EQ(m1["inputs"], m8["inputs"]);
}

TEST_F(CliTest, DumpChunks) {
  Result r = Cli({"dump-chunks", "--src", kData + "/example1.src", "--ref",
                  kData + "/example1.ref", "--hyp", kData + "/example1.hyp"});
  ASSERT_EQ(r.code, 0);
  std::vector<std::string_view> lines = SplitLines(r.out);
  EXPECT_EQ(lines[0], "#S\t0\t0\t6");
  EXPECT_EQ(std::count_if(lines.begin(), lines.end(),
                          [](std::string_view l) { return !l.empty(); }),
            7);

  std::string same = Write("same.txt", "a b c\nd e\n");
  Result id = Cli({"dump-chunks", "--src", same, "--ref", same, "--hyp", same,
                   "--out", Path("id.dump")});
  ASSERT_EQ(id.code, 0);
  EXPECT_EQ(ReadFile(Path("id.dump")),
            "#S\t0\t0\t1\n0\tSRC:a b c\tHYP:UNCHANGED:a b c\tREF0:UNCHANGED:a b c\n"
            "#S\t1\t0\t1\n0\tSRC:d e\tHYP:UNCHANGED:d e\tREF0:UNCHANGED:d e\n");
}

// Stand-in for the weighting sidecar: reads the dump, writes a weight for
// every column where any sequence departs from the source.
std::string StubSidecar(const std::string& dump, double weight) {
  WeightFile wf;
  long sentence = -1;
  for (std::string_view line : SplitLines(dump)) {
    if (line.empty()) continue;
    if (line.starts_with("#S\t")) {
      sentence = std::stol(std::string(line.substr(3, line.find('\t', 3) - 3)));
      continue;
    }
    std::size_t col = std::stoul(std::string(line.substr(0, line.find('\t'))));
    bool change = line.find(":CORRECTED:") != std::string_view::npos ||
                  line.find(":DUMMY:") != std::string_view::npos;
    if (change) wf.entries[{static_cast<std::size_t>(sentence), col}] = weight;
  }
  return FormatWeights(wf);
}

TEST_F(CliTest, DumpSidecarEvaluateRoundTrip) {
  ASSERT_EQ(Cli({"dump-chunks", "--src", kData + "/example2.src", "--ref",
                 kData + "/example2.ref", "--hyp", kData + "/example2.hyp",
                 "--out", Path("c2.dump")})
                .code,
            0);
  std::string weights = Write("c2.weights", StubSidecar(ReadFile(Path("c2.dump")), 0.25));
  EXPECT_EQ(LoadWeights(ReadFile(weights)).entries.size(), 4u);

  std::vector<std::string> args{"evaluate", "--src", kData + "/example2.src",
                                "--ref", kData + "/example2.ref", "--hyp",
                                kData + "/example2.hyp", "--assumption", "dep",
                                "--level", "corpus"};
  std::vector<std::string> file_args = args;
  for (const char* a : {"--weighting", "file", "--weights"}) file_args.push_back(a);
  file_args.push_back(weights);
  file_args.push_back("--out");
  file_args.push_back(Path("file"));
  Result r = Cli(file_args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err, "");
  args.push_back("--out");
  args.push_back(Path("unit"));
  ASSERT_EQ(Cli(args).code, 0);
  json f = ReadJson(Path("file/report.json")), u = ReadJson(Path("unit/report.json"));
  EXPECT_NEAR(f["w_tp"].get<double>(), 0.25, 1e-12);
  for (const char* k : {"hit", "wrong", "under", "over"}) {
    EXPECT_NEAR(f[k].get<double>(), u[k].get<double>(), 1e-12) << k;
  }
}

class MetaCliTest : public CliTest {
 protected:
  std::string Report(const std::string& name, const WeightedCounts& c,
                     std::optional<double> score = std::nullopt) {
    SystemReport r;
    r.config.level = Level::kCorpus;
    r.config.factors = TradeOffFactors::CorpusDefault();
    r.num_sentences = 1;
    r.counts = c;
    r.scores = Disentangle(c);
    r.score = score ? *score : Comprehensive(r.scores, r.config.factors);
    return Write(name + ".json", ReportRecord(r, name).dump(2));
  }

  std::string Judgments() {
    std::string text = "# id a b outcome\n";
    for (const Comparison& c : testing::HitDominantJudgments().comparisons) {
      text += c.sentence_id + " " + c.system_a + " " + c.system_b + " B\n";
    }
    return Write("judgments.txt", text);
  }

  std::vector<std::string> SyntheticReports() {
    std::vector<std::string> out;
    int i = 1;
    for (const auto& s : testing::HitDominantSystems()) {
      WeightedCounts c;
      c.w_tp = c.n_tp = s.tp;
      c.w_fpne = c.n_fpne = s.fpne;
      c.w_fpun = c.n_fpun = s.fpun;
      c.w_fn = c.n_fn = s.fn;
      out.push_back(Report("s" + std::to_string(i++), c));
    }
    return out;
  }
};

TEST_F(MetaCliTest, PerfectAndReversedMetric) {
  std::string j = Judgments();
  std::vector<std::string> up, down;
  for (int i = 0; i < 4; ++i) {
    std::string name = "s" + std::to_string(i + 1);
    up.push_back(Report("up_" + name, {}, i / 3.0));
    down.push_back(Report("down_" + name, {}, 1.0 - i / 3.0));
  }
  auto meta = [&](const std::vector<std::string>& paths, const std::string& out) {
    std::vector<std::string> a{"meta", "--judgments", j, "--ranking", "ew", "--out",
                               Path(out)};
    for (int i = 0; i < 4; ++i) {
      a.push_back("--report");
      a.push_back("s" + std::to_string(i + 1) + "=" + paths[i]);
    }
    return Cli(a);
  };
  ASSERT_EQ(meta(up, "up").code, 0);
  json rows = ReadJson(Path("up/meta.json"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0]["pearson"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(rows[0]["spearman"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(rows[0]["a1"], 0.45);
  ASSERT_EQ(meta(down, "down").code, 0);
  rows = ReadJson(Path("down/meta.json"));
  EXPECT_NEAR(rows[0]["pearson"].get<double>(), -1.0, 1e-12);
  EXPECT_NEAR(rows[0]["spearman"].get<double>(), -1.0, 1e-12);
  EXPECT_TRUE(fs::exists(Path("down/meta.txt")));
  EXPECT_EQ(ReadJson(Path("down/manifest.json"))["inputs"].size(), 5u);
}

TEST_F(MetaCliTest, SearchFactorsFindsHitDominantTuple) {
  std::vector<std::string> a{"meta", "--judgments", Judgments(), "--ranking", "ew",
                             "--search-factors", "--out", Path("m")};
  for (const auto& p : SyntheticReports()) {
    a.push_back("--report");
    a.push_back(p);
  }
  Result fine = Cli(a);
  ASSERT_EQ(fine.code, 0) << fine.err;
  json rows = ReadJson(Path("m/meta.json"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[1]["searched"].get<bool>());
  EXPECT_NEAR(rows[1]["a1"].get<double>(), 0.85, 1e-12);
  EXPECT_GT(rows[1]["pearson"].get<double>(), rows[0]["pearson"].get<double>());
  EXPECT_THAT(fine.out, HasSubstr("0.85,0.05,0.05,0.05*"));

  a.push_back("--grid");
  a.push_back("0.25");
  Result coarse = Cli(a);
  ASSERT_EQ(coarse.code, 0);
  EXPECT_THAT(coarse.out, HasSubstr("0.25,0.25,0.25,0.25*"));
}

TEST_F(MetaCliTest, Errors) {
  std::vector<std::string> reports = SyntheticReports();
  std::string j = Judgments();
  EXPECT_EQ(Cli({"meta", "--judgments", j, "--report", reports[0]}).code, 2);
  Result unknown = Cli({"meta", "--judgments", j, "--report", reports[0], "--report",
                        "ghost=" + reports[1]});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_THAT(unknown.err, HasSubstr("ghost"));
  std::string bad = Write("bad.txt", "1 s1 s1 A\n");
  EXPECT_EQ(Cli({"meta", "--judgments", bad, "--report", reports[0], "--report",
                 reports[1]})
                .code,
            1);
  EXPECT_EQ(Cli({"meta", "--judgments", j, "--report", reports[0], "--report",
                 reports[1], "--search-factors", "--grid", "0.3"})
                .code,
            1);
}

TEST_F(MetaCliTest, TrueSkillAndBothRankings) {
  std::vector<std::string> a{"meta", "--judgments", Judgments(), "--out", Path("b")};
  for (const auto& p : SyntheticReports()) {
    a.push_back("--report");
    a.push_back(p);
  }
  ASSERT_EQ(Cli(a).code, 0);
  json rows = ReadJson(Path("b/meta.json"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["ranking"], "ew");
  EXPECT_EQ(rows[1]["ranking"], "ts");
}

}  // namespace
}  // namespace cleme
