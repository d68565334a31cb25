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

#ifndef CLEME_REPORT_H_
#define CLEME_REPORT_H_

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cleme/scoring.h"

namespace cleme {

inline constexpr std::string_view kVersion = "0.1.0";

// Machine-readable record for one system. Key order is fixed.
nlohmann::ordered_json ReportRecord(const SystemReport& report,
                                    std::string_view system);

// The same fields as `key=value` lines.
std::string ReportText(const SystemReport& report, std::string_view system);

// A system report read back from its record.
struct LoadedReport {
  std::string system;
  std::string assumption;
  std::string level;
  std::string weighting;
  DisentangledScores scores;
  double score = 0.0;
  double factors[4] = {0, 0, 0, 0};
};

// Throws ParseError on a missing or mistyped field.
LoadedReport ParseReportRecord(std::string_view json_text);

struct MetaRow {
  std::string ranking;  // "ew" or "ts"
  std::string assumption;
  std::string level;
  std::string weighting;
  double a[4] = {0, 0, 0, 0};
  double pearson = 0.0;
  double spearman = 0.0;
  bool searched = false;
};

nlohmann::ordered_json MetaRecords(const std::vector<MetaRow>& rows);

// Aligned text table, one row per configuration.
std::string MetaTable(const std::vector<MetaRow>& rows);

}  // namespace cleme

#endif  // CLEME_REPORT_H_
