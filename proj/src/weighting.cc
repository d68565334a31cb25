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

#include "cleme/weighting.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

namespace cleme {
namespace {

using nlohmann::json;

constexpr std::string_view kPromptHead =
    "As an evaluator for grammatical error correction, you are tasked with "
    "assessing the importance of each error. You will be provided with two "
    "lines: the first is an uncorrected sentence, the second shows the edit. "
    "Then you output the importance score of the given edit.\n"
    "\n"
    "The scores range from 1 to 5, where a higher score reflects the greater "
    "significance of the correction, while a lower score indicates minor "
    "importance.\n"
    "\n"
    "  - A score of 1 means the correction is almost negligible and "
    "unnecessary.\n"
    "  - A score of 2 means the correction has slight influence.\n"
    "  - A score of 3 signifies some impact by the correction.\n"
    "  - A score of 4 means the edit is essential.\n"
    "  - A score of 5 indicates the modification is highly important and "
    "necessary.\n"
    "\n"
    "Next, I’ll provide you a sentence with an edit. You should score each "
    "edit accordingly. The output should only be the score, with no "
    "additional explanation.\n"
    "\n"
    "Example Input:\n"
    "Uncorrected sentence: Nowadays the technologies were improved a lot "
    "compared to the last century.\n"
    "Edit: were → have\n"
    "Example Output (1-5): 5\n"
    "\n"
    "Note that the output must be a number between 1 and 5. Here is the "
    "formal input:\n";

constexpr std::string_view kEmptySide = "ε";

std::string EnvOr(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

}  // namespace

std::vector<double> UnitWeights(const ChunkAlignment& ca) {
  return std::vector<double>(ca.num_columns(), 1.0);
}

std::vector<double> LengthWeights(const ChunkAlignment& ca,
                                  std::optional<std::size_t> chosen_ref) {
  if (chosen_ref && *chosen_ref >= ca.references.size()) {
    throw std::out_of_range(fmt::format("reference {} out of range", *chosen_ref));
  }
  std::vector<double> out(ca.num_columns());
  for (std::size_t c = 0; c < ca.num_columns(); ++c) {
    std::size_t len = std::max<std::size_t>(
        {1, ca.source[c].tokens.size(), ca.hypothesis[c].tokens.size()});
    if (chosen_ref) {
      len = std::max(len, ca.references[*chosen_ref][c].tokens.size());
    } else {
      for (const auto& ref : ca.references) len = std::max(len, ref[c].tokens.size());
    }
    out[c] = static_cast<double>(len);
  }
  return out;
}

LlmClientConfig LlmClientConfig::FromEnvironment() {
  LlmClientConfig cfg;
  cfg.endpoint = EnvOr("CLEME_LLM_ENDPOINT", "");
  cfg.api_key = EnvOr("CLEME_LLM_API_KEY", "");
  cfg.model = EnvOr("CLEME_LLM_MODEL", "");
  return cfg;
}

LlmError::LlmError(std::size_t edit_index, const std::string& what)
    : std::runtime_error(fmt::format("edit {}: {}", edit_index, what)),
      edit_index_(edit_index) {}

std::string FormatEdit(const TokenSeq& source_tokens,
                       const TokenSeq& target_tokens) {
  auto side = [](const TokenSeq& t) {
    return t.empty() ? std::string(kEmptySide) : Join(t);
  };
  return side(source_tokens) + " → " + side(target_tokens);
}

std::string BuildEditPrompt(const TokenSeq& sentence, std::string_view edit) {
  std::string out(kPromptHead);
  out += "Uncorrected sentence: ";
  out += Join(sentence);
  out += "\nEdit: ";
  out += edit;
  out += "\nExample Output (1-5):";
  return out;
}

std::optional<int> ParseScoreReply(std::string_view reply) {
  auto it = std::find_if(reply.begin(), reply.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
  if (it == reply.end()) return std::nullopt;
  bool negative = it != reply.begin() && *(it - 1) == '-';
  auto end = std::find_if(it, reply.end(), [](char c) {
    return !std::isdigit(static_cast<unsigned char>(c));
  });
  int value = 0;
  auto [ptr, ec] = std::from_chars(&*it, &*it + (end - it), value);
  if (ec != std::errc()) return std::nullopt;
  return negative ? -value : value;
}

LlmTransport MakeHttpTransport(const LlmClientConfig& cfg) {
  const std::string& url = cfg.endpoint;
  std::size_t scheme_end = url.find("://");
  if (url.empty() || scheme_end == std::string::npos) {
    throw std::invalid_argument("LLM endpoint must be an http(s) URL: '" + url +
                                "'");
  }
  std::size_t path_begin = url.find('/', scheme_end + 3);
  std::string base = url.substr(0, path_begin);
  std::string path =
      path_begin == std::string::npos ? "/" : url.substr(path_begin);
  auto timeout = cfg.timeout;
  std::string key = cfg.api_key;
  return [base, path, timeout, key](const std::string& body) {
    httplib::Client client(base);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      throw std::runtime_error("request to " + base + path +
                               " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw std::runtime_error(fmt::format("{}{} returned HTTP {}", base, path,
                                           res->status));
    }
    return res->body;
  };
}

LlmClient::LlmClient(LlmClientConfig cfg)
    : LlmClient(cfg, MakeHttpTransport(cfg)) {}

LlmClient::LlmClient(LlmClientConfig cfg, LlmTransport transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
  if (cfg_.temperature < 0.0) {
    throw std::invalid_argument("LLM temperature must be >= 0");
  }
  if (cfg_.max_retries < 0) throw std::invalid_argument("max retries must be >= 0");
  cfg_.max_concurrency = std::max<std::size_t>(1, cfg_.max_concurrency);
  slots_ = std::make_unique<std::counting_semaphore<>>(
      static_cast<std::ptrdiff_t>(cfg_.max_concurrency));
}

std::string LlmClient::BuildRequestBody(const std::string& prompt) const {
  json body;
  body["model"] = cfg_.model;
  body["temperature"] = cfg_.temperature;
  if (cfg_.shape == RequestShape::kChat) {
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  } else {
    body["prompt"] = prompt;
  }
  body["max_tokens"] = 8;
  return body.dump();
}

std::string LlmClient::ExtractReplyText(const std::string& response_body) const {
  json res = json::parse(response_body);
  const json& choice = res.at("choices").at(0);
  if (choice.contains("message")) {
    return choice.at("message").at("content").get<std::string>();
  }
  return choice.at("text").get<std::string>();
}

int LlmClient::WeighOne(const TokenSeq& sentence, const std::string& edit,
                        std::size_t index) {
  const std::string body = BuildRequestBody(BuildEditPrompt(sentence, edit));
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    std::string reply;
    try {
      slots_->acquire();
      std::string response;
      try {
        response = transport_(body);
      } catch (...) {
        slots_->release();
        throw;
      }
      slots_->release();
      reply = ExtractReplyText(response);
    } catch (const std::exception& e) {
      if (attempt == cfg_.max_retries) throw LlmError(index, e.what());
      continue;
    }
    std::optional<int> score = ParseScoreReply(reply);
    if (score && *score >= 1 && *score <= 5) return *score;
  }
  ++fallbacks_;
  return kDefaultWeight;
}

std::vector<double> LlmClient::WeighEdits(const TokenSeq& sentence,
                                          const std::vector<std::string>& edits) {
  std::vector<double> out(edits.size(), 0.0);
  std::vector<std::exception_ptr> errors(edits.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < edits.size(); i = next++) {
      try {
        out[i] = WeighOne(sentence, edits[i], i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = std::min(cfg_.max_concurrency, edits.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<std::string> ColumnEdits(const ChunkAlignment& ca,
                                     const Classification& cls) {
  std::vector<std::string> out(ca.num_columns());
  for (std::size_t c = 0; c < ca.num_columns(); ++c) {
    if (cls.classes.at(c) == EditClass::kTN) continue;
    const Chunk& src = ca.source[c];
    if (IsEdited(ca.hypothesis[c], src)) {
      out[c] = FormatEdit(src.tokens, ca.hypothesis[c].tokens);
      continue;
    }
    const Chunk* ref = nullptr;
    if (cls.chosen_reference) {
      ref = &ca.references[*cls.chosen_reference][c];
    } else {
      for (const auto& r : ca.references) {
        if (IsEdited(r[c], src)) {
          ref = &r[c];
          break;
        }
      }
    }
    if (ref) out[c] = FormatEdit(src.tokens, ref->tokens);
  }
  return out;
}

WeightingKind ParseWeightingKind(std::string_view name) {
  if (name == "unit") return WeightingKind::kUnit;
  if (name == "length") return WeightingKind::kLength;
  if (name == "file") return WeightingKind::kFile;
  if (name == "llm") return WeightingKind::kLlm;
  throw std::invalid_argument("unknown weighting '" + std::string(name) + "'");
}

const char* WeightingKindName(WeightingKind kind) {
  switch (kind) {
    case WeightingKind::kUnit:
      return "unit";
    case WeightingKind::kLength:
      return "length";
    case WeightingKind::kFile:
      return "file";
    case WeightingKind::kLlm:
      return "llm";
  }
  return "?";
}

WeightResolver::WeightResolver(const WeightStrategy& strategy)
    : kind_(strategy.kind) {
  if (kind_ == WeightingKind::kFile) {
    weights_ = LoadWeights(ReadFile(strategy.weight_file));
  } else if (kind_ == WeightingKind::kLlm) {
    if (strategy.llm.endpoint.empty()) {
      throw std::invalid_argument("LLM weighting needs an endpoint "
                                  "(CLEME_LLM_ENDPOINT)");
    }
    llm_ = std::make_unique<LlmClient>(strategy.llm);
  }
}

WeightResolver::WeightResolver(WeightFile weights)
    : kind_(WeightingKind::kFile), weights_(std::move(weights)) {}

WeightResolver::WeightResolver(LlmClientConfig cfg, LlmTransport transport)
    : kind_(WeightingKind::kLlm),
      llm_(std::make_unique<LlmClient>(std::move(cfg), std::move(transport))) {}

std::vector<double> WeightResolver::Resolve(const WeightRequest& request) {
  const ChunkAlignment& ca = request.alignment;
  switch (kind_) {
    case WeightingKind::kUnit:
      return UnitWeights(ca);
    case WeightingKind::kLength:
      return LengthWeights(ca, request.classification.chosen_reference);
    case WeightingKind::kFile: {
      std::vector<double> out(ca.num_columns(), 1.0);
      for (std::size_t c = 0; c < ca.num_columns(); ++c) {
        std::optional<double> w = weights_.Lookup(request.sentence_index, c);
        if (w) {
          out[c] = *w;
        } else if (request.classification.classes.at(c) != EditClass::kTN) {
          ++missing_;
        }
      }
      return out;
    }
    case WeightingKind::kLlm: {
      std::vector<std::string> edits =
          ColumnEdits(ca, request.classification);
      std::vector<std::size_t> columns;
      std::vector<std::string> asked;
      for (std::size_t c = 0; c < edits.size(); ++c) {
        if (edits[c].empty()) continue;
        columns.push_back(c);
        asked.push_back(edits[c]);
      }
      std::vector<double> scored = llm_->WeighEdits(request.source, asked);
      std::vector<double> out(ca.num_columns(), 1.0);
      for (std::size_t k = 0; k < columns.size(); ++k) out[columns[k]] = scored[k];
      return out;
    }
  }
  return UnitWeights(ca);
}

WeightProvider WeightResolver::AsProvider() {
  return [this](const WeightRequest& r) { return Resolve(r); };
}

}  // namespace cleme
