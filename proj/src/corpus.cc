/*
 * Copyright 2026 The HelpRank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "helprank/corpus.h"

#include <fmt/format.h>

#include <unordered_set>

#include "helprank/error.h"
#include "helprank/io_util.h"
#include "helprank/text.h"
#include "json.hpp"

namespace helprank {
namespace {

using nlohmann::json;

constexpr std::array<const char*, kNumRejectReasons> kReasonNames = {
    "malformed",          "missing_field", "invalid_field", "duplicate_id",
    "votes_inconsistent", "too_few_votes", "no_letters",
};

bool Missing(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null();
}

std::optional<RejectReason> Reject(RejectReason reason, std::string* detail,
                                   std::string message) {
  if (detail != nullptr) *detail = std::move(message);
  return reason;
}

ParsedDataset ParseFrom(std::string source,
                        const std::function<bool(std::string&)>& next_line) {
  ParsedDataset parsed;
  parsed.source = std::move(source);
  std::unordered_set<std::string> seen_ids;
  std::string line;
  size_t line_number = 0;
  while (next_line(line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++parsed.records;
    Review review;
    std::string detail;
    auto reason = ParseReviewLine(line, line_number, review, &detail);
    if (!reason && !seen_ids.insert(review.review_id).second) {
      reason = RejectReason::kDuplicateId;
      detail = "duplicate review_id " + review.review_id;
    }
    if (reason) {
      parsed.rejections.push_back({line_number, *reason, std::move(detail)});
      continue;
    }
    // Vote consistency is checked here rather than in ParseReviewLine so
    // that duplicate ids take precedence in the documented order.
    if (review.helpful_votes > review.total_votes) {
      parsed.rejections.push_back(
          {line_number, RejectReason::kVotesInconsistent,
           fmt::format("helpful {} > total {}", review.helpful_votes,
                       review.total_votes)});
      continue;
    }
    parsed.reviews.push_back(std::move(review));
  }
  return parsed;
}

}  // namespace

const char* RejectReasonName(RejectReason reason) {
  return kReasonNames[static_cast<size_t>(reason)];
}

std::string FilterStats::ToJson() const {
  json j;
  j["input"] = input;
  j["kept"] = kept;
  json rejected_json = json::object();
  for (size_t i = 0; i < kNumRejectReasons; ++i) {
    rejected_json[kReasonNames[i]] = rejected[i];
  }
  j["rejected"] = std::move(rejected_json);
  return j.dump(2) + "\n";
}

FilterStats FilterStats::FromJson(std::string_view text) {
  FilterStats stats;
  try {
    const json j = json::parse(text);
    stats.input = j.at("input").get<size_t>();
    stats.kept = j.at("kept").get<size_t>();
    const json& rejected = j.at("rejected");
    for (size_t i = 0; i < kNumRejectReasons; ++i) {
      stats.rejected[i] = rejected.value(kReasonNames[i], size_t{0});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad stats file: ") + e.what());
  }
  return stats;
}

std::optional<RejectReason> ParseReviewLine(std::string_view line,
                                            size_t line_number, Review& out,
                                            std::string* detail) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    return Reject(RejectReason::kMalformed, detail, "not a JSON object");
  }
  for (const char* key : {"reviewText", "overall", "asin", "helpful"}) {
    if (Missing(obj, key)) {
      return Reject(RejectReason::kMissingField, detail,
                    std::string("missing ") + key);
    }
  }
  const json& text = obj["reviewText"];
  const json& overall = obj["overall"];
  const json& asin = obj["asin"];
  const json& helpful = obj["helpful"];
  if (!text.is_string()) {
    return Reject(RejectReason::kInvalidField, detail, "reviewText not a string");
  }
  if (!overall.is_number() || overall.get<double>() < 1.0 ||
      overall.get<double>() > 5.0) {
    return Reject(RejectReason::kInvalidField, detail, "overall not in [1,5]");
  }
  if (!asin.is_string() || asin.get_ref<const std::string&>().empty()) {
    return Reject(RejectReason::kInvalidField, detail, "asin not a string");
  }
  if (!helpful.is_array() || helpful.size() != 2 ||
      !helpful[0].is_number_integer() || !helpful[1].is_number_integer() ||
      helpful[0].get<int64_t>() < 0 || helpful[1].get<int64_t>() < 0) {
    return Reject(RejectReason::kInvalidField, detail,
                  "helpful is not [helpful_votes, total_votes]");
  }
  if (auto it = obj.find("review_id"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) {
      return Reject(RejectReason::kInvalidField, detail, "review_id not a string");
    }
    out.review_id = it->get<std::string>();
  } else {
    out.review_id = std::to_string(line_number);
  }
  out.product_id = asin.get<std::string>();
  out.text = text.get<std::string>();
  out.stars = overall.get<double>();
  out.helpful_votes = helpful[0].get<int64_t>();
  out.total_votes = helpful[1].get<int64_t>();
  return std::nullopt;
}

ParsedDataset ParseDataset(const std::filesystem::path& path) {
  LineReader reader(path);
  return ParseFrom(path.string(),
                   [&](std::string& line) { return reader.Next(line); });
}

ParsedDataset ParseDatasetLines(const std::vector<std::string>& lines,
                                std::string source) {
  size_t i = 0;
  return ParseFrom(std::move(source), [&](std::string& line) {
    if (i >= lines.size()) return false;
    line = lines[i++];
    return true;
  });
}

double HelpfulnessRatio(int64_t helpful_votes, int64_t total_votes) {
  if (total_votes < 1 || helpful_votes < 0 || helpful_votes > total_votes) {
    throw Error(ErrorCode::kDomain,
                fmt::format("helpfulness ratio undefined for {}/{}",
                            helpful_votes, total_votes));
  }
  return static_cast<double>(helpful_votes) / static_cast<double>(total_votes);
}

size_t WordCount(std::string_view text) { return CountWords(text); }

Corpus ApplyFilters(const ParsedDataset& parsed, std::string category) {
  Corpus corpus;
  corpus.category = std::move(category);
  corpus.source = parsed.source;
  corpus.stats.input = parsed.records;
  for (const auto& r : parsed.rejections) {
    ++corpus.stats.rejected[static_cast<size_t>(r.reason)];
  }
  for (const auto& review : parsed.reviews) {
    if (review.total_votes < kMinTotalVotes) {
      ++corpus.stats.rejected[static_cast<size_t>(RejectReason::kTooFewVotes)];
      continue;
    }
    if (!ContainsLetter(review.text)) {
      ++corpus.stats.rejected[static_cast<size_t>(RejectReason::kNoLetters)];
      continue;
    }
    LabeledExample example;
    example.review = review;
    example.target = HelpfulnessRatio(review.helpful_votes, review.total_votes);
    example.word_count = WordCount(review.text);
    corpus.examples.push_back(std::move(example));
  }
  corpus.stats.kept = corpus.examples.size();
  return corpus;
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out;
  for (const auto& e : corpus.examples) {
    json j;
    j["review_id"] = e.review.review_id;
    j["product_id"] = e.review.product_id;
    j["text"] = e.review.text;
    j["stars"] = e.review.stars;
    j["helpful_votes"] = e.review.helpful_votes;
    j["total_votes"] = e.review.total_votes;
    j["target"] = e.target;
    j["word_count"] = e.word_count;
    out += j.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  WriteFile(path, SerializeCorpus(corpus));
  auto stats_path = path;
  stats_path += ".stats.json";
  WriteFile(stats_path, corpus.stats.ToJson());
}

Corpus ReadCorpus(const std::filesystem::path& path) {
  Corpus corpus;
  corpus.source = path.string();
  LineReader reader(path);
  std::string line;
  std::unordered_set<std::string> ids;
  while (reader.Next(line)) {
    if (line.empty()) continue;
    LabeledExample e;
    try {
      const json j = json::parse(line);
      e.review.review_id = j.at("review_id").get<std::string>();
      e.review.product_id = j.at("product_id").get<std::string>();
      e.review.text = j.at("text").get<std::string>();
      e.review.stars = j.at("stars").get<double>();
      e.review.helpful_votes = j.at("helpful_votes").get<int64_t>();
      e.review.total_votes = j.at("total_votes").get<int64_t>();
      e.target = j.at("target").get<double>();
      e.word_count = j.at("word_count").get<size_t>();
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kParse, fmt::format("{}:{}: {}", path.string(),
                                                 reader.line_number(), ex.what()));
    }
    if (e.target != HelpfulnessRatio(e.review.helpful_votes, e.review.total_votes)) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: target does not match votes", path.string(),
                              reader.line_number()));
    }
    if (!ids.insert(e.review.review_id).second) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: duplicate review_id {}", path.string(),
                              reader.line_number(), e.review.review_id));
    }
    corpus.examples.push_back(std::move(e));
  }
  auto stats_path = path;
  stats_path += ".stats.json";
  if (std::filesystem::exists(stats_path)) {
    corpus.stats = FilterStats::FromJson(ReadFile(stats_path));
  } else {
    corpus.stats.input = corpus.stats.kept = corpus.examples.size();
  }
  return corpus;
}

}  // namespace helprank
