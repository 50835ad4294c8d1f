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

#ifndef HELPRANK_CORPUS_H_
#define HELPRANK_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace helprank {

// One raw review record as found in the source file.
struct Review {
  std::string review_id;
  std::string product_id;  // "asin"
  std::string text;        // "reviewText"
  double stars = 0;        // "overall"
  int64_t helpful_votes = 0;
  int64_t total_votes = 0;
};

// A review that survived filtering, with its regression target.
struct LabeledExample {
  Review review;
  double target = 0;  // helpful_votes / total_votes
  size_t word_count = 0;
};

// Reasons a record can be dropped between the source file and the corpus,
// listed in the order the checks are applied. A record is attributed to the
// first check it fails.
enum class RejectReason {
  kMalformed,          // line is not a JSON object
  kMissingField,       // reviewText, overall, asin or helpful absent/null
  kInvalidField,       // present but of the wrong type or out of range
  kDuplicateId,        // explicit review_id seen earlier in the file
  kVotesInconsistent,  // helpful_votes > total_votes
  kTooFewVotes,        // total_votes <= 10
  kNoLetters,          // text has no alphabetic character
};
inline constexpr size_t kNumRejectReasons = 7;

const char* RejectReasonName(RejectReason reason);

// Reviews need strictly more than 10 votes to be kept.
inline constexpr int64_t kMinTotalVotes = 11;

struct Rejection {
  size_t line = 0;
  RejectReason reason = RejectReason::kMalformed;
  std::string detail;
};

struct ParsedDataset {
  std::string source;
  size_t records = 0;  // non-blank input lines
  std::vector<Review> reviews;
  std::vector<Rejection> rejections;
};

struct FilterStats {
  size_t input = 0;
  size_t kept = 0;
  std::array<size_t, kNumRejectReasons> rejected{};

  size_t rejected_by(RejectReason reason) const {
    return rejected[static_cast<size_t>(reason)];
  }
  std::string ToJson() const;
  static FilterStats FromJson(std::string_view json);
};

struct Corpus {
  std::string category;
  std::string source;
  FilterStats stats;
  std::vector<LabeledExample> examples;  // input file order
};

// Parses one JSON line. line_number (1-based) becomes the review id when the
// record has no "review_id" field. Returns the rejection reason on failure.
std::optional<RejectReason> ParseReviewLine(std::string_view line,
                                            size_t line_number, Review& out,
                                            std::string* detail = nullptr);

// Reads a JSON-lines file (optionally gzip-compressed). Malformed records are
// collected in `rejections`; only an unreadable file throws.
ParsedDataset ParseDataset(const std::filesystem::path& path);
ParsedDataset ParseDatasetLines(const std::vector<std::string>& lines,
                                std::string source = "<memory>");

// helpful / total. Throws kDomain unless 0 <= helpful <= total and total >= 1.
double HelpfulnessRatio(int64_t helpful_votes, int64_t total_votes);

size_t WordCount(std::string_view text);

// Applies the vote-count and alphabetic-text rules and labels the survivors.
// Parse-stage rejections are carried into the statistics so that
// stats.input == stats.kept + sum(stats.rejected).
Corpus ApplyFilters(const ParsedDataset& parsed, std::string category = "");

// Corpus file: one JSON object per example; statistics go to a sidecar
// "<path>.stats.json".
std::string SerializeCorpus(const Corpus& corpus);
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus ReadCorpus(const std::filesystem::path& path);

}  // namespace helprank

#endif  // HELPRANK_CORPUS_H_
