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


#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "helprank/corpus.h"
#include "helprank/error.h"
#include "helprank/io_util.h"

namespace helprank {
namespace {

const std::filesystem::path kFixtures = HELPRANK_FIXTURE_DIR;

std::vector<std::string> Ids(const Corpus& c) {
  std::vector<std::string> ids;
  for (const auto& e : c.examples) ids.push_back(e.review.review_id);
  return ids;
}

TEST(CorpusTest, FilterFixture) {
  const Corpus c = ApplyFilters(ParseDataset(kFixtures / "filter_fixture.jsonl"));
  EXPECT_EQ(Ids(c), (std::vector<std::string>{"1", "2", "8", "9", "10"}));
  EXPECT_EQ(c.stats.input, 10u);
  EXPECT_EQ(c.stats.kept, 5u);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kTooFewVotes), 3u);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kNoLetters), 1u);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kMissingField), 1u);
  EXPECT_DOUBLE_EQ(c.examples[0].target, 11.0 / 12.0);
  EXPECT_EQ(c.examples[0].word_count, 4u);
  EXPECT_EQ(c.examples[3].target, 0.0);
  EXPECT_EQ(c.examples[4].target, 1.0);
}

TEST(CorpusTest, VoteThresholdIsStrict) {
  const std::vector<std::string> lines = {
      R"({"reviewText":"ten","overall":3,"asin":"A","helpful":[5,10]})",
      R"({"reviewText":"eleven","overall":3,"asin":"A","helpful":[5,11]})",
  };
  const Corpus c = ApplyFilters(ParseDatasetLines(lines));
  EXPECT_EQ(Ids(c), (std::vector<std::string>{"2"}));
}

TEST(CorpusTest, RejectionReasons) {
  const std::vector<std::string> lines = {
      R"(not json)",
      R"([1,2,3])",
      R"({"reviewText":"x","overall":7,"asin":"A","helpful":[1,20]})",
      R"({"reviewText":"x","overall":3,"asin":"A","helpful":[1]})",
      R"({"reviewText":"x","overall":3,"asin":"A","helpful":[30,20]})",
      R"({"review_id":"d","reviewText":"x","overall":3,"asin":"A","helpful":[1,20]})",
      R"({"review_id":"d","reviewText":"y","overall":3,"asin":"A","helpful":[1,20]})",
      R"({"reviewText":null,"overall":3,"asin":"A","helpful":[1,20]})",
      "",
  };
  const ParsedDataset p = ParseDatasetLines(lines);
  EXPECT_EQ(p.records, 8u);
  const Corpus c = ApplyFilters(p);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kMalformed), 2u);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kInvalidField), 2u);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kVotesInconsistent), 1u);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kDuplicateId), 1u);
  EXPECT_EQ(c.stats.rejected_by(RejectReason::kMissingField), 1u);
  EXPECT_EQ(Ids(c), (std::vector<std::string>{"d"}));
  size_t rejected = 0;
  for (size_t r : c.stats.rejected) rejected += r;
  EXPECT_EQ(c.stats.input, c.stats.kept + rejected);
}

TEST(CorpusTest, HelpfulnessRatioDomain) {
  EXPECT_DOUBLE_EQ(HelpfulnessRatio(3, 4), 0.75);
  EXPECT_THROW(HelpfulnessRatio(5, 4), Error);
  EXPECT_THROW(HelpfulnessRatio(0, 0), Error);
  EXPECT_THROW(HelpfulnessRatio(-1, 4), Error);
}

TEST(CorpusTest, WordCount) {
  EXPECT_EQ(WordCount("  two   words "), 2u);
  EXPECT_EQ(WordCount(""), 0u);
  EXPECT_EQ(WordCount("tab\tand\nnewline"), 3u);
}

TEST(CorpusTest, LettersInAnyScript) {
  const std::vector<std::string> lines = {
      R"({"reviewText":"很好用","overall":5,"asin":"A","helpful":[9,12]})",
      R"({"reviewText":"123 456","overall":5,"asin":"A","helpful":[9,12]})",
  };
  const Corpus c = ApplyFilters(ParseDatasetLines(lines));
  EXPECT_EQ(Ids(c), (std::vector<std::string>{"1"}));
}

TEST(CorpusTest, CorpusFileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "helprank_corpus_rt";
  std::filesystem::remove_all(dir);
  Corpus c = ApplyFilters(ParseDataset(kFixtures / "filter_fixture.jsonl"), "phones");
  WriteCorpus(c, dir / "corpus.jsonl");
  const Corpus back = ReadCorpus(dir / "corpus.jsonl");
  EXPECT_EQ(Ids(back), Ids(c));
  EXPECT_EQ(back.stats.kept, c.stats.kept);
  EXPECT_EQ(back.stats.rejected, c.stats.rejected);
  for (size_t i = 0; i < c.examples.size(); ++i) {
    EXPECT_EQ(back.examples[i].review.text, c.examples[i].review.text);
    EXPECT_EQ(back.examples[i].target, c.examples[i].target);
    EXPECT_EQ(back.examples[i].review.stars, c.examples[i].review.stars);
  }
  EXPECT_EQ(SerializeCorpus(back), SerializeCorpus(c));
  std::filesystem::remove_all(dir);
}

TEST(CorpusTest, GzipInput) {
  const auto dir = std::filesystem::temp_directory_path() / "helprank_corpus_gz";
  std::filesystem::create_directories(dir);
  const auto plain = dir / "reviews.jsonl";
  std::filesystem::copy_file(kFixtures / "filter_fixture.jsonl", plain,
                             std::filesystem::copy_options::overwrite_existing);
  ASSERT_EQ(std::system(("gzip -kf " + plain.string()).c_str()), 0);
  const Corpus a = ApplyFilters(ParseDataset(plain));
  const Corpus b = ApplyFilters(ParseDataset(dir / "reviews.jsonl.gz"));
  EXPECT_EQ(Ids(a), Ids(b));
  std::filesystem::remove_all(dir);
}

TEST(CorpusTest, MissingFileThrows) {
  try {
    ParseDataset("/nonexistent/reviews.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(CorpusTest, StatsJsonRoundTrip) {
  FilterStats s;
  s.input = 9;
  s.kept = 4;
  s.rejected[2] = 5;
  const FilterStats back = FilterStats::FromJson(s.ToJson());
  EXPECT_EQ(back.input, 9u);
  EXPECT_EQ(back.kept, 4u);
  EXPECT_EQ(back.rejected, s.rejected);
}

}  // namespace
}  // namespace helprank
