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


#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "helprank/error.h"
#include "helprank/features.h"
#include "helprank/io_util.h"
#include "helprank/text.h"

namespace helprank {
namespace {

Lexicon Small() {
  return Lexicon::FromJson(R"({"posemo": ["good", "great*"], "article": ["a", "the"]})");
}

LabeledExample Example(std::string text, double stars) {
  LabeledExample e;
  e.review.review_id = "id";
  e.review.text = std::move(text);
  e.review.stars = stars;
  e.word_count = 0;
  for (char c : e.review.text) e.word_count += c == ' ';
  e.word_count += e.review.text.empty() ? 0 : 1;
  return e;
}

TEST(TextTest, Tokens) {
  EXPECT_EQ(LetterTokens("Great, GREATEST! it's 4u"),
            (std::vector<std::string>{"great", "greatest", "it", "s", "u"}));
  EXPECT_EQ(LetterTokens("Ça Marche"), (std::vector<std::string>{"ça", "marche"}));
  EXPECT_TRUE(ContainsLetter("12 é"));
  EXPECT_FALSE(ContainsLetter("12 !?"));
  EXPECT_EQ(CountWords("a  b\u00a0c"), 3u);
}

TEST(FeaturesTest, SchemaOrderFollowsFile) {
  const Lexicon lex = Small();
  EXPECT_EQ(LexiconSchema(lex), (std::vector<std::string>{"posemo", "article",
                                                          "posemo_pct", "article_pct"}));
}

TEST(FeaturesTest, CountsAndPercentages) {
  const FeatureVector v =
      ExtractLexiconFeatures("The GREATEST phone, a good good buy. 10/10", Small());
  // Tokens: the greatest phone a good good buy -> 7.
  ASSERT_EQ(v.values.size(), 4u);
  EXPECT_EQ(v.values[0], 3.0);
  EXPECT_EQ(v.values[1], 2.0);
  EXPECT_DOUBLE_EQ(v.values[2], 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(v.values[3], 2.0 / 7.0);
}

TEST(FeaturesTest, PrefixDoesNotMatchShorterWord) {
  const FeatureVector v = ExtractLexiconFeatures("grea great", Small());
  EXPECT_EQ(v.values[0], 1.0);
}

TEST(FeaturesTest, EmptyTextGivesZeros) {
  const FeatureVector v = ExtractLexiconFeatures("", Small());
  for (double x : v.values) EXPECT_EQ(x, 0.0);
}

TEST(FeaturesTest, InvalidLexicon) {
  EXPECT_THROW(Lexicon::FromJson(R"({"a": ["Good"]})"), Error);
  EXPECT_THROW(Lexicon::FromJson(R"({"a": ["go*od"]})"), Error);
  EXPECT_THROW(Lexicon::FromJson(R"({"a": ["two words"]})"), Error);
  EXPECT_THROW(Lexicon::FromJson(R"({"a": ["*"]})"), Error);
  EXPECT_THROW(Lexicon::FromJson(R"({"a": "good"})"), Error);
  EXPECT_THROW(Lexicon::FromJson(R"([1, 2])"), Error);
}

TEST(FeaturesTest, DemoLexiconLoads) {
  const Lexicon lex =
      Lexicon::Load(std::filesystem::path(HELPRANK_DATA_DIR) / "lexicon/demo_lexicon.json");
  EXPECT_EQ(lex.categories().size(), 12u);
  EXPECT_EQ(lex.categories().front().name, "posemo");
}

TEST(FeaturesTest, SideFeatures) {
  const FeatureVector v = SideFeatures(Example("one two three", 4));
  EXPECT_EQ(v.schema, (std::vector<std::string>{"stars", "word_count"}));
  EXPECT_EQ(v.values, (std::vector<double>{4, 3}));
}

TEST(FeaturesTest, NormalizerIsPopulationZScore) {
  const std::vector<LabeledExample> train = {Example("a", 2), Example("a b", 4),
                                             Example("a b c", 6)};
  const FeatureMatrix m = SideFeatureMatrix(train);
  const Normalizer n = FitNormalizer(m);
  EXPECT_DOUBLE_EQ(n.means[0], 4.0);
  EXPECT_DOUBLE_EQ(n.stds[0], 1.632993161855452);
  const FeatureMatrix z = Normalize(m, n);
  EXPECT_NEAR(z.row(2)[0], 1.224744871391589, 1e-15);
  EXPECT_NEAR(z.row(0)[1] + z.row(1)[1] + z.row(2)[1], 0.0, 1e-15);
}

TEST(FeaturesTest, ConstantColumnMapsToZero) {
  const std::vector<LabeledExample> train = {Example("a b", 3), Example("c d", 3)};
  const FeatureMatrix m = SideFeatureMatrix(train);
  const Normalizer n = FitNormalizer(m);
  EXPECT_EQ(n.stds[0], 1.0);
  EXPECT_EQ(n.stds[1], 1.0);
  const FeatureMatrix z = Normalize(m, n);
  for (double x : z.values) EXPECT_EQ(x, 0.0);
  // Unseen values still move away from zero.
  const FeatureVector v = Normalize(SideFeatures(Example("a b c", 5)), n);
  EXPECT_EQ(v.values[0], 2.0);
}

TEST(FeaturesTest, NormalizeChecksSchema) {
  const std::vector<LabeledExample> train = {Example("a", 2), Example("a b", 4)};
  const Normalizer n = FitNormalizer(SideFeatureMatrix(train));
  const FeatureVector lex = ExtractLexiconFeatures("a", Small());
  try {
    Normalize(lex, n);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(FeaturesTest, FeatureCsv) {
  const std::vector<LabeledExample> ex = {Example("the good", 5)};
  const auto path = std::filesystem::temp_directory_path() / "helprank_features.csv";
  WriteFeatureCsv(path, ex, LexiconFeatureMatrix(ex, Small()));
  const CsvTable t = ReadCsv(path);
  EXPECT_EQ(t.header, (std::vector<std::string>{"review_id", "posemo", "article",
                                                "posemo_pct", "article_pct"}));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][3], "0.5");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace helprank
