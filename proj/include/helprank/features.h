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

#ifndef HELPRANK_FEATURES_H_
#define HELPRANK_FEATURES_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "helprank/corpus.h"

namespace helprank {

// Word lists per category. Entries are lowercase words; a trailing '*' makes
// the entry a prefix pattern ("great*" matches "greatest").
class Lexicon {
 public:
  struct Category {
    std::string name;
    std::vector<std::string> entries;
  };

  // Validates names (unique, non-empty) and entries (non-empty, lowercase,
  // '*' only as the final character). Throws kInvalidArgument.
  explicit Lexicon(std::vector<Category> categories);

  // JSON object {category: [entries...]}; key order defines feature order.
  static Lexicon FromJson(std::string_view json);
  static Lexicon Load(const std::filesystem::path& path);

  const std::vector<Category>& categories() const { return categories_; }

  // Per-category count of tokens matching at least one entry.
  std::vector<size_t> Count(std::span<const std::string> tokens) const;

 private:
  struct Matcher {
    std::vector<std::string> exact;     // sorted
    std::vector<std::string> prefixes;  // without the '*'
    bool Matches(std::string_view token) const;
  };

  std::vector<Category> categories_;
  std::vector<Matcher> matchers_;
};

struct FeatureVector {
  std::vector<std::string> schema;
  std::vector<double> values;
};

// Row-major feature matrix with a shared schema.
struct FeatureMatrix {
  std::vector<std::string> schema;
  size_t rows = 0;
  std::vector<double> values;

  size_t cols() const { return schema.size(); }
  std::span<const double> row(size_t i) const {
    return {values.data() + i * cols(), cols()};
  }
  std::span<double> row(size_t i) { return {values.data() + i * cols(), cols()}; }
  FeatureVector RowVector(size_t i) const;
};

// Schema: one count column per category followed by one "<name>_pct" column
// per category holding count / max(number of letter tokens, 1).
std::vector<std::string> LexiconSchema(const Lexicon& lexicon);
FeatureVector ExtractLexiconFeatures(std::string_view text, const Lexicon& lexicon);
FeatureMatrix LexiconFeatureMatrix(std::span<const LabeledExample> examples,
                                   const Lexicon& lexicon);

// [stars, word_count].
FeatureVector SideFeatures(const LabeledExample& example);
FeatureMatrix SideFeatureMatrix(std::span<const LabeledExample> examples);

// Per-column population mean and standard deviation. Constant columns get a
// standard deviation of 1 so they map to 0.
struct Normalizer {
  std::vector<std::string> schema;
  std::vector<double> means;
  std::vector<double> stds;
};

Normalizer FitNormalizer(const FeatureMatrix& train);
Normalizer FitNormalizer(std::span<const FeatureVector> train);

FeatureVector Normalize(const FeatureVector& v, const Normalizer& n);
FeatureMatrix Normalize(const FeatureMatrix& m, const Normalizer& n);

// CSV with header "review_id,<schema...>".
void WriteFeatureCsv(const std::filesystem::path& path,
                     std::span<const LabeledExample> examples,
                     const FeatureMatrix& features);

}  // namespace helprank

#endif  // HELPRANK_FEATURES_H_
