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

#include "helprank/features.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helprank/error.h"
#include "helprank/io_util.h"
#include "helprank/text.h"
#include "json.hpp"

namespace helprank {

Lexicon::Lexicon(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  std::set<std::string> names;
  for (const auto& category : categories_) {
    if (category.name.empty() || !names.insert(category.name).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("lexicon category name '{}' empty or repeated",
                              category.name));
    }
    Matcher matcher;
    for (const auto& entry : category.entries) {
      const bool wildcard = !entry.empty() && entry.back() == '*';
      const std::string body = wildcard ? entry.substr(0, entry.size() - 1) : entry;
      // An entry must be one lowercase letter token, or it could never match.
      const auto tokens = LetterTokens(body);
      if (body.empty() || tokens.size() != 1 || tokens[0] != body) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("lexicon entry '{}' in '{}' is not a lowercase "
                                "word with an optional trailing '*'",
                                entry, category.name));
      }
      (wildcard ? matcher.prefixes : matcher.exact).push_back(body);
    }
    std::sort(matcher.exact.begin(), matcher.exact.end());
    matchers_.push_back(std::move(matcher));
  }
}

Lexicon Lexicon::FromJson(std::string_view text) {
  std::vector<Category> categories;
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kParse, "lexicon must be a JSON object");
    for (const auto& [name, entries] : j.items()) {
      categories.push_back({name, entries.get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad lexicon: ") + e.what());
  }
  return Lexicon(std::move(categories));
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  return FromJson(ReadFile(path));
}

bool Lexicon::Matcher::Matches(std::string_view token) const {
  if (std::binary_search(exact.begin(), exact.end(), token)) return true;
  for (const auto& prefix : prefixes) {
    if (token.starts_with(prefix)) return true;
  }
  return false;
}

std::vector<size_t> Lexicon::Count(std::span<const std::string> tokens) const {
  std::vector<size_t> counts(matchers_.size(), 0);
  for (const auto& token : tokens) {
    for (size_t c = 0; c < matchers_.size(); ++c) {
      if (matchers_[c].Matches(token)) ++counts[c];
    }
  }
  return counts;
}

FeatureVector FeatureMatrix::RowVector(size_t i) const {
  auto r = row(i);
  return {schema, std::vector<double>(r.begin(), r.end())};
}

std::vector<std::string> LexiconSchema(const Lexicon& lexicon) {
  std::vector<std::string> schema;
  for (const auto& c : lexicon.categories()) schema.push_back(c.name);
  for (const auto& c : lexicon.categories()) schema.push_back(c.name + "_pct");
  return schema;
}

namespace {

void FillLexiconRow(std::string_view text, const Lexicon& lexicon,
                    std::span<double> out) {
  const auto tokens = LetterTokens(text);
  const auto counts = lexicon.Count(tokens);
  const double denom = static_cast<double>(std::max<size_t>(tokens.size(), 1));
  const size_t k = counts.size();
  for (size_t c = 0; c < k; ++c) {
    out[c] = static_cast<double>(counts[c]);
    out[k + c] = static_cast<double>(counts[c]) / denom;
  }
}

void CheckSchema(const std::vector<std::string>& actual,
                 const std::vector<std::string>& expected) {
  if (actual != expected) {
    throw Error(ErrorCode::kSchemaMismatch,
                fmt::format("feature schema mismatch: got {} columns, expected {}",
                            actual.size(), expected.size()));
  }
}

}  // namespace

FeatureVector ExtractLexiconFeatures(std::string_view text, const Lexicon& lexicon) {
  FeatureVector v{LexiconSchema(lexicon), {}};
  v.values.assign(v.schema.size(), 0.0);
  FillLexiconRow(text, lexicon, v.values);
  return v;
}

FeatureMatrix LexiconFeatureMatrix(std::span<const LabeledExample> examples,
                                   const Lexicon& lexicon) {
  FeatureMatrix m;
  m.schema = LexiconSchema(lexicon);
  m.rows = examples.size();
  m.values.assign(m.rows * m.cols(), 0.0);
  for (size_t i = 0; i < examples.size(); ++i) {
    FillLexiconRow(examples[i].review.text, lexicon, m.row(i));
  }
  return m;
}

FeatureVector SideFeatures(const LabeledExample& example) {
  return {{"stars", "word_count"},
          {example.review.stars, static_cast<double>(example.word_count)}};
}

FeatureMatrix SideFeatureMatrix(std::span<const LabeledExample> examples) {
  FeatureMatrix m;
  m.schema = {"stars", "word_count"};
  m.rows = examples.size();
  m.values.reserve(2 * m.rows);
  for (const auto& e : examples) {
    m.values.push_back(e.review.stars);
    m.values.push_back(static_cast<double>(e.word_count));
  }
  return m;
}

Normalizer FitNormalizer(const FeatureMatrix& train) {
  if (train.rows == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot fit normalizer on no rows");
  }
  Normalizer n;
  n.schema = train.schema;
  n.means.assign(train.cols(), 0.0);
  n.stds.assign(train.cols(), 1.0);
  for (size_t c = 0; c < train.cols(); ++c) {
    const double first = train.row(0)[c];
    bool constant = true;
    double sum = 0;
    for (size_t r = 0; r < train.rows; ++r) {
      const double x = train.row(r)[c];
      constant = constant && x == first;
      sum += x;
    }
    if (constant) {
      n.means[c] = first;
      continue;
    }
    const double mean = sum / static_cast<double>(train.rows);
    double ss = 0;
    for (size_t r = 0; r < train.rows; ++r) {
      const double d = train.row(r)[c] - mean;
      ss += d * d;
    }
    n.means[c] = mean;
    n.stds[c] = std::sqrt(ss / static_cast<double>(train.rows));
  }
  return n;
}

Normalizer FitNormalizer(std::span<const FeatureVector> train) {
  if (train.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot fit normalizer on no rows");
  }
  FeatureMatrix m;
  m.schema = train.front().schema;
  m.rows = train.size();
  for (const auto& v : train) {
    CheckSchema(v.schema, m.schema);
    m.values.insert(m.values.end(), v.values.begin(), v.values.end());
  }
  return FitNormalizer(m);
}

FeatureVector Normalize(const FeatureVector& v, const Normalizer& n) {
  CheckSchema(v.schema, n.schema);
  FeatureVector out = v;
  for (size_t c = 0; c < out.values.size(); ++c) {
    out.values[c] = (out.values[c] - n.means[c]) / n.stds[c];
  }
  return out;
}

FeatureMatrix Normalize(const FeatureMatrix& m, const Normalizer& n) {
  CheckSchema(m.schema, n.schema);
  FeatureMatrix out = m;
  for (size_t r = 0; r < out.rows; ++r) {
    auto row = out.row(r);
    for (size_t c = 0; c < row.size(); ++c) {
      row[c] = (row[c] - n.means[c]) / n.stds[c];
    }
  }
  return out;
}

void WriteFeatureCsv(const std::filesystem::path& path,
                     std::span<const LabeledExample> examples,
                     const FeatureMatrix& features) {
  if (examples.size() != features.rows) {
    throw Error(ErrorCode::kInvalidArgument, "feature rows do not match examples");
  }
  std::string out = "review_id";
  for (const auto& name : features.schema) out += "," + CsvField(name);
  out += '\n';
  for (size_t r = 0; r < features.rows; ++r) {
    out += CsvField(examples[r].review.review_id);
    for (double x : features.row(r)) out += "," + FormatDouble(x);
    out += '\n';
  }
  WriteFile(path, out);
}

}  // namespace helprank
