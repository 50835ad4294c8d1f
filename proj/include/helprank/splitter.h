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

#ifndef HELPRANK_SPLITTER_H_
#define HELPRANK_SPLITTER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "helprank/corpus.h"

namespace helprank {

// Product-wise train/validation/test assignment. Each id list is sorted.
struct SplitSpec {
  uint64_t seed = 0;
  std::vector<std::string> test_products;
  std::vector<std::string> val_products;
  std::vector<std::string> train_products;

  std::string ToJson() const;
  static SplitSpec FromJson(std::string_view json);
  bool operator==(const SplitSpec&) const = default;
};

struct PartitionSizes {
  size_t test = 0;
  size_t val = 0;
  size_t train = 0;
};

// test = round(0.20 * n), val = round(0.125 * (n - test)), rounding half up,
// computed in integer arithmetic. For tiny n the validation and training
// partitions are raised to one product each so all three are non-empty.
// Requires n >= 3.
PartitionSizes ComputePartitionSizes(size_t num_products);

// Sorts the distinct ids, shuffles them with xoshiro256** seeded by `seed`
// and slices test, validation and train in that order.
SplitSpec SplitProducts(std::vector<std::string> product_ids, uint64_t seed);
SplitSpec SplitByProduct(const Corpus& corpus, uint64_t seed);

struct SplitData {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> val;
  std::vector<LabeledExample> test;
};

// Routes each example to its product's partition, keeping corpus order.
// Throws kInvalidArgument if a product is not covered by the spec.
SplitData Materialize(const Corpus& corpus, const SplitSpec& spec);

void WriteSplit(const SplitSpec& spec, const std::filesystem::path& path);
SplitSpec ReadSplit(const std::filesystem::path& path);

}  // namespace helprank

#endif  // HELPRANK_SPLITTER_H_
