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

#include "helprank/splitter.h"

#include <fmt/format.h>

#include <algorithm>
#include <unordered_map>

#include "helprank/error.h"
#include "helprank/io_util.h"
#include "helprank/rng.h"
#include "json.hpp"

namespace helprank {

using nlohmann::json;

std::string SplitSpec::ToJson() const {
  json j;
  j["seed"] = seed;
  j["test_products"] = test_products;
  j["val_products"] = val_products;
  j["train_products"] = train_products;
  return j.dump(2) + "\n";
}

SplitSpec SplitSpec::FromJson(std::string_view text) {
  SplitSpec spec;
  try {
    const json j = json::parse(text);
    spec.seed = j.at("seed").get<uint64_t>();
    spec.test_products = j.at("test_products").get<std::vector<std::string>>();
    spec.val_products = j.at("val_products").get<std::vector<std::string>>();
    spec.train_products = j.at("train_products").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad split file: ") + e.what());
  }
  return spec;
}

PartitionSizes ComputePartitionSizes(size_t n) {
  if (n < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("need at least 3 products to split, got {}", n));
  }
  PartitionSizes sizes;
  // round_half_up(n / 5) and round_half_up(m / 8).
  sizes.test = (2 * n + 5) / 10;
  sizes.val = (n - sizes.test + 4) / 8;
  sizes.val = std::max<size_t>(sizes.val, 1);
  sizes.train = n - sizes.test - sizes.val;
  return sizes;
}

SplitSpec SplitProducts(std::vector<std::string> product_ids, uint64_t seed) {
  std::sort(product_ids.begin(), product_ids.end());
  product_ids.erase(std::unique(product_ids.begin(), product_ids.end()),
                    product_ids.end());
  const PartitionSizes sizes = ComputePartitionSizes(product_ids.size());

  Xoshiro256 rng(seed);
  rng.Shuffle(std::span<std::string>(product_ids));

  SplitSpec spec;
  spec.seed = seed;
  auto first = product_ids.begin();
  spec.test_products.assign(first, first + sizes.test);
  first += sizes.test;
  spec.val_products.assign(first, first + sizes.val);
  first += sizes.val;
  spec.train_products.assign(first, product_ids.end());
  for (auto* ids : {&spec.test_products, &spec.val_products, &spec.train_products}) {
    std::sort(ids->begin(), ids->end());
  }
  return spec;
}

SplitSpec SplitByProduct(const Corpus& corpus, uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(corpus.examples.size());
  for (const auto& e : corpus.examples) ids.push_back(e.review.product_id);
  return SplitProducts(std::move(ids), seed);
}

SplitData Materialize(const Corpus& corpus, const SplitSpec& spec) {
  enum Part { kTrain, kVal, kTest };
  std::unordered_map<std::string, Part> part;
  for (const auto& id : spec.train_products) part.emplace(id, kTrain);
  for (const auto& id : spec.val_products) part.emplace(id, kVal);
  for (const auto& id : spec.test_products) part.emplace(id, kTest);

  SplitData data;
  for (const auto& e : corpus.examples) {
    auto it = part.find(e.review.product_id);
    if (it == part.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("product {} is not assigned by the split",
                              e.review.product_id));
    }
    switch (it->second) {
      case kTrain: data.train.push_back(e); break;
      case kVal: data.val.push_back(e); break;
      case kTest: data.test.push_back(e); break;
    }
  }
  return data;
}

void WriteSplit(const SplitSpec& spec, const std::filesystem::path& path) {
  WriteFile(path, spec.ToJson());
}

SplitSpec ReadSplit(const std::filesystem::path& path) {
  return SplitSpec::FromJson(ReadFile(path));
}

}  // namespace helprank
