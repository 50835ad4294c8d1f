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

#ifndef HELPRANK_EMBED_IO_H_
#define HELPRANK_EMBED_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "helprank/corpus.h"
#include "helprank/error.h"
#include "helprank/head.h"

namespace helprank {

// Binary embedding file, version 1. All integers little-endian.
//
//   offset  size  field
//   0       8     magic "HRANKEMB"
//   8       1     format version (1)
//   9       1     pooling: 0 = cls, 1 = mean
//   10      2     reserved, zero
//   12      4     dim (uint32)
//   16      8     record count (uint64)
//   24      4     producer metadata length M (uint32)
//   28      M     producer metadata, UTF-8
//   then per record:
//           4     review id length L (uint32)
//           L     review id bytes
//           4*dim float32 components (IEEE 754)
inline constexpr char kEmbeddingMagic[8] = {'H', 'R', 'A', 'N', 'K', 'E', 'M', 'B'};
inline constexpr uint8_t kEmbeddingVersion = 1;

enum class Pooling : uint8_t { kCls = 0, kMean = 1 };
const char* PoolingName(Pooling pooling);
Pooling ParsePooling(std::string_view name);

struct EmbeddingRecord {
  std::string review_id;
  std::vector<float> vector;
  bool operator==(const EmbeddingRecord&) const = default;
};

struct EmbeddingFile {
  uint8_t version = kEmbeddingVersion;
  uint32_t dim = 0;
  Pooling pooling = Pooling::kCls;
  std::string producer;
  std::vector<EmbeddingRecord> records;
};

// Raised for malformed embedding files; offset is the byte position where
// reading failed.
class EmbeddingFormatError : public Error {
 public:
  enum class Kind { kBadMagic, kUnsupportedVersion, kTruncated, kCountMismatch,
                    kInvalidRecord };
  EmbeddingFormatError(Kind kind, uint64_t offset, const std::string& message);
  Kind kind() const { return kind_; }
  uint64_t offset() const { return offset_; }

 private:
  Kind kind_;
  uint64_t offset_;
};

// Validates everything (uniform dim, unique ids, finite values) before any
// byte is written.
std::string EncodeEmbeddings(std::span<const EmbeddingRecord> records, uint32_t dim,
                             Pooling pooling, const std::string& producer = "");
void WriteEmbeddings(std::span<const EmbeddingRecord> records, uint32_t dim,
                     Pooling pooling, const std::filesystem::path& path,
                     const std::string& producer = "");

EmbeddingFile DecodeEmbeddings(std::string_view bytes);
EmbeddingFile ReadEmbeddings(const std::filesystem::path& path);

// Fixture format: one "review_id,v1,...,vd" line per record; a first line
// starting with "review_id" is a header. Tagged as cls pooling.
EmbeddingFile ReadEmbeddingsCsv(const std::filesystem::path& path);

// Dispatches on extension: ".csv" reads the CSV fixture format.
EmbeddingFile LoadEmbeddings(const std::filesystem::path& path);

// Raised by Join with every review id that has no embedding.
class JoinError : public Error {
 public:
  explicit JoinError(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// Rows in `examples` order, with raw (unnormalized) side features
// [stars, word_count] when with_side is set.
HeadData Join(std::span<const LabeledExample> examples,
              const EmbeddingFile& embeddings, bool with_side);

}  // namespace helprank

#endif  // HELPRANK_EMBED_IO_H_
