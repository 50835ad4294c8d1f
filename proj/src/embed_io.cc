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

#include "helprank/embed_io.h"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

#include "helprank/features.h"
#include "helprank/io_util.h"

namespace helprank {
namespace {

constexpr size_t kHeaderFixedSize = 28;

template <typename T>
void PutLe(std::string& out, T value) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out += static_cast<char>((static_cast<uint64_t>(value) >> (8 * i)) & 0xFF);
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  uint64_t offset() const { return offset_; }
  bool at_end() const { return offset_ == bytes_.size(); }
  size_t remaining() const { return bytes_.size() - offset_; }

  template <typename T>
  T Le(const char* what) {
    Need(sizeof(T), what);
    uint64_t value = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<uint64_t>(static_cast<uint8_t>(bytes_[offset_ + i]))
               << (8 * i);
    }
    offset_ += sizeof(T);
    return static_cast<T>(value);
  }

  std::string_view Bytes(size_t n, const char* what) {
    Need(n, what);
    auto out = bytes_.substr(offset_, n);
    offset_ += n;
    return out;
  }

 private:
  void Need(size_t n, const char* what) {
    if (remaining() < n) {
      throw EmbeddingFormatError(
          EmbeddingFormatError::Kind::kTruncated, offset_,
          fmt::format("truncated embedding file: need {} bytes for {} at byte "
                      "offset {}, {} left",
                      n, what, offset_, remaining()));
    }
  }

  std::string_view bytes_;
  uint64_t offset_ = 0;
};

}  // namespace

const char* PoolingName(Pooling pooling) {
  return pooling == Pooling::kCls ? "cls" : "mean";
}

Pooling ParsePooling(std::string_view name) {
  if (name == "cls") return Pooling::kCls;
  if (name == "mean") return Pooling::kMean;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown pooling '{}'", name));
}

EmbeddingFormatError::EmbeddingFormatError(Kind kind, uint64_t offset,
                                           const std::string& message)
    : Error(ErrorCode::kFormat, message), kind_(kind), offset_(offset) {}

std::string EncodeEmbeddings(std::span<const EmbeddingRecord> records, uint32_t dim,
                             Pooling pooling, const std::string& producer) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be >= 1");
  std::unordered_set<std::string_view> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.review_id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("duplicate review id {}", r.review_id));
    }
    if (r.vector.size() != dim) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("record {} has dim {}, expected {}", r.review_id,
                              r.vector.size(), dim));
    }
    for (float v : r.vector) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite,
                    fmt::format("record {} has a non-finite component", r.review_id));
      }
    }
  }
  std::string out;
  out.reserve(kHeaderFixedSize + producer.size() +
              records.size() * (4 + 16 + 4 * static_cast<size_t>(dim)));
  out.append(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  PutLe<uint8_t>(out, kEmbeddingVersion);
  PutLe<uint8_t>(out, static_cast<uint8_t>(pooling));
  PutLe<uint16_t>(out, 0);
  PutLe<uint32_t>(out, dim);
  PutLe<uint64_t>(out, records.size());
  PutLe<uint32_t>(out, static_cast<uint32_t>(producer.size()));
  out += producer;
  for (const auto& r : records) {
    PutLe<uint32_t>(out, static_cast<uint32_t>(r.review_id.size()));
    out += r.review_id;
    for (float v : r.vector) PutLe<uint32_t>(out, std::bit_cast<uint32_t>(v));
  }
  return out;
}

void WriteEmbeddings(std::span<const EmbeddingRecord> records, uint32_t dim,
                     Pooling pooling, const std::filesystem::path& path,
                     const std::string& producer) {
  WriteFile(path, EncodeEmbeddings(records, dim, pooling, producer));
}

EmbeddingFile DecodeEmbeddings(std::string_view bytes) {
  using Kind = EmbeddingFormatError::Kind;
  ByteReader in(bytes);
  EmbeddingFile file;
  if (in.Bytes(sizeof(kEmbeddingMagic), "magic") !=
      std::string_view(kEmbeddingMagic, sizeof(kEmbeddingMagic))) {
    throw EmbeddingFormatError(Kind::kBadMagic, 0, "bad magic at byte offset 0");
  }
  file.version = in.Le<uint8_t>("version");
  if (file.version != kEmbeddingVersion) {
    throw EmbeddingFormatError(
        Kind::kUnsupportedVersion, 8,
        fmt::format("unsupported embedding format version {} at byte offset 8 "
                    "(supported: {})",
                    file.version, kEmbeddingVersion));
  }
  const uint8_t pooling = in.Le<uint8_t>("pooling");
  if (pooling > 1) {
    throw EmbeddingFormatError(Kind::kInvalidRecord, 9,
                               fmt::format("unknown pooling tag {} at byte offset 9",
                                           pooling));
  }
  file.pooling = static_cast<Pooling>(pooling);
  in.Le<uint16_t>("reserved");
  file.dim = in.Le<uint32_t>("dim");
  if (file.dim == 0) {
    throw EmbeddingFormatError(Kind::kInvalidRecord, 12,
                               "embedding dim 0 at byte offset 12");
  }
  const uint64_t count = in.Le<uint64_t>("count");
  const uint32_t meta = in.Le<uint32_t>("metadata length");
  file.producer = std::string(in.Bytes(meta, "metadata"));

  std::unordered_set<std::string> ids;
  for (uint64_t i = 0; i < count; ++i) {
    if (in.at_end()) {
      throw EmbeddingFormatError(
          Kind::kCountMismatch, in.offset(),
          fmt::format("count mismatch: header declares {} records but the file "
                      "ends after {} at byte offset {}",
                      count, i, in.offset()));
    }
    const uint64_t record_offset = in.offset();
    EmbeddingRecord record;
    const uint32_t id_length = in.Le<uint32_t>("id length");
    record.review_id = std::string(in.Bytes(id_length, "review id"));
    const std::string_view raw =
        in.Bytes(4 * static_cast<size_t>(file.dim), "vector components");
    ByteReader components(raw);
    record.vector.resize(file.dim);
    for (auto& v : record.vector) {
      v = std::bit_cast<float>(components.Le<uint32_t>("vector component"));
      if (!std::isfinite(v)) {
        throw EmbeddingFormatError(
            Kind::kInvalidRecord, record_offset,
            fmt::format("record {} at byte offset {} has a non-finite component",
                        record.review_id, record_offset));
      }
    }
    if (!ids.insert(record.review_id).second) {
      throw EmbeddingFormatError(
          Kind::kInvalidRecord, record_offset,
          fmt::format("duplicate review id {} at byte offset {}", record.review_id,
                      record_offset));
    }
    file.records.push_back(std::move(record));
  }
  if (!in.at_end()) {
    throw EmbeddingFormatError(
        Kind::kCountMismatch, in.offset(),
        fmt::format("count mismatch: {} trailing bytes after {} declared records "
                    "at byte offset {}",
                    in.remaining(), count, in.offset()));
  }
  return file;
}

EmbeddingFile ReadEmbeddings(const std::filesystem::path& path) {
  try {
    return DecodeEmbeddings(ReadFile(path));
  } catch (const EmbeddingFormatError& e) {
    throw EmbeddingFormatError(e.kind(), e.offset(),
                               fmt::format("{}: {}", path.string(), e.what()));
  }
}

EmbeddingFile ReadEmbeddingsCsv(const std::filesystem::path& path) {
  EmbeddingFile file;
  file.producer = "csv:" + path.filename().string();
  LineReader reader(path);
  std::string line;
  std::unordered_set<std::string> ids;
  bool first = true;
  while (reader.Next(line)) {
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (first && fields[0] == "review_id") {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() < 2) {
      throw Error(ErrorCode::kParse, fmt::format("{}:{}: expected id and values",
                                                 path.string(), reader.line_number()));
    }
    EmbeddingRecord record;
    record.review_id = fields[0];
    for (size_t i = 1; i < fields.size(); ++i) {
      const double v = ParseDouble(fields[i]);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite, fmt::format("{}:{}: non-finite value",
                                                       path.string(),
                                                       reader.line_number()));
      }
      record.vector.push_back(static_cast<float>(v));
    }
    if (file.records.empty()) file.dim = static_cast<uint32_t>(record.vector.size());
    if (record.vector.size() != file.dim) {
      throw Error(ErrorCode::kParse, fmt::format("{}:{}: dim {} differs from {}",
                                                 path.string(), reader.line_number(),
                                                 record.vector.size(), file.dim));
    }
    if (!ids.insert(record.review_id).second) {
      throw Error(ErrorCode::kParse, fmt::format("{}:{}: duplicate review id {}",
                                                 path.string(), reader.line_number(),
                                                 record.review_id));
    }
    file.records.push_back(std::move(record));
  }
  return file;
}

EmbeddingFile LoadEmbeddings(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return ReadEmbeddingsCsv(path);
  return ReadEmbeddings(path);
}

namespace {

// Names at most the first 20 ids; missing() has all of them.
std::string DescribeMissing(const std::vector<std::string>& missing) {
  constexpr size_t kShown = 20;
  const size_t shown = std::min(missing.size(), kShown);
  std::string message =
      fmt::format("{} review id(s) have no embedding: {}", missing.size(),
                  fmt::join(missing.begin(), missing.begin() + shown, ", "));
  if (missing.size() > shown) {
    message += fmt::format(" and {} more", missing.size() - shown);
  }
  return message;
}

}  // namespace

JoinError::JoinError(std::vector<std::string> missing)
    : Error(ErrorCode::kJoin, DescribeMissing(missing)), missing_(std::move(missing)) {}

HeadData Join(std::span<const LabeledExample> examples,
              const EmbeddingFile& embeddings, bool with_side) {
  std::unordered_map<std::string_view, size_t> index;
  index.reserve(embeddings.records.size());
  for (size_t i = 0; i < embeddings.records.size(); ++i) {
    index.emplace(embeddings.records[i].review_id, i);
  }
  HeadData data;
  data.dim = embeddings.dim;
  std::vector<std::string> missing;
  for (const auto& e : examples) {
    auto it = index.find(e.review.review_id);
    if (it == index.end()) {
      missing.push_back(e.review.review_id);
      continue;
    }
    if (!missing.empty()) continue;
    const auto& v = embeddings.records[it->second].vector;
    data.ids.push_back(e.review.review_id);
    data.embeddings.insert(data.embeddings.end(), v.begin(), v.end());
    if (with_side) {
      const auto side = SideFeatures(e);
      data.side.insert(data.side.end(), side.values.begin(), side.values.end());
    }
    data.targets.push_back(e.target);
  }
  if (!missing.empty()) throw JoinError(std::move(missing));
  return data;
}

}  // namespace helprank
