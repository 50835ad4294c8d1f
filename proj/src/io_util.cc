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

#include "helprank/io_util.h"

#include <fmt/format.h>
#include <openssl/evp.h>
#include <zlib.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "helprank/error.h"

namespace helprank {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kSchemaMismatch: return "schema_mismatch";
    case ErrorCode::kUndefinedCorrelation: return "undefined_correlation";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kJoin: return "join";
  }
  return "unknown";
}

LineReader::LineReader(const std::filesystem::path& path)
    : path_(path.string()) {
  file_ = gzopen(path_.c_str(), "rb");
  if (file_ == nullptr) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open {}: {}", path_,
                                            std::strerror(errno)));
  }
}

LineReader::~LineReader() {
  if (file_ != nullptr) gzclose(static_cast<gzFile>(file_));
}

bool LineReader::Next(std::string& line) {
  auto* gz = static_cast<gzFile>(file_);
  line.clear();
  char buf[8192];
  bool got_any = false;
  while (gzgets(gz, buf, sizeof(buf)) != nullptr) {
    got_any = true;
    line.append(buf);
    if (!line.empty() && line.back() == '\n') break;
  }
  if (!got_any) {
    int err = 0;
    const char* msg = gzerror(gz, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw Error(ErrorCode::kIo, fmt::format("read error in {}: {}", path_, msg));
    }
    return false;
  }
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
    line.pop_back();
  }
  ++line_number_;
  return true;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open {}", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  }
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

std::string FormatDouble(double value) { return fmt::format("{}", value); }

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, "unterminated quote in CSV line");
  fields.push_back(std::move(field));
  return fields;
}

std::string CsvField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int CsvTable::Column(std::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  LineReader reader(path);
  CsvTable table;
  std::string line;
  if (!reader.Next(line)) {
    throw Error(ErrorCode::kParse, fmt::format("{}: empty CSV file", path.string()));
  }
  table.header = SplitCsvLine(line);
  while (reader.Next(line)) {
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: expected {} fields, got {}", path.string(),
                              reader.line_number(), table.header.size(),
                              fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

double ParseDouble(std::string_view text) {
  double value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse, fmt::format("not a number: '{}'", text));
  }
  return value;
}

}  // namespace helprank
