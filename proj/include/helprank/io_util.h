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

#ifndef HELPRANK_IO_UTIL_H_
#define HELPRANK_IO_UTIL_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace helprank {

// Line reader over plain or gzip-compressed files (zlib reads both
// transparently). Trailing '\n' and '\r' are stripped.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool Next(std::string& line);
  size_t line_number() const { return line_number_; }

 private:
  void* file_;
  size_t line_number_ = 0;
  std::string path_;
};

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

std::string Sha256Hex(std::string_view data);

// Shortest decimal representation that round-trips to the same double.
std::string FormatDouble(double value);

// Minimal RFC 4180 CSV support: quoted fields, doubled quotes, no embedded
// newlines.
std::vector<std::string> SplitCsvLine(std::string_view line);
std::string CsvField(std::string_view field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  int Column(std::string_view name) const;
};

CsvTable ReadCsv(const std::filesystem::path& path);

double ParseDouble(std::string_view text);

}  // namespace helprank

#endif  // HELPRANK_IO_UTIL_H_
