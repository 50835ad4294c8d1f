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

#include "helprank/text.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace helprank {
namespace {

// Calls fn(code_point) for each code point; malformed sequences yield -1.
template <typename Fn>
void ForEachCodePoint(std::string_view text, Fn&& fn) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    fn(c);
  }
}

bool IsLetter(UChar32 c) { return c >= 0 && u_isalpha(c); }

bool IsSpace(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }

void AppendUtf8(std::string& out, UChar32 c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, c, error);
  if (!error) out.append(reinterpret_cast<const char*>(buf), n);
}

}  // namespace

bool ContainsLetter(std::string_view text) {
  bool found = false;
  ForEachCodePoint(text, [&](UChar32 c) { found = found || IsLetter(c); });
  return found;
}

size_t CountWords(std::string_view text) {
  size_t words = 0;
  bool in_word = false;
  ForEachCodePoint(text, [&](UChar32 c) {
    const bool space = IsSpace(c);
    if (!space && !in_word) ++words;
    in_word = !space;
  });
  return words;
}

std::vector<std::string> LetterTokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  ForEachCodePoint(text, [&](UChar32 c) {
    if (IsLetter(c)) {
      AppendUtf8(current, u_tolower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  });
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace helprank
