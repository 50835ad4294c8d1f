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

#ifndef HELPRANK_TEXT_H_
#define HELPRANK_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace helprank {

// UTF-8 text helpers. Invalid byte sequences are treated as non-letter,
// non-whitespace code points.

// True if the text contains at least one Unicode letter (general category L*).
bool ContainsLetter(std::string_view text);

// Number of maximal runs of non-whitespace code points.
size_t CountWords(std::string_view text);

// Lowercased maximal runs of Unicode letters; everything else separates.
std::vector<std::string> LetterTokens(std::string_view text);

}  // namespace helprank

#endif  // HELPRANK_TEXT_H_
