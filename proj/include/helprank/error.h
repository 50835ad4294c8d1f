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

#ifndef HELPRANK_ERROR_H_
#define HELPRANK_ERROR_H_

#include <stdexcept>
#include <string>

namespace helprank {

enum class ErrorCode {
  kIo,
  kParse,
  kInvalidArgument,
  kDomain,
  kSchemaMismatch,
  kUndefinedCorrelation,
  kNonFinite,
  kFormat,
  kJoin,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (the CLI, the experiment runner) classify failures without
// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace helprank

#endif  // HELPRANK_ERROR_H_
