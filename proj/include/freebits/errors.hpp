// Copyright 2026 The freebits Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace freebits {

// Error categories. The numeric values double as CLI exit codes and as the
// status codes of the C API, so they must stay stable.
enum class ErrorCode : int {
  kInput = 2,       // malformed documents, unreadable files, bad arguments
  kUnprofiled = 3,  // a required latency dictionary entry is missing
  kValidation = 4,  // well-formed input that violates a model invariant
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::kInput, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCode::kValidation, what) {}
};

class UnprofiledError : public Error {
 public:
  explicit UnprofiledError(const std::string& what)
      : Error(ErrorCode::kUnprofiled, what) {}
};

}  // namespace freebits
