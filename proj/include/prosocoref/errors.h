// Copyright 2026 The prosocoref Authors.
//
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

#ifndef PROSOCOREF_ERRORS_H_
#define PROSOCOREF_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prosocoref {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed corpus, config or model input. Carries the 1-based line number
// when the problem can be pinned to a line (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string &message, size_t line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

// Arguments that violate an operation's preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Filesystem failures (cannot open, cannot write).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace prosocoref

#endif  // PROSOCOREF_ERRORS_H_
