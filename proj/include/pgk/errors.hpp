// Copyright 2026 The pgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGK_ERRORS_HPP
#define PGK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pgk {

/// Base of every error thrown by this library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, malformed input, or a violated hypothesis. Maps to CLI
/// exit code 2.
class usage_error : public error {
 public:
  using error::error;
};

/// Expression text could not be parsed; carries the byte offset of the
/// first offending character.
class parse_error : public usage_error {
 public:
  parse_error(const std::string& what, std::size_t offset)
      : usage_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// An exponent or parameter outside the range a quantity is defined for.
class hypothesis_error : public usage_error {
 public:
  using usage_error::usage_error;
};

/// A computation would exceed a configured bound (sieve hard limit,
/// segment budget). Maps to CLI exit code 1.
class resource_error : public error {
 public:
  using error::error;
};

/// Base of evaluation-time errors.
class eval_error : public error {
 public:
  using error::error;
};

/// The enclosure's upper bound is <= 0: the value is certainly not a
/// positive number. Definitive; escalating precision cannot help.
class nonpositive_error : public eval_error {
 public:
  using eval_error::eval_error;
};

/// log/sqrt of a certainly-nonpositive enclosure, division by exact zero,
/// or a similar unrecoverable domain violation.
class domain_error : public eval_error {
 public:
  using eval_error::eval_error;
};

/// An enclosure straddles zero where a definite sign is needed. Callers
/// retry at higher precision; only past the precision cap does this
/// surface as an indeterminate result.
class indeterminate_sign_error : public eval_error {
 public:
  using eval_error::eval_error;
};

}  // namespace pgk

#endif  // PGK_ERRORS_HPP
