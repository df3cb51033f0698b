// Copyright 2026 The qtomo Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtomo {

/// Raised when an argument lies outside an operation's domain (angles,
/// epsilon, photon numbers, mismatched dimensions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when Cholesky parameters are too close to the origin to normalize.
class DegenerateParametersError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Parse or validation failure in an input file. `line()` is 1-based, 0 when
/// the problem is not tied to a particular line.
class FileFormatError : public std::runtime_error {
 public:
  FileFormatError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace qtomo
