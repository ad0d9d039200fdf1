// Copyright 2026 The endoid Authors
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

#ifndef ENDOID_ERROR_HPP_
#define ENDOID_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace endoid {

/// Base class of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the model was violated (invalid diagram, infeasible
/// strategy, bad partition, ...). Maps to CLI exit status 1.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A size ceiling was hit. `count` is the exact quantity that exceeded it.
class CapacityError : public DomainError {
 public:
  CapacityError(const std::string& what, std::uint64_t count, std::uint64_t limit)
      : DomainError(what), count_(count), limit_(limit) {}

  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t count_;
  std::uint64_t limit_;
};

/// Malformed input text. Maps to CLI exit status 2.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// File system failure. Maps to CLI exit status 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace endoid

#endif  // ENDOID_ERROR_HPP_
