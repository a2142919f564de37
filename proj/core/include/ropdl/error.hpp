// Copyright 2026 The ropdl Authors
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

namespace ropdl {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or option was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The input is valid but carries no information for the requested
/// operation (e.g. the leading singular triple of a zero matrix).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// An internal invariant that the caller promised (e.g. rank <= 1) does
/// not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// An iterative solver produced a non-finite iterate.
class Diverged : public Error {
 public:
  Diverged(const std::string& what, int iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Malformed input file. `position` is a byte offset for binary formats
/// and a 1-based line number for text formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ropdl
