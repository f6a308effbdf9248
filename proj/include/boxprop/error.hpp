// Copyright 2026 The boxprop Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxprop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed `.fg` input. `line()` is 1-based, 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Structurally invalid graph or factor (dense ids, table sizes, negative entries).
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Normalization of a measure whose entries are all zero.
class ZeroMeasureError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or table would exceed a configured size limit.
class CapacityExceededError : public Error {
 public:
  using Error::Error;
};

/// Scope or domain-size disagreement between operands.
class ScopeError : public Error {
 public:
  using Error::Error;
};

}  // namespace boxprop
