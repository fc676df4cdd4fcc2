// Copyright 2026 The cfmaps Authors.
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

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cfmaps {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file failed to parse. `line()` is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Mesh connectivity or geometry violates a structural invariant.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An iterative or direct solver did not reach the requested accuracy.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument combination (dimension mismatch, out-of-range parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A structured, non-fatal diagnostic.
struct Warning {
  std::string code;
  std::string message;
};

using WarningSink = std::function<void(const Warning&)>;

/// Installs a process-wide sink and returns the previous one. An empty sink
/// restores the default, which prints `warning[code]: message` to stderr.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view code, std::string_view message);

/// Captures warnings emitted on any thread while alive; restores the previous
/// sink on destruction.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  bool contains(std::string_view code) const;
  std::size_t size() const;

 private:
  struct State;
  State* state_;
  WarningSink previous_;
};

}  // namespace cfmaps
