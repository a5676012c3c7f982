// Copyright 2026 The macrocat Authors
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

#include <functional>
#include <stdexcept>
#include <string>

namespace macrocat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain (bad dimension, efficiency, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-normalizable density, failed convergence
/// contract, degenerate state, violated internal invariant.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Both conditional amplitudes vanish; there is no state to normalize.
class DegenerateInput : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Malformed configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File-system or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Recoverable diagnostics (truncation warnings and similar). The default
// handler prints to stderr; set_warning_handler(nullptr) silences output.
using WarningHandler = std::function<void(const std::string&)>;

void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

/// Number of warnings emitted since the last reset (process-wide).
std::size_t warning_count();
void reset_warning_count();

/// Installs a handler for the lifetime of the guard and restores the
/// previous one on destruction.
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler);
  ~ScopedWarningHandler();
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace macrocat
