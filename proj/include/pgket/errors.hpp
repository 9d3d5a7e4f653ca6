// Copyright 2026 The PGKET Authors
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

#ifndef PGKET_ERRORS_HPP_
#define PGKET_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pgket {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument violates a precondition (index range, non-unitary matrix, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A requested allocation exceeds the configured memory budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Fock-space truncation leakage exceeds the caller-supplied tolerance.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A file does not match its declared binary format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A dataset cannot satisfy the request (too few samples, label mismatch).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A configuration document is malformed or contains unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Training produced non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// An operation was invoked in a mode that does not support it.
class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

/// Invariant violation inside the library itself.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pgket

#endif  // PGKET_ERRORS_HPP_
