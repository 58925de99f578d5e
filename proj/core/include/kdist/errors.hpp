// Copyright 2026 The kdist Authors
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

#include <stdexcept>
#include <string>

namespace kdist {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Walk or driver parameters outside the supported regime.
class ParamError : public Error {
 public:
  using Error::Error;
};

/// A brute-force enumeration would exceed its configured size cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Matrix input violates a precondition (not unitary, wrong shape, ...).
class MatrixError : public Error {
 public:
  using Error::Error;
};

/// Generalized-Grover analysis requested outside its valid parameter range.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable external input (instance files, serialized blobs).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace kdist
