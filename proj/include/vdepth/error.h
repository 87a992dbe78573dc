// Copyright 2026 The vdepth Authors. All Rights Reserved.
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

#ifndef VDEPTH_ERROR_H_
#define VDEPTH_ERROR_H_

#include <stdexcept>
#include <string>

namespace vdepth {

// Base class of every error raised by the library. The CLI maps each
// subclass to its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File that cannot be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents, or a value the target format cannot hold.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Tensor or map shapes that do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (t outside [0,1], non-positive
// depth in a ratio metric, non-finite loss input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Least-squares affine fit whose reference side has (near) zero variance.
class DegenerateOverlap : public Error {
 public:
  using Error::Error;
};

// Invalid job configuration or manifest.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vdepth

#endif  // VDEPTH_ERROR_H_
