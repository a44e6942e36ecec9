/*
 * Copyright 2026 The pctl Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PCTL_ERRORS_H_
#define PCTL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pctl {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or violated precondition detected before any work.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A contrastive label was requested against an empty pool.
class GatingError : public Error {
 public:
  using Error::Error;
};

// NaN or infinite value reached a loss or an optimizer step.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Unknown user or key.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Input/output failure with path context.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed binary snapshot or checkpoint.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error("decode error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace pctl

#endif  // PCTL_ERRORS_H_
