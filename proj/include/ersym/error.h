// Copyright 2026 The ersym Authors.
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

#ifndef ERSYM_ERROR_H_
#define ERSYM_ERROR_H_

#include <stdexcept>
#include <string>

namespace ersym {

// Base class for all errors raised by the library. The CLI maps
// ValidationError to exit code 1 and every other Error to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed model, policy, config or file content.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A policy was queried at an action-observation history it does not define,
// or a transform would leave the policy's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A configured size cap (trajectory tree, closure, candidate count) was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Training or discovery produced non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ersym

#endif  // ERSYM_ERROR_H_
