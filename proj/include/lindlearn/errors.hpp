// Copyright 2026 The lindlearn Authors
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

namespace lindlearn {

/** Base class for all library errors. */
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Invalid user input: bad Pauli text, malformed model file, bad parameters. */
struct InvalidInputError : Error {
  using Error::Error;
};

struct SizeMismatchError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

/** Model validation failures. */
struct NonHermitianKossakowskiError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct NotPSDError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct IdentityTermPresentError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct NotNormalizedError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

/** Numeric failures (exit code 3 in the CLI). */
struct NumericError : Error {
  using Error::Error;
};
struct NonConvergentError : NumericError {
  using NumericError::NumericError;
};
struct RankStalledError : NumericError {
  using NumericError::NumericError;
};
struct SingularError : NumericError {
  using NumericError::NumericError;
};

/** Resource-cap breaches (exit code 4 in the CLI). */
struct CapError : Error {
  using Error::Error;
};
struct CapExceededError : CapError {
  using CapError::CapError;
};
struct DegreeTooSmallError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct DegreeCapError : CapError {
  using CapError::CapError;
};
struct ShotBudgetOverflowError : CapError {
  using CapError::CapError;
};
struct LocalityCapExceededError : CapError {
  using CapError::CapError;
};

struct IdentityInputError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct KappaOutOfRangeError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct ZeroRetentionError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

}  // namespace lindlearn
