// Copyright 2026 The qigeo Authors
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

namespace qigeo {

/// Raised when an argument falls outside an operation's domain
/// (bad parameter range, mismatched qubit counts, invalid indices).
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when data cannot support an estimate, e.g. every coincidence bin
/// is empty after accidental subtraction.
class EstimationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised on numerical failure such as a singular design matrix.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qigeo
