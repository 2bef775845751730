// Copyright 2026 The sdkick Authors
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

#include <stdexcept>
#include <string>

namespace sdkick {

/// Invalid user input or violated parameter invariant. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Trap parameters outside the Mathieu stability region (a_z + q_z^2/2 < 0).
class UnstableTrapError : public ConfigError {
   public:
    using ConfigError::ConfigError;
};

/// Failure during propagation: step underflow, truncation or cutoff inadequacy.
/// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace sdkick
