// Copyright 2026 The ssdg Authors.
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

namespace ssdg {

/// An input the math cannot handle, e.g. a zero-norm row to normalize.
/// During training this usually means the embedding collapsed.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke a documented precondition (bad label, fake row handed to
/// the real-only discriminator, indivisible batch size, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A loss evaluated to NaN or infinity.
class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssdg
