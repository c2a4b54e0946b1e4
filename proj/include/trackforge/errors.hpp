// Copyright 2026 The Trackforge Authors
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

namespace trackforge {

// Raised when an operation is called outside its documented preconditions.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The raw progress-per-distance reward has no value when the distance
// increment is zero.
class UndefinedReward : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trackforge
