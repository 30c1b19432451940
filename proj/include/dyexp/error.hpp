// Copyright 2026 The dyexp Authors.
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

namespace dyexp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: losses outside [0,1], bad expert indices, unparsable files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The alive set became empty, grew back, or an expert died outside the horizon.
class ScheduleViolation : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (mass on a dead expert, an
// out-of-order death for a known-order learner, an infinite rate where a
// finite one is required).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Enumeration would exceed its configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace dyexp
