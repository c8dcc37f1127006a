// Copyright 2026 The qmonty Authors.
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

namespace qmonty {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QMONTY_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

QMONTY_DEFINE_ERROR(DomainError);           // index / parameter out of range
QMONTY_DEFINE_ERROR(DegenerateStateError);  // all-zero amplitudes
QMONTY_DEFINE_ERROR(NormalizationError);    // weights or trace not summing to 1
QMONTY_DEFINE_ERROR(InvalidStateError);     // density-matrix invariant broken
QMONTY_DEFINE_ERROR(InvalidBasisError);     // non-orthonormal measurement basis
QMONTY_DEFINE_ERROR(ShapeError);            // dimension mismatch
QMONTY_DEFINE_ERROR(InvalidOperatorError);  // non-unitary operator
QMONTY_DEFINE_ERROR(PreconditionError);     // caller broke an operation's precondition
QMONTY_DEFINE_ERROR(ProtocolViolation);     // game action illegal in the current phase
QMONTY_DEFINE_ERROR(ResourceLimitError);    // brute force beyond its size limit

#undef QMONTY_DEFINE_ERROR

}  // namespace qmonty
