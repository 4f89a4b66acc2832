// Copyright 2026 The qmlab developers
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

namespace qmlab {

// Base class for all qmlab exceptions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimMismatch : Error {
  explicit DimMismatch(const std::string& what) : Error(what) {}
};

struct NotHermitian : Error {
  explicit NotHermitian(const std::string& what) : Error(what) {}
};

struct NotPositive : Error {
  explicit NotPositive(const std::string& what) : Error(what) {}
};

struct BadTrace : Error {
  explicit BadTrace(const std::string& what) : Error(what) {}
};

struct BadNorm : Error {
  explicit BadNorm(const std::string& what) : Error(what) {}
};

// Violated precondition (bad count, range, or argument combination).
struct BadArgument : Error {
  explicit BadArgument(const std::string& what) : Error(what) {}
};

struct ConvergenceFailure : Error {
  explicit ConvergenceFailure(const std::string& what) : Error(what) {}
};

// Thrown by Kraus extraction when the Choi matrix has a negative eigenvalue.
struct NotCompletelyPositive : Error {
  NotCompletelyPositive(const std::string& what, double min_eig)
      : Error(what), min_choi_eigenvalue(min_eig) {}
  double min_choi_eigenvalue;
};

struct UnknownLabel : Error {
  explicit UnknownLabel(const std::string& what) : Error(what) {}
};

struct ZeroProbabilityOutcome : Error {
  explicit ZeroProbabilityOutcome(const std::string& what) : Error(what) {}
};

struct BadPartition : Error {
  explicit BadPartition(const std::string& what) : Error(what) {}
};

struct EmptyRun : Error {
  explicit EmptyRun(const std::string& what) : Error(what) {}
};

struct Overflow : Error {
  explicit Overflow(const std::string& what) : Error(what) {}
};

// Malformed input data (JSON state, map, or experiment files).
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace qmlab
