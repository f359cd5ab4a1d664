// Copyright 2026 The qbranch Authors
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

namespace qbranch {

/// Coarse classification used to map failures onto process exit codes and
/// C API status values.
enum class ErrorCategory {
  Config,        // malformed scenario or arguments
  Precondition,  // numerical or structural precondition violated
  Budget,        // a search ran out of its configured budget
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define QBRANCH_DEFINE_ERROR(Name, Category)                          \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what)                            \
        : Error(ErrorCategory::Category, #Name ": " + what) {}        \
  }

QBRANCH_DEFINE_ERROR(ConfigError, Config);

QBRANCH_DEFINE_ERROR(DimensionError, Precondition);
QBRANCH_DEFINE_ERROR(HermiticityError, Precondition);
QBRANCH_DEFINE_ERROR(UnitarityError, Precondition);
QBRANCH_DEFINE_ERROR(BranchAmbiguityError, Precondition);
QBRANCH_DEFINE_ERROR(ObservableError, Precondition);
QBRANCH_DEFINE_ERROR(ZeroBornWeightError, Precondition);
QBRANCH_DEFINE_ERROR(AdmissibilityError, Precondition);
QBRANCH_DEFINE_ERROR(NearOrthogonalError, Precondition);
QBRANCH_DEFINE_ERROR(TimeOrderError, Precondition);
QBRANCH_DEFINE_ERROR(WindowError, Precondition);
QBRANCH_DEFINE_ERROR(InvalidArgument, Precondition);

QBRANCH_DEFINE_ERROR(InfeasibleError, Budget);
QBRANCH_DEFINE_ERROR(BudgetError, Budget);
QBRANCH_DEFINE_ERROR(StagnationError, Budget);
QBRANCH_DEFINE_ERROR(SizeCapError, Budget);

#undef QBRANCH_DEFINE_ERROR

}  // namespace qbranch
