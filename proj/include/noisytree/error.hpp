// Copyright 2026 The Authors.
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

#ifndef NOISYTREE_ERROR_HPP_
#define NOISYTREE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace noisytree {

enum class ErrorCode {
  // Table validation.
  NonPositivePrior,
  PriorSumMismatch,
  ErrorProbOutOfRange,
  UselessTest,
  DuplicateIdentifier,
  // Partition and tree structure.
  SingletonBlock,
  InapplicableTest,
  InvalidPartition,
  UnknownClass,
  UnknownTest,
  // Metrics and construction.
  ZeroErrorMass,
  InseparableClasses,
  DepthGuardExceeded,
  InstanceTooLarge,
  // Fusion.
  EvenVoteCount,
  DomainError,
  // Worker assignment.
  UnknownStrategy,
  // Files and command line.
  ParseError,
  CrossReference,
  IoError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace noisytree

#endif  // NOISYTREE_ERROR_HPP_
