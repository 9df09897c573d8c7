// Copyright 2026 The aoi-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aoi_lab {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidDistribution,
  kDomain,
  kDivergentLeakage,
  kDivergentPenalty,
  kInfeasibleBudget,
  kDegenerateChannel,
  kUnsupportedClosedForm,
  kBracketFailure,
  kOverflow,
};

constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidDistribution: return "invalid-distribution";
    case ErrorCode::kDomain: return "domain-error";
    case ErrorCode::kDivergentLeakage: return "divergent-leakage";
    case ErrorCode::kDivergentPenalty: return "divergent-penalty";
    case ErrorCode::kInfeasibleBudget: return "infeasible-budget";
    case ErrorCode::kDegenerateChannel: return "degenerate-channel";
    case ErrorCode::kUnsupportedClosedForm: return "unsupported-closed-form";
    case ErrorCode::kBracketFailure: return "bracket-failure";
    case ErrorCode::kOverflow: return "overflow";
  }
  return "unknown";
}

// Every failure raised by the library carries one of the codes above so
// front ends can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aoi_lab
