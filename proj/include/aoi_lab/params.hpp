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

#include <cmath>

#include "aoi_lab/busy_time.hpp"
#include "aoi_lab/errors.hpp"
#include "aoi_lab/leakage.hpp"
#include "aoi_lab/penalty.hpp"

namespace aoi_lab {

struct SystemParams {
  double epsilon = 0.0;  // erasure probability
  int k_max = 1;         // transmission attempts per sample
  double delta = 0.0;    // leakage budget
  BusyTimeDistribution busy = BusyTimeDistribution::MakeExponential(1.0);
  LeakageModel leakage = LeakageModel::MakeSyntheticExp(1.0);
  AgePenalty penalty = AgePenalty::MakeLinear();

  void Validate() const {
    if (epsilon == 1.0) {
      throw Error(ErrorCode::kDegenerateChannel,
                  "erasure probability 1 never delivers an update");
    }
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "erasure probability must lie in [0, 1)");
    }
    if (k_max < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "retransmission cap must be at least 1");
    }
    if (!(delta >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "leakage budget must be nonnegative");
    }
  }
};

}  // namespace aoi_lab
