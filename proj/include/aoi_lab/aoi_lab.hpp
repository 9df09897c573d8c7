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

#include "aoi_lab/analysis.hpp"
#include "aoi_lab/busy_time.hpp"
#include "aoi_lab/errors.hpp"
#include "aoi_lab/leakage.hpp"
#include "aoi_lab/params.hpp"
#include "aoi_lab/penalty.hpp"
#include "aoi_lab/presampling.hpp"
#include "aoi_lab/random.hpp"
#include "aoi_lab/sim.hpp"
