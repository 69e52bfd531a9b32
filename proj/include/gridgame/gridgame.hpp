// Copyright 2026 The GridGame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "gridgame/error.hpp"
#include "gridgame/experiments.hpp"
#include "gridgame/gamesolve.hpp"
#include "gridgame/marl.hpp"
#include "gridgame/matrix.hpp"
#include "gridgame/metrics.hpp"
#include "gridgame/netmodel.hpp"
#include "gridgame/parallel.hpp"
#include "gridgame/payoff.hpp"
#include "gridgame/random.hpp"
#include "gridgame/scenario.hpp"
#include "gridgame/simplex.hpp"
#include "gridgame/stats.hpp"

namespace gridgame {
inline constexpr const char* kVersion = "1.0.0";
}
