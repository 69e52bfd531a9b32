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

#include <string>
#include <vector>

#include "gridgame/matrix.hpp"
#include "gridgame/metrics.hpp"
#include "gridgame/parallel.hpp"
#include "gridgame/scenario.hpp"

namespace gridgame::resilience {

struct PayoffBuild {
  PayoffMatrix matrix;
  std::vector<ResilienceScorecard> cards;  // row-major, same shape as matrix
};

// Evaluates every (attack, defense) cell independently; cells may run on
// several threads but each lands in its own slot.
inline PayoffBuild build_payoff_detailed(const net::NetworkState& base,
                                         const scenario::ScenarioCatalog& catalog,
                                         const AhpWeights& weights, unsigned workers = thread_budget()) {
  const std::size_t m = catalog.attacks.size();
  const std::size_t n = catalog.defenses.size();
  PayoffBuild out{PayoffMatrix(m, n), std::vector<ResilienceScorecard>(m * n)};
  for (std::size_t i = 0; i < m; ++i) out.matrix.attack_ids[i] = catalog.attacks[i].id;
  for (std::size_t j = 0; j < n; ++j) out.matrix.defense_ids[j] = catalog.defenses[j].id;
  parallel_for(
      m * n,
      [&](std::size_t cell) {
        const std::size_t i = cell / n, j = cell % n;
        try {
          out.cards[cell] = scenario::evaluate_pair(base, catalog.attacks[i], catalog.defenses[j]);
        } catch (const CatalogError& e) {
          throw CatalogError("cell (" + catalog.attacks[i].id + ", " + catalog.defenses[j].id +
                             "): " + e.what());
        }
        out.matrix(i, j) = unified_score(out.cards[cell], weights);
      },
      workers);
  return out;
}

inline PayoffMatrix build_payoff_matrix(const net::NetworkState& base,
                                        const scenario::ScenarioCatalog& catalog,
                                        const AhpWeights& weights, unsigned workers = thread_budget()) {
  return build_payoff_detailed(base, catalog, weights, workers).matrix;
}

}  // namespace gridgame::resilience
