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

// Dense tableau simplex for   max c'x  s.t.  A x <= b,  x >= 0,  b >= 0.
// The all-slack basis is feasible, so no phase one is needed. Bland's rule
// keeps degenerate pivots from cycling.

#include <cmath>
#include <limits>
#include <vector>

#include "gridgame/error.hpp"

namespace gridgame::lp {

struct Solution {
  std::vector<double> primal;  // x, size = columns of A
  std::vector<double> dual;    // y, size = rows of A
  double objective = 0.0;
  int pivots = 0;
};

inline Solution maximize(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                         const std::vector<double>& c, double eps = 1e-12) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw SolverError("simplex: ragged constraint matrix");
    if (b[i] < 0.0) throw SolverError("simplex: right-hand side must be non-negative");
  }
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][width - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  Solution sol;
  const int max_pivots = 50 * static_cast<int>(m + n) + 1000;
  for (;;) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= eps) continue;
      const double ratio = t[i][width - 1] / t[i][enter];
      if (leave == m || ratio < best - eps ||
          (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) throw SolverError("simplex: problem is unbounded");

    const double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
    if (++sol.pivots > max_pivots) throw SolverError("simplex: pivot limit exceeded");
  }

  sol.primal.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.primal[basis[i]] = t[i][width - 1];
  }
  sol.dual.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) sol.dual[i] = t[m][n + i];
  sol.objective = t[m][width - 1];
  return sol;
}

}  // namespace gridgame::lp
