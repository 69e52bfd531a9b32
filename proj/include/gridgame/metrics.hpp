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

// Resilience metrics for one attack/defense outcome and their AHP synthesis
// into a single defender-maximizing score.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "gridgame/error.hpp"
#include "gridgame/netmodel.hpp"

namespace gridgame::resilience {

namespace flag {
inline constexpr const char* kNonConvergence = "nonconvergence";
inline constexpr const char* kZeroDemand = "zero_demand";
inline constexpr const char* kNoCriticalLoad = "no_critical_load";
inline constexpr const char* kNoDerAvailable = "no_der_available";
inline constexpr const char* kLowVoltage = "low_voltage";
inline constexpr const char* kSwitchNoop = "switch_noop";
}  // namespace flag

struct ResilienceScorecard {
  double lsr = 0.0;
  double clr = 0.0;
  double tss = 0.0;
  double drs = 0.0;
  std::set<std::string> flags;

  std::array<double, 4> values() const { return {lsr, clr, tss, drs}; }
  bool operator==(const ResilienceScorecard&) const = default;
};

// Metric results carry a flag when their denominator is empty.
struct MetricValue {
  double value = 0.0;
  const char* flag = nullptr;
};

// Load served ratio against the pre-attack demand of `base`.
inline MetricValue lsr(const net::ServedLoadReport& report, const net::NetworkState& base) {
  const double demand = base.total_load_p();
  if (demand <= 0.0) return {1.0, flag::kZeroDemand};
  return {std::clamp(report.total_served_p() / demand, 0.0, 1.0)};
}

inline MetricValue clr(const net::ServedLoadReport& report, const net::NetworkState& base) {
  double demand = 0.0, served = 0.0;
  for (const auto& b : base.buses) {
    if (!b.is_critical) continue;
    demand += b.load_p;
    served += report.served_p[base.index_of(b.id)];
  }
  if (demand <= 0.0) return {1.0, flag::kNoCriticalLoad};
  return {std::clamp(served / demand, 0.0, 1.0)};
}

// Buses that sit in the slack island or in an island with an online DER.
inline std::vector<int> energized_buses(const net::NetworkState& state) {
  std::vector<int> out;
  for (const auto& comp : net::islands(state)) {
    if (net::reference_bus(state, comp) != 0) out.insert(out.end(), comp.begin(), comp.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline double tss(const net::NetworkState& state) {
  if (state.size() == 0) return 1.0;
  return static_cast<double>(energized_buses(state).size()) / static_cast<double>(state.size());
}

inline MetricValue drs(const net::ServedLoadReport& report) {
  double used = 0.0, avail = 0.0;
  for (double u : report.der_utilized) used += u;
  for (double a : report.der_available) avail += a;
  if (avail <= 0.0) return {0.0, flag::kNoDerAvailable};
  return {std::clamp(used / avail, 0.0, 1.0)};
}

// ---------------------------------------------------------------------------
// AHP

struct AhpWeights {
  std::vector<double> w;
  double lambda_max = 0.0;
  double consistency_index = 0.0;
  double consistency_ratio = 0.0;
  int iterations = 0;
};

using ComparisonMatrix = std::vector<std::vector<double>>;

// Saaty's random consistency index for n = 1..10.
inline double random_index(std::size_t n) {
  static constexpr std::array<double, 11> kRi = {0.0,  0.0,  0.0,  0.58, 0.90, 1.12,
                                                 1.24, 1.32, 1.41, 1.45, 1.49};
  if (n >= kRi.size()) throw ValidationError("AHP: random index tabulated only up to n = 10");
  return kRi[n];
}

// The matrix every payoff is built from unless the caller supplies another:
// CLR over LSR over DRS over TSS.
inline ComparisonMatrix default_comparison_matrix() {
  return {{1.0, 0.5, 3.0, 2.0},
          {2.0, 1.0, 4.0, 3.0},
          {1.0 / 3.0, 0.25, 1.0, 0.5},
          {0.5, 1.0 / 3.0, 2.0, 1.0}};
}

inline void validate_comparison(const ComparisonMatrix& a) {
  const std::size_t n = a.size();
  if (n == 0) throw ValidationError("AHP: empty comparison matrix");
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw ValidationError("AHP: comparison matrix must be square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(a[i][j] > 0.0) || !std::isfinite(a[i][j])) {
        throw ValidationError("AHP: entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") must be positive");
      }
      if (std::abs(a[i][j] * a[j][i] - 1.0) > 1e-6) {
        throw ValidationError("AHP: entries (" + std::to_string(i) + "," + std::to_string(j) +
                              ") and (" + std::to_string(j) + "," + std::to_string(i) +
                              ") are not reciprocal");
      }
    }
    if (std::abs(a[i][i] - 1.0) > 1e-6) throw ValidationError("AHP: diagonal must be 1");
  }
}

enum class AhpMethod {
  eigenvector,  // Perron vector by power iteration
  column_mean,  // average of the column-normalized matrix (approximate synthesis)
};

inline std::vector<double> mat_vec(const ComparisonMatrix& a, const std::vector<double>& v) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  }
  return out;
}

inline AhpWeights ahp_weights(const ComparisonMatrix& a, AhpMethod method = AhpMethod::eigenvector,
                              double tolerance = 1e-10, int max_iters = 10000) {
  validate_comparison(a);
  const std::size_t n = a.size();
  AhpWeights out;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  if (method == AhpMethod::eigenvector) {
    for (int it = 1; it <= max_iters; ++it) {
      auto next = mat_vec(a, w);
      double sum = 0.0;
      for (double x : next) sum += x;
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        next[i] /= sum;
        change = std::max(change, std::abs(next[i] - w[i]));
      }
      w = std::move(next);
      out.iterations = it;
      if (change <= tolerance) break;
    }
  } else {
    std::vector<double> col(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) col[j] += a[i][j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a[i][j] / col[j];
      w[i] = s / static_cast<double>(n);
    }
  }
  // With sum(w) = 1, lambda is recovered as the mean ratio (A w)_i / w_i.
  const auto aw = mat_vec(a, w);
  double lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i) lambda += aw[i] / w[i];
  lambda /= static_cast<double>(n);
  out.w = std::move(w);
  out.lambda_max = lambda;
  if (n > 1) out.consistency_index = (lambda - static_cast<double>(n)) / static_cast<double>(n - 1);
  const double ri = random_index(n);
  out.consistency_ratio = ri > 0.0 ? out.consistency_index / ri : 0.0;
  return out;
}

inline double unified_score(const ResilienceScorecard& card, const std::vector<double>& w) {
  if (w.size() != 4) throw ValidationError("unified score needs exactly four weights");
  const auto m = card.values();
  double s = 0.0;
  for (std::size_t k = 0; k < 4; ++k) s += w[k] * m[k];
  return s;
}

inline double unified_score(const ResilienceScorecard& card, const AhpWeights& weights) {
  return unified_score(card, weights.w);
}

// Reads {"matrix": [[...], ...]} or a bare array of rows.
inline ComparisonMatrix load_comparison_matrix(const nlohmann::json& doc) {
  if (doc.is_object() && !doc.contains("matrix")) {
    throw ValidationError("AHP matrix: missing field 'matrix'");
  }
  const auto& rows = doc.is_object() ? doc["matrix"] : doc;
  ComparisonMatrix a;
  try {
    a = rows.get<ComparisonMatrix>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("AHP matrix: expected an array of numeric rows");
  }
  validate_comparison(a);
  return a;
}

}  // namespace gridgame::resilience
