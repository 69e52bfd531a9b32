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

// Solvers for the finite two-player game on a payoff matrix. Rows are attack
// actions (the attacker minimizes), columns are defense actions (the defender
// maximizes). Ties in every argmin/argmax go to the lowest index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gridgame/error.hpp"
#include "gridgame/matrix.hpp"
#include "gridgame/random.hpp"
#include "gridgame/simplex.hpp"
#include "json.hpp"

namespace gridgame::game {

enum class Side { attacker, defender };

// Probability vector on a finite action set.
struct MixedStrategy {
  std::vector<double> probs;

  static MixedStrategy uniform(std::size_t n) {
    return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }
  static MixedStrategy pure(std::size_t n, std::size_t k) {
    MixedStrategy s{std::vector<double>(n, 0.0)};
    s.probs[k] = 1.0;
    return s;
  }

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t k) const { return probs[k]; }

  bool valid(double tol = 1e-9) const {
    if (probs.empty()) return false;
    double s = 0.0;
    for (double p : probs) {
      if (!(p >= -tol) || !std::isfinite(p)) return false;
      s += p;
    }
    return std::abs(s - 1.0) <= tol;
  }

  bool operator==(const MixedStrategy&) const = default;
};

// M * pi_d: expected payoff of each attack row.
inline std::vector<double> row_values(const PayoffMatrix& m, const MixedStrategy& defender) {
  if (defender.size() != m.cols()) throw ValidationError("defender mix does not match matrix columns");
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * defender[j];
  }
  return out;
}

// pi_a' * M: expected payoff of each defense column.
inline std::vector<double> column_values(const PayoffMatrix& m, const MixedStrategy& attacker) {
  if (attacker.size() != m.rows()) throw ValidationError("attacker mix does not match matrix rows");
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += attacker[i] * m(i, j);
  }
  return out;
}

inline double expected_value(const PayoffMatrix& m, const MixedStrategy& attacker,
                             const MixedStrategy& defender) {
  const auto rv = row_values(m, defender);
  double v = 0.0;
  for (std::size_t i = 0; i < rv.size(); ++i) v += attacker[i] * rv[i];
  return v;
}

inline std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}
inline std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

struct Response {
  std::size_t index = 0;
  double value = 0.0;
};

// Pure best response to the opponent's mix.
inline Response best_response(const PayoffMatrix& m, const MixedStrategy& opponent, Side side) {
  if (side == Side::attacker) {
    const auto v = row_values(m, opponent);
    const auto k = argmin(v);
    return {k, v[k]};
  }
  const auto v = column_values(m, opponent);
  const auto k = argmax(v);
  return {k, v[k]};
}

// Largest gain either side gets from a unilateral pure deviation.
inline double verify_epsilon_equilibrium(const PayoffMatrix& m, const MixedStrategy& attacker,
                                         const MixedStrategy& defender) {
  const double v = expected_value(m, attacker, defender);
  const auto rv = row_values(m, defender);
  const auto cv = column_values(m, attacker);
  const double attacker_gain = v - *std::min_element(rv.begin(), rv.end());
  const double defender_gain = *std::max_element(cv.begin(), cv.end()) - v;
  return std::max({0.0, attacker_gain, defender_gain});
}

struct TrajectoryPoint {
  std::uint64_t iteration = 0;
  double avg_regret_attacker = 0.0;
  double avg_regret_defender = 0.0;
  double value = 0.0;
};

struct EquilibriumReport {
  MixedStrategy attacker;
  MixedStrategy defender;
  double game_value = 0.0;
  std::string method;
  std::uint64_t iterations = 0;
  double epsilon = 0.0;
  bool converged = true;
  std::vector<TrajectoryPoint> trajectory;
};

inline EquilibriumReport make_report(const PayoffMatrix& m, MixedStrategy a, MixedStrategy d,
                                     std::string method, std::uint64_t iterations) {
  EquilibriumReport r;
  r.game_value = expected_value(m, a, d);
  r.epsilon = verify_epsilon_equilibrium(m, a, d);
  r.attacker = std::move(a);
  r.defender = std::move(d);
  r.method = std::move(method);
  r.iterations = iterations;
  return r;
}

// ---------------------------------------------------------------------------
// Exact zero-sum solution

// Shifts M to strictly positive entries B and solves
//   max 1'u  s.t.  B'u <= 1, u >= 0
// whose optimum is 1/value(B); the attacker mix is u normalized and the
// defender mix is the normalized dual.
inline EquilibriumReport nash_exact(const PayoffMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw ValidationError("nash_exact: empty matrix");
  const double lo = *std::min_element(m.data().begin(), m.data().end());
  const double shift = 1.0 - lo;
  std::vector<std::vector<double>> a(m.cols(), std::vector<double>(m.rows()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) a[j][i] = m(i, j) + shift;
  }
  const auto sol = lp::maximize(a, std::vector<double>(m.cols(), 1.0), std::vector<double>(m.rows(), 1.0));
  if (!(sol.objective > 0.0)) throw SolverError("nash_exact: degenerate linear program");

  auto normalize = [](std::vector<double> v) {
    for (auto& x : v) x = std::max(0.0, x);
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(s > 0.0)) throw SolverError("nash_exact: empty support");
    for (auto& x : v) x /= s;
    return MixedStrategy{std::move(v)};
  };
  auto report = make_report(m, normalize(sol.primal), normalize(sol.dual), "nash", static_cast<std::uint64_t>(sol.pivots));
  return report;
}

// ---------------------------------------------------------------------------
// Fictitious play

// Simultaneous fictitious play: each round both sides best-respond to the
// opponent's empirical action frequencies. Stops once the averaged pair is a
// tol-equilibrium (checked every check_every rounds) or at max_iters.
inline EquilibriumReport nash_fictitious_play(const PayoffMatrix& m, std::uint64_t max_iters,
                                              double tol, std::uint64_t check_every = 16) {
  if (max_iters < 1) throw ValidationError("fictitious play: max_iters must be >= 1");
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<double> count_a(rows, 0.0), count_d(cols, 0.0);
  // Cumulative payoff vectors against the opponent's history.
  std::vector<double> rows_vs_d(rows, 0.0), cols_vs_a(cols, 0.0);

  auto br_a = best_response(m, MixedStrategy::uniform(cols), Side::attacker).index;
  auto br_d = best_response(m, MixedStrategy::uniform(rows), Side::defender).index;
  std::uint64_t t = 0;
  double eps = std::numeric_limits<double>::infinity();
  while (t < max_iters) {
    ++t;
    count_a[br_a] += 1.0;
    count_d[br_d] += 1.0;
    for (std::size_t i = 0; i < rows; ++i) rows_vs_d[i] += m(i, br_d);
    for (std::size_t j = 0; j < cols; ++j) cols_vs_a[j] += m(br_a, j);
    br_a = argmin(rows_vs_d);
    br_d = argmax(cols_vs_a);
    if (t % check_every == 0 || t == max_iters) {
      const double td = static_cast<double>(t);
      double v = 0.0;
      for (std::size_t i = 0; i < rows; ++i) v += count_a[i] * rows_vs_d[i];
      v /= td * td;
      const double lo = *std::min_element(rows_vs_d.begin(), rows_vs_d.end()) / td;
      const double hi = *std::max_element(cols_vs_a.begin(), cols_vs_a.end()) / td;
      eps = std::max(v - lo, hi - v);
      if (eps <= tol) break;
    }
  }
  MixedStrategy a{count_a}, d{count_d};
  for (auto& p : a.probs) p /= static_cast<double>(t);
  for (auto& p : d.probs) p /= static_cast<double>(t);
  auto report = make_report(m, std::move(a), std::move(d), "fictitious_play", t);
  report.converged = report.epsilon <= tol;
  return report;
}

// ---------------------------------------------------------------------------
// Stackelberg (defender commits first)

struct StackelbergResult {
  std::size_t defense = 0;
  double security_level = 0.0;
  std::size_t attacker_response = 0;
  std::vector<double> security_levels;  // per defense column
};

inline StackelbergResult stackelberg(const PayoffMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw ValidationError("stackelberg: empty matrix");
  StackelbergResult r;
  r.security_levels.assign(m.cols(), 0.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double lo = m(0, j);
    for (std::size_t i = 1; i < m.rows(); ++i) lo = std::min(lo, m(i, j));
    r.security_levels[j] = lo;
  }
  r.defense = argmax(r.security_levels);
  r.security_level = r.security_levels[r.defense];
  std::vector<double> col(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) col[i] = m(i, r.defense);
  r.attacker_response = argmin(col);
  return r;
}

// min_i max_j M_ij, the attacker's pure security level.
inline double minimax_pure(const PayoffMatrix& m) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.cols(); ++j) hi = std::max(hi, m(i, j));
    best = std::min(best, hi);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Regret matching (self-play)

inline MixedStrategy regret_matching_mix(const std::vector<double>& regrets) {
  MixedStrategy s{std::vector<double>(regrets.size(), 0.0)};
  double total = 0.0;
  for (std::size_t k = 0; k < regrets.size(); ++k) {
    s.probs[k] = std::max(0.0, regrets[k]);
    total += s.probs[k];
  }
  if (total > 0.0) {
    for (auto& p : s.probs) p /= total;
  } else {
    s = MixedStrategy::uniform(regrets.size());
  }
  return s;
}

struct RegretOptions {
  std::uint64_t iterations = 10000;
  std::uint64_t seed = 1;
  std::uint64_t record_every = 1;  // trajectory stride; 0 disables the trajectory
};

// Both sides play in proportion to their positive cumulative regrets, with
// realized actions drawn from the current mixes. Reports time-averaged mixes
// and the average-regret trajectory.
inline EquilibriumReport regret_matching(const PayoffMatrix& m, const RegretOptions& opt) {
  if (opt.iterations < 1) throw ValidationError("regret matching: T must be >= 1");
  const std::size_t rows = m.rows(), cols = m.cols();
  Rng rng(opt.seed);
  std::vector<double> regret_a(rows, 0.0), regret_d(cols, 0.0);
  std::vector<double> sum_a(rows, 0.0), sum_d(cols, 0.0);
  EquilibriumReport report;
  for (std::uint64_t t = 1; t <= opt.iterations; ++t) {
    const auto pa = regret_matching_mix(regret_a);
    const auto pd = regret_matching_mix(regret_d);
    for (std::size_t i = 0; i < rows; ++i) sum_a[i] += pa[i];
    for (std::size_t j = 0; j < cols; ++j) sum_d[j] += pd[j];
    const std::size_t i_t = rng.discrete(pa.probs);
    const std::size_t j_t = rng.discrete(pd.probs);
    const double realized = m(i_t, j_t);
    // Attacker utility is -M, defender utility is M.
    for (std::size_t i = 0; i < rows; ++i) regret_a[i] += realized - m(i, j_t);
    for (std::size_t j = 0; j < cols; ++j) regret_d[j] += m(i_t, j) - realized;

    if (opt.record_every > 0 && (t % opt.record_every == 0 || t == opt.iterations)) {
      const double td = static_cast<double>(t);
      TrajectoryPoint pt;
      pt.iteration = t;
      pt.avg_regret_attacker = std::max(0.0, *std::max_element(regret_a.begin(), regret_a.end())) / td;
      pt.avg_regret_defender = std::max(0.0, *std::max_element(regret_d.begin(), regret_d.end())) / td;
      MixedStrategy aa{sum_a}, ad{sum_d};
      for (auto& p : aa.probs) p /= td;
      for (auto& p : ad.probs) p /= td;
      pt.value = expected_value(m, aa, ad);
      report.trajectory.push_back(pt);
    }
  }
  const double td = static_cast<double>(opt.iterations);
  MixedStrategy a{sum_a}, d{sum_d};
  for (auto& p : a.probs) p /= td;
  for (auto& p : d.probs) p /= td;
  auto trajectory = std::move(report.trajectory);
  report = make_report(m, std::move(a), std::move(d), "regret_matching", opt.iterations);
  report.trajectory = std::move(trajectory);
  return report;
}

// ---------------------------------------------------------------------------
// Softmax response and quantal response equilibrium

inline MixedStrategy softmax(const std::vector<double>& logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  MixedStrategy s{std::vector<double>(logits.size())};
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    s.probs[k] = std::exp(logits[k] - hi);
    total += s.probs[k];
  }
  for (auto& p : s.probs) p /= total;
  return s;
}

// Logit response with rationality beta: the attacker weights rows by
// exp(-beta * payoff), the defender weights columns by exp(+beta * payoff).
inline MixedStrategy softmax_response(const PayoffMatrix& m, const MixedStrategy& opponent, double beta,
                                      Side side) {
  if (!(beta >= 0.0)) throw ValidationError("softmax response: beta must be >= 0");
  auto v = side == Side::attacker ? row_values(m, opponent) : column_values(m, opponent);
  const double sign = side == Side::attacker ? -1.0 : 1.0;
  for (auto& x : v) x *= sign * beta;
  return softmax(v);
}

struct QreOptions {
  double beta_attacker = 2.0;
  double beta_defender = 2.0;
  double damping = 0.5;
  std::uint64_t max_iters = 100000;
  double tol = 1e-12;
};

struct QreResult {
  MixedStrategy attacker;
  MixedStrategy defender;
  bool converged = false;
  std::uint64_t iterations = 0;
  double residual = 0.0;  // max-norm distance to the mutual softmax response
};

inline double qre_residual(const PayoffMatrix& m, const MixedStrategy& a, const MixedStrategy& d,
                           double beta_a, double beta_d) {
  const auto ra = softmax_response(m, d, beta_a, Side::attacker);
  const auto rd = softmax_response(m, a, beta_d, Side::defender);
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - ra[i]));
  for (std::size_t j = 0; j < d.size(); ++j) r = std::max(r, std::abs(d[j] - rd[j]));
  return r;
}

// Damped simultaneous fixed-point iteration from the uniform pair.
inline QreResult qre_fixed_point(const PayoffMatrix& m, const QreOptions& opt) {
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ValidationError("QRE: damping must be in (0,1]");
  if (!(opt.beta_attacker >= 0.0 && opt.beta_defender >= 0.0)) throw ValidationError("QRE: betas must be >= 0");
  QreResult r;
  r.attacker = MixedStrategy::uniform(m.rows());
  r.defender = MixedStrategy::uniform(m.cols());
  for (std::uint64_t it = 1; it <= opt.max_iters; ++it) {
    const auto ta = softmax_response(m, r.defender, opt.beta_attacker, Side::attacker);
    const auto td = softmax_response(m, r.attacker, opt.beta_defender, Side::defender);
    double change = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double next = (1.0 - opt.damping) * r.attacker.probs[i] + opt.damping * ta[i];
      change = std::max(change, std::abs(next - r.attacker.probs[i]));
      r.attacker.probs[i] = next;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double next = (1.0 - opt.damping) * r.defender.probs[j] + opt.damping * td[j];
      change = std::max(change, std::abs(next - r.defender.probs[j]));
      r.defender.probs[j] = next;
    }
    r.iterations = it;
    if (change <= opt.tol) {
      r.converged = true;
      break;
    }
  }
  r.residual = qre_residual(m, r.attacker, r.defender, opt.beta_attacker, opt.beta_defender);
  return r;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const EquilibriumReport& r) {
  return {{"method", r.method},
          {"value", r.game_value},
          {"epsilon", r.epsilon},
          {"attacker_probs", r.attacker.probs},
          {"defender_probs", r.defender.probs},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

inline std::string trajectory_csv(const std::vector<TrajectoryPoint>& points) {
  std::string out = "iteration,avg_regret_attacker,avg_regret_defender,value\n";
  for (const auto& p : points) {
    out += std::to_string(p.iteration) + "," + format_double(p.avg_regret_attacker) + "," +
           format_double(p.avg_regret_defender) + "," + format_double(p.value) + "\n";
  }
  return out;
}

}  // namespace gridgame::game
