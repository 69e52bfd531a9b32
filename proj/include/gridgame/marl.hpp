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

// Tabular learning agents for the attack/defense game. Attack index i, defense
// index j, payoff M(i, j). The defender maximizes and the attacker minimizes
// the same reward, so both tables store M-valued estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gridgame/error.hpp"
#include "gridgame/gamesolve.hpp"
#include "gridgame/matrix.hpp"
#include "gridgame/random.hpp"
#include "json.hpp"

namespace gridgame::marl {

using game::MixedStrategy;
using game::Side;

// ---------------------------------------------------------------------------
// Schedules and configuration

enum class AlphaKind { harmonic, constant, power };

struct AlphaSchedule {
  AlphaKind kind = AlphaKind::harmonic;
  double param = 1.0;  // constant value, or exponent p for power

  // n is the 1-based visit count of the updated entry.
  double operator()(std::uint64_t n) const {
    const double t = static_cast<double>(std::max<std::uint64_t>(n, 1));
    switch (kind) {
      case AlphaKind::harmonic: return 1.0 / t;
      case AlphaKind::constant: return param;
      case AlphaKind::power: return std::pow(t, -param);
    }
    return 1.0 / t;
  }

  bool robbins_monro() const {
    switch (kind) {
      case AlphaKind::harmonic: return true;
      case AlphaKind::constant: return false;
      case AlphaKind::power: return param > 0.5 && param <= 1.0;
    }
    return false;
  }

  std::string name() const {
    switch (kind) {
      case AlphaKind::harmonic: return "harmonic";
      case AlphaKind::constant: return "constant";
      case AlphaKind::power: return "power";
    }
    return "harmonic";
  }
};

inline AlphaSchedule parse_alpha_schedule(const std::string& kind, double param) {
  if (kind == "harmonic") return {AlphaKind::harmonic, 1.0};
  if (kind == "constant") return {AlphaKind::constant, param};
  if (kind == "power") return {AlphaKind::power, param};
  throw ValidationError("unknown alpha schedule '" + kind + "'");
}

struct LearningConfig {
  AlphaSchedule alpha;
  double epsilon0 = 1.0;
  double epsilon_decay = 0.9999;  // epsilon_t = epsilon0 * decay^t
  double gamma = 0.0;
  std::uint64_t episodes = 100000;
  std::uint64_t seed = 1;
  // Multi-agent only: the defender plays uniformly and does not learn for
  // this many leading episodes.
  std::uint64_t freeze_defender_episodes = 0;
  // State-based training resets to the initial state every horizon steps (0 = never).
  std::uint64_t horizon = 0;
  // Telemetry row stride (0 disables telemetry).
  std::uint64_t telemetry_every = 0;

  double epsilon(std::uint64_t t) const { return epsilon0 * std::pow(epsilon_decay, static_cast<double>(t)); }

  // Throws on invalid values; returns advisory warnings.
  std::vector<std::string> validate() const {
    if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) throw ValidationError("epsilon0 must be in [0,1]");
    if (!(epsilon_decay > 0.0 && epsilon_decay < 1.0)) throw ValidationError("epsilon decay must be in (0,1)");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma must be in [0,1)");
    if (episodes < 1) throw ValidationError("episodes must be >= 1");
    if (alpha.kind == AlphaKind::constant && !(alpha.param > 0.0 && alpha.param <= 1.0)) {
      throw ValidationError("constant alpha must be in (0,1]");
    }
    if (alpha.kind == AlphaKind::power && !(alpha.param > 0.0)) throw ValidationError("power alpha exponent must be > 0");
    std::vector<std::string> warnings;
    if (!alpha.robbins_monro()) {
      warnings.push_back(alpha.name() + " alpha schedule violates the Robbins-Monro conditions");
    }
    return warnings;
  }
};

inline nlohmann::json to_json(const LearningConfig& c) {
  return {{"alpha_schedule", c.alpha.name()},
          {"alpha_param", c.alpha.param},
          {"epsilon0", c.epsilon0},
          {"epsilon_decay", c.epsilon_decay},
          {"gamma", c.gamma},
          {"episodes", c.episodes},
          {"seed", c.seed},
          {"freeze_defender_episodes", c.freeze_defender_episodes},
          {"horizon", c.horizon},
          {"telemetry_every", c.telemetry_every}};
}

// Reads any subset of the to_json keys on top of the defaults.
inline LearningConfig load_learning_config(const nlohmann::json& j, LearningConfig c = {}) {
  if (!j.is_object()) throw ValidationError("learning config must be a JSON object");
  try {
    if (j.contains("alpha_schedule")) {
      c.alpha = parse_alpha_schedule(j.at("alpha_schedule").get<std::string>(), j.value("alpha_param", c.alpha.param));
    }
    c.epsilon0 = j.value("epsilon0", c.epsilon0);
    c.epsilon_decay = j.value("epsilon_decay", c.epsilon_decay);
    c.gamma = j.value("gamma", c.gamma);
    c.episodes = j.value("episodes", c.episodes);
    c.seed = j.value("seed", c.seed);
    c.freeze_defender_episodes = j.value("freeze_defender_episodes", c.freeze_defender_episodes);
    c.horizon = j.value("horizon", c.horizon);
    c.telemetry_every = j.value("telemetry_every", c.telemetry_every);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("learning config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Q table

// Dense table over (context, own action, opponent action), zero-initialized,
// with per-entry visit counts.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t contexts, std::size_t own, std::size_t opp)
      : contexts_(contexts), own_(own), opp_(opp), values_(contexts * own * opp, 0.0),
        visits_(contexts * own * opp, 0) {}

  std::size_t contexts() const { return contexts_; }
  std::size_t own_actions() const { return own_; }
  std::size_t opp_actions() const { return opp_; }

  double operator()(std::size_t c, std::size_t a, std::size_t o) const { return values_[at(c, a, o)]; }
  double& operator()(std::size_t c, std::size_t a, std::size_t o) { return values_[at(c, a, o)]; }
  std::uint64_t visits(std::size_t c, std::size_t a, std::size_t o) const { return visits_[at(c, a, o)]; }
  std::uint64_t& visits(std::size_t c, std::size_t a, std::size_t o) { return visits_[at(c, a, o)]; }

  // Q(c, ., o)
  std::vector<double> column(std::size_t c, std::size_t o) const {
    std::vector<double> v(own_);
    for (std::size_t a = 0; a < own_; ++a) v[a] = (*this)(c, a, o);
    return v;
  }

  // Greedy own action against opponent action o.
  std::size_t greedy(std::size_t c, std::size_t o, Side side) const {
    const auto v = column(c, o);
    return side == Side::defender ? game::argmax(v) : game::argmin(v);
  }

  // Best value over own actions against opponent action o.
  double best(std::size_t c, std::size_t o, Side side) const {
    const auto v = column(c, o);
    return side == Side::defender ? *std::max_element(v.begin(), v.end()) : *std::min_element(v.begin(), v.end());
  }

  // Applies one update in place and returns |delta|.
  double update(std::size_t c, std::size_t a, std::size_t o, double reward, double next_best, double alpha,
                double gamma) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must be in (0,1]");
    double& q = values_[at(c, a, o)];
    const double delta = alpha * (reward + gamma * next_best - q);
    q += delta;
    ++visits_[at(c, a, o)];
    return std::abs(delta);
  }

  const std::vector<double>& values() const { return values_; }
  bool operator==(const QTable&) const = default;

 private:
  std::size_t at(std::size_t c, std::size_t a, std::size_t o) const {
    if (c >= contexts_ || a >= own_ || o >= opp_) throw ValidationError("Q-table index out of range");
    return (c * own_ + a) * opp_ + o;
  }

  std::size_t contexts_ = 0, own_ = 0, opp_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
};

struct QKey {
  std::size_t context = 0;
  std::size_t own = 0;
  std::size_t opp = 0;
};

// Functional form: returns the updated copy.
inline QTable q_update(QTable table, const QKey& key, double reward, double next_best, double alpha, double gamma) {
  table.update(key.context, key.own, key.opp, reward, next_best, alpha, gamma);
  return table;
}

// With probability 1 - epsilon the greedy action against opponent_last,
// otherwise uniform over all actions. Without opponent_last, greedy is taken
// against the opponent-averaged Q row. Draw order: one uniform, then an index
// only when exploring.
inline std::size_t epsilon_greedy(const QTable& table, std::size_t context, std::optional<std::size_t> opponent_last,
                                  double epsilon, Side side, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must be in [0,1]");
  const std::size_t m = table.own_actions();
  const double u = rng.uniform();
  if (u < epsilon) return rng.index(m);
  if (opponent_last) return table.greedy(context, *opponent_last, side);
  std::vector<double> avg(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t o = 0; o < table.opp_actions(); ++o) avg[a] += table(context, a, o);
  }
  return side == Side::defender ? game::argmax(avg) : game::argmin(avg);
}

namespace detail {
inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
inline std::optional<std::size_t> opt(std::size_t k) {
  return k == kNone ? std::nullopt : std::optional<std::size_t>(k);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Policies and telemetry

struct TelemetryRow {
  std::uint64_t episode = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double reward = 0.0;
  double q_max_delta = 0.0;
};

inline std::string telemetry_csv(const std::vector<TelemetryRow>& rows) {
  std::string out = "episode,epsilon,alpha,reward,q_max_delta\n";
  for (const auto& r : rows) {
    out += std::to_string(r.episode) + "," + format_double(r.epsilon) + "," + format_double(r.alpha) + "," +
           format_double(r.reward) + "," + format_double(r.q_max_delta) + "\n";
  }
  return out;
}

struct LearnedPolicy {
  Side side = Side::defender;
  QTable q;
  std::vector<std::size_t> greedy;  // per opponent-last context
  std::size_t action = 0;           // overall greedy action
  std::optional<MixedStrategy> mix;
  LearningConfig config;
  std::uint64_t episodes = 0;
  std::vector<std::string> warnings;
};

inline nlohmann::json to_json(const LearnedPolicy& p, const std::vector<std::string>& own_ids = {},
                              const std::vector<std::string>& opp_ids = {}) {
  auto id = [](const std::vector<std::string>& ids, std::size_t k, char prefix) {
    return k < ids.size() ? ids[k] : std::string(1, prefix) + std::to_string(k + 1);
  };
  const char own_prefix = p.side == Side::defender ? 'D' : 'A';
  const char opp_prefix = p.side == Side::defender ? 'A' : 'D';
  nlohmann::json contexts = nlohmann::json::array();
  for (std::size_t c = 0; c < p.q.contexts(); ++c) {
    for (std::size_t o = 0; o < p.q.opp_actions(); ++o) {
      contexts.push_back({{"context", c},
                          {"opponent_last", id(opp_ids, o, opp_prefix)},
                          {"greedy", id(own_ids, p.q.greedy(c, o, p.side), own_prefix)},
                          {"q", p.q.column(c, o)}});
    }
  }
  nlohmann::json j = {{"side", p.side == Side::defender ? "defender" : "attacker"},
                      {"action", id(own_ids, p.action, own_prefix)},
                      {"episodes", p.episodes},
                      {"config", to_json(p.config)},
                      {"warnings", p.warnings},
                      {"contexts", contexts}};
  if (p.mix) j["mix"] = p.mix->probs;
  return j;
}

// Learned stage matrix in attack-row orientation, for context c.
inline PayoffMatrix learned_matrix(const QTable& q, std::size_t c, Side side) {
  const std::size_t rows = side == Side::attacker ? q.own_actions() : q.opp_actions();
  const std::size_t cols = side == Side::attacker ? q.opp_actions() : q.own_actions();
  PayoffMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = side == Side::attacker ? q(c, i, j) : q(c, j, i);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Single agent against a stationary opponent

// Defender learns Q(j, i) while the attacker samples from a fixed mix. The
// overall action is the greedy response to the empirical attack frequencies.
inline LearnedPolicy train_single_agent(const PayoffMatrix& m, const MixedStrategy& opponent,
                                        const LearningConfig& config,
                                        std::vector<TelemetryRow>* telemetry = nullptr) {
  LearnedPolicy p;
  p.warnings = config.validate();
  if (opponent.size() != m.rows() || !opponent.valid()) throw ValidationError("opponent mix must be a distribution over attacks");
  p.side = Side::defender;
  p.config = config;
  p.q = QTable(1, m.cols(), m.rows());
  Rng rng(config.seed);
  std::vector<double> freq(m.rows(), 0.0);
  std::size_t last = detail::kNone;
  for (std::uint64_t t = 0; t < config.episodes; ++t) {
    const double eps = config.epsilon(t);
    const std::size_t i = rng.discrete(opponent.probs);
    const std::size_t j = epsilon_greedy(p.q, 0, detail::opt(last), eps, Side::defender, rng);
    const double r = m(i, j);
    const double alpha = config.alpha(p.q.visits(0, j, i) + 1);
    const double delta = p.q.update(0, j, i, r, 0.0, alpha, 0.0);
    freq[i] += 1.0;
    last = i;
    if (telemetry && config.telemetry_every > 0 && ((t + 1) % config.telemetry_every == 0 || t + 1 == config.episodes)) {
      telemetry->push_back({t + 1, eps, alpha, r, delta});
    }
  }
  p.episodes = config.episodes;
  p.greedy.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) p.greedy[i] = p.q.greedy(0, i, Side::defender);
  std::vector<double> expected(m.cols(), 0.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) expected[j] += freq[i] * p.q(0, j, i);
  }
  p.action = game::argmax(expected);
  return p;
}

// ---------------------------------------------------------------------------
// Simultaneous two-agent learning

struct MultiAgentResult {
  LearnedPolicy attacker;
  LearnedPolicy defender;
  double value = 0.0;
  bool converged = false;  // learned stage game has a pure equilibrium
  double tail_average = 0.0;  // mean reward over the final 10% of episodes
};

namespace detail {

inline bool is_pure(const MixedStrategy& s, double tol = 1e-9) {
  return *std::max_element(s.probs.begin(), s.probs.end()) >= 1.0 - tol;
}

// Solves the learned stage games and fills the greedy actions and mixes.
inline void finalize_pair(MultiAgentResult& r, std::size_t context) {
  const auto ma = learned_matrix(r.attacker.q, context, Side::attacker);
  const auto md = learned_matrix(r.defender.q, context, Side::defender);
  const auto ea = game::nash_exact(ma);
  const auto ed = game::nash_exact(md);
  r.attacker.mix = ea.attacker;
  r.defender.mix = ed.defender;
  r.attacker.action = game::argmax(ea.attacker.probs);
  r.defender.action = game::argmax(ed.defender.probs);
  r.converged = is_pure(ea.attacker) && is_pure(ed.defender);
  r.value = r.converged ? ed.game_value : r.tail_average;
}

}  // namespace detail

// Both agents act epsilon-greedily against the opponent's previous action
// and update their tables every episode. The stage-game equilibrium of the
// learned tables gives the final policies; without a pure equilibrium the
// value is the tail-average reward and converged is false.
inline MultiAgentResult train_multi_agent(const PayoffMatrix& m, const LearningConfig& config,
                                          std::vector<TelemetryRow>* telemetry = nullptr) {
  MultiAgentResult r;
  const auto warnings = config.validate();
  const std::size_t rows = m.rows(), cols = m.cols();
  r.attacker.side = Side::attacker;
  r.defender.side = Side::defender;
  r.attacker.q = QTable(1, rows, cols);
  r.defender.q = QTable(1, cols, rows);
  Rng rng(config.seed);
  std::size_t last_i = detail::kNone, last_j = detail::kNone;
  const std::uint64_t tail_start = config.episodes - std::max<std::uint64_t>(1, config.episodes / 10);
  double tail_sum = 0.0;
  for (std::uint64_t t = 0; t < config.episodes; ++t) {
    const double eps = config.epsilon(t);
    const bool frozen = t < config.freeze_defender_episodes;
    const std::size_t i = epsilon_greedy(r.attacker.q, 0, detail::opt(last_j), eps, Side::attacker, rng);
    const std::size_t j = epsilon_greedy(r.defender.q, 0, detail::opt(last_i), frozen ? 1.0 : eps, Side::defender, rng);
    const double reward = m(i, j);
    const double alpha_a = config.alpha(r.attacker.q.visits(0, i, j) + 1);
    double delta = r.attacker.q.update(0, i, j, reward, 0.0, alpha_a, 0.0);
    if (!frozen) {
      const double alpha_d = config.alpha(r.defender.q.visits(0, j, i) + 1);
      delta = std::max(delta, r.defender.q.update(0, j, i, reward, 0.0, alpha_d, 0.0));
    }
    if (t >= tail_start) tail_sum += reward;
    last_i = i;
    last_j = j;
    if (telemetry && config.telemetry_every > 0 && ((t + 1) % config.telemetry_every == 0 || t + 1 == config.episodes)) {
      telemetry->push_back({t + 1, eps, alpha_a, reward, delta});
    }
  }
  r.tail_average = tail_sum / static_cast<double>(config.episodes - tail_start);
  for (auto* p : {&r.attacker, &r.defender}) {
    p->config = config;
    p->episodes = config.episodes;
    p->warnings = warnings;
    const std::size_t opp = p->q.opp_actions();
    p->greedy.resize(opp);
    for (std::size_t o = 0; o < opp; ++o) p->greedy[o] = p->q.greedy(0, o, p->side);
  }
  detail::finalize_pair(r, 0);
  return r;
}

// ---------------------------------------------------------------------------
// Stage MDP

struct StageMdp {
  std::vector<std::string> states;
  std::size_t attacks = 0;
  std::size_t defenses = 0;
  // transition[s][i][j] is a distribution over next states.
  std::vector<std::vector<std::vector<std::vector<double>>>> transition;
  std::vector<std::vector<std::vector<double>>> reward;  // reward[s][i][j]
  std::size_t initial_state = 0;

  std::size_t size() const { return states.size(); }

  void validate() const {
    const std::size_t n = states.size();
    if (n == 0) throw ValidationError("stage MDP has no states");
    if (initial_state >= n) throw ValidationError("stage MDP initial state out of range");
    if (transition.size() != n || reward.size() != n) throw ValidationError("stage MDP tables do not match the state count");
    for (std::size_t s = 0; s < n; ++s) {
      if (transition[s].size() != attacks || reward[s].size() != attacks) throw ValidationError("stage MDP attack dimension mismatch");
      for (std::size_t i = 0; i < attacks; ++i) {
        if (transition[s][i].size() != defenses || reward[s][i].size() != defenses) {
          throw ValidationError("stage MDP defense dimension mismatch");
        }
        for (std::size_t j = 0; j < defenses; ++j) {
          const auto& row = transition[s][i][j];
          if (row.size() != n) throw ValidationError("stage MDP transition row has wrong length");
          double sum = 0.0;
          for (double p : row) {
            if (!(p >= 0.0)) throw ValidationError("stage MDP transition probabilities must be >= 0");
            sum += p;
          }
          if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("stage MDP transition row does not sum to 1");
          if (!(std::abs(reward[s][i][j]) <= 1.0)) throw ValidationError("stage MDP rewards must lie in [-1,1]");
        }
      }
    }
  }
};

// Single-state MDP with self-loops: the repeated stage game on M.
inline StageMdp stage_mdp_single(const PayoffMatrix& m) {
  StageMdp mdp;
  mdp.states = {"stage"};
  mdp.attacks = m.rows();
  mdp.defenses = m.cols();
  mdp.transition.assign(1, std::vector<std::vector<std::vector<double>>>(
                               m.rows(), std::vector<std::vector<double>>(m.cols(), std::vector<double>{1.0})));
  mdp.reward.assign(1, std::vector<std::vector<double>>(m.rows(), std::vector<double>(m.cols())));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) mdp.reward[0][i][j] = m(i, j);
  }
  return mdp;
}

struct StageMdpParams {
  // Physical component: probability an unmitigated attack degrades the state
  // by one level, indexed by current state (the last state is absorbing).
  std::vector<double> degrade = {0.9, 0.5, 0.0};
  // Cyber component: probability a mitigating defense recovers one level.
  double recover = 0.7;
  // A defense mitigates an attack when M(i, j) is at least this value.
  double mitigation_threshold = 0.8;
  std::vector<double> reward_scale = {1.0, 0.8, 0.5};
  std::vector<std::string> names = {"normal", "degraded", "critical"};
};

// Ordered-severity MDP built from the payoff matrix. The next-state
// distribution is the product of a physical degrade step (unmitigated attack)
// and a cyber recovery step (mitigating defense); only one of them fires for
// a given pair.
inline StageMdp stage_mdp_default(const PayoffMatrix& m, const StageMdpParams& p = {}) {
  const std::size_t n = p.names.size();
  if (n == 0 || p.degrade.size() != n || p.reward_scale.size() != n) {
    throw ValidationError("stage MDP parameters must have one entry per state");
  }
  if (!(p.recover >= 0.0 && p.recover <= 1.0)) throw ValidationError("recovery probability must be in [0,1]");
  StageMdp mdp;
  mdp.states = p.names;
  mdp.attacks = m.rows();
  mdp.defenses = m.cols();
  mdp.transition.assign(n, std::vector<std::vector<std::vector<double>>>(
                               m.rows(), std::vector<std::vector<double>>(m.cols(), std::vector<double>(n, 0.0))));
  mdp.reward.assign(n, std::vector<std::vector<double>>(m.rows(), std::vector<double>(m.cols())));
  for (std::size_t s = 0; s < n; ++s) {
    if (!(p.degrade[s] >= 0.0 && p.degrade[s] <= 1.0)) throw ValidationError("degrade probabilities must be in [0,1]");
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        auto& row = mdp.transition[s][i][j];
        const bool mitigated = m(i, j) >= p.mitigation_threshold;
        if (mitigated && s > 0) {
          row[s - 1] += p.recover;
          row[s] += 1.0 - p.recover;
        } else if (!mitigated && s + 1 < n) {
          row[s + 1] += p.degrade[s];
          row[s] += 1.0 - p.degrade[s];
        } else {
          row[s] = 1.0;
        }
        mdp.reward[s][i][j] = m(i, j) * p.reward_scale[s];
      }
    }
  }
  mdp.validate();
  return mdp;
}

struct MdpStatePolicy {
  std::string state;
  std::size_t attack = 0;
  std::size_t defense = 0;
  MixedStrategy attacker_mix;
  MixedStrategy defender_mix;
  double value = 0.0;
  bool pure = false;
};

struct MdpResult {
  QTable attacker_q;  // (state, attack, defense)
  QTable defender_q;  // (state, defense, attack)
  std::vector<MdpStatePolicy> policies;
  std::vector<std::uint64_t> state_visits;
  std::vector<std::string> warnings;
};

// State-based learning: Q(s, own, opp) <- Q + alpha (r + gamma * best(s', opp) - Q)
// where the bootstrap uses the opponent's current action as the anticipated
// next move. Action draws use the same stream and order as train_multi_agent;
// transitions draw from a separate stream.
inline MdpResult mdp_train(const StageMdp& mdp, const LearningConfig& config) {
  mdp.validate();
  MdpResult r;
  r.warnings = config.validate();
  const std::size_t n = mdp.size();
  r.attacker_q = QTable(n, mdp.attacks, mdp.defenses);
  r.defender_q = QTable(n, mdp.defenses, mdp.attacks);
  r.state_visits.assign(n, 0);
  Rng rng(config.seed);
  Rng env(derive_seed(config.seed, 1));
  std::size_t last_i = detail::kNone, last_j = detail::kNone;
  std::size_t s = mdp.initial_state;
  for (std::uint64_t t = 0; t < config.episodes; ++t) {
    if (config.horizon > 0 && t > 0 && t % config.horizon == 0) {
      s = mdp.initial_state;
      last_i = detail::kNone;
      last_j = detail::kNone;
    }
    const double eps = config.epsilon(t);
    const bool frozen = t < config.freeze_defender_episodes;
    const std::size_t i = epsilon_greedy(r.attacker_q, s, detail::opt(last_j), eps, Side::attacker, rng);
    const std::size_t j = epsilon_greedy(r.defender_q, s, detail::opt(last_i), frozen ? 1.0 : eps, Side::defender, rng);
    const double reward = mdp.reward[s][i][j];
    const std::size_t next = n == 1 ? 0 : env.discrete(mdp.transition[s][i][j]);
    ++r.state_visits[s];
    const double na = r.attacker_q.best(next, j, Side::attacker);
    r.attacker_q.update(s, i, j, reward, na, config.alpha(r.attacker_q.visits(s, i, j) + 1), config.gamma);
    if (!frozen) {
      const double nd = r.defender_q.best(next, i, Side::defender);
      r.defender_q.update(s, j, i, reward, nd, config.alpha(r.defender_q.visits(s, j, i) + 1), config.gamma);
    }
    last_i = i;
    last_j = j;
    s = next;
  }
  for (std::size_t st = 0; st < n; ++st) {
    const auto ea = game::nash_exact(learned_matrix(r.attacker_q, st, Side::attacker));
    const auto ed = game::nash_exact(learned_matrix(r.defender_q, st, Side::defender));
    MdpStatePolicy pol;
    pol.state = mdp.states[st];
    pol.attacker_mix = ea.attacker;
    pol.defender_mix = ed.defender;
    pol.attack = game::argmax(ea.attacker.probs);
    pol.defense = game::argmax(ed.defender.probs);
    pol.value = ed.game_value;
    pol.pure = detail::is_pure(ea.attacker) && detail::is_pure(ed.defender);
    r.policies.push_back(std::move(pol));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sample complexity

// N = S*A*H^4 * log(S*A*H/delta) / ((1-gamma)^6 * eps^2), constant factor 1.
inline double pac_sample_bound(double s, double a, double h, double gamma, double eps, double delta) {
  if (!(s > 0 && a > 0 && h > 0)) throw ValidationError("pac bound: S, A and H must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("pac bound: gamma must be in (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("pac bound: epsilon must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("pac bound: delta must be in (0,1)");
  return s * a * std::pow(h, 4) * std::log(s * a * h / delta) / (std::pow(1.0 - gamma, 6) * eps * eps);
}

}  // namespace gridgame::marl
