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

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridgame/error.hpp"
#include "gridgame/gamesolve.hpp"
#include "gridgame/marl.hpp"
#include "gridgame/matrix.hpp"
#include "gridgame/metrics.hpp"
#include "gridgame/netmodel.hpp"
#include "gridgame/parallel.hpp"
#include "gridgame/payoff.hpp"
#include "gridgame/random.hpp"
#include "gridgame/scenario.hpp"
#include "gridgame/stats.hpp"
#include "json.hpp"

namespace gridgame::experiments {

using game::MixedStrategy;

enum class AttackDistribution { uniform, equilibrium, adversarial };

inline std::string to_string(AttackDistribution d) {
  switch (d) {
    case AttackDistribution::uniform: return "uniform";
    case AttackDistribution::equilibrium: return "equilibrium";
    case AttackDistribution::adversarial: return "adversarial";
  }
  return "adversarial";
}

inline AttackDistribution parse_attack_distribution(const std::string& s) {
  if (s == "uniform") return AttackDistribution::uniform;
  if (s == "equilibrium" || s == "equilibrium-mix") return AttackDistribution::equilibrium;
  if (s == "adversarial" || s == "adversarial-best-response") return AttackDistribution::adversarial;
  throw ValidationError("unknown attack distribution '" + s + "'");
}

struct McConfig {
  std::uint64_t runs = 1000;
  std::uint64_t seed = 1;
  double load_spread = 0.10;  // per-bus multiplier ~ U(1 - spread, 1 + spread)
  AttackDistribution attack_distribution = AttackDistribution::adversarial;
  unsigned workers = thread_budget();

  void validate() const {
    if (runs < 1) throw ValidationError("runs must be >= 1");
    if (!(load_spread >= 0.0 && load_spread <= 1.0)) throw ValidationError("load spread must be in [0,1]");
  }
};

// Defense mix per attack row; static policies repeat one mix.
struct DefensePolicy {
  std::string name;
  std::vector<MixedStrategy> per_attack;

  static DefensePolicy fixed(std::string name, const MixedStrategy& mix, std::size_t attacks) {
    return {std::move(name), std::vector<MixedStrategy>(attacks, mix)};
  }

  // Expected payoff of each attack against this policy.
  std::vector<double> attack_values(const PayoffMatrix& m) const {
    if (per_attack.size() != m.rows()) throw ValidationError("policy '" + name + "' does not cover every attack");
    std::vector<double> v(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (per_attack[i].size() != m.cols()) throw ValidationError("policy '" + name + "' has a mix of wrong size");
      for (std::size_t j = 0; j < m.cols(); ++j) v[i] += per_attack[i][j] * m(i, j);
    }
    return v;
  }
};

struct RunRecord {
  std::uint64_t run = 0;
  std::size_t attack = 0;
  std::size_t defense = 0;
  double score = 0.0;
};

struct StatsReport {
  stats::Summary summary;
  std::vector<RunRecord> runs;
  std::vector<std::uint64_t> attack_counts;
  std::vector<std::uint64_t> defense_counts;

  std::vector<double> scores() const {
    std::vector<double> s(runs.size());
    for (std::size_t k = 0; k < runs.size(); ++k) s[k] = runs[k].score;
    return s;
  }
};

inline net::NetworkState perturb_loads(const net::NetworkState& base, const std::vector<double>& factors) {
  auto st = base;
  for (std::size_t k = 0; k < st.size(); ++k) {
    st.buses[k].load_p *= factors[k];
    st.buses[k].load_q *= factors[k];
  }
  return st;
}

// Each run r uses Rng(derive_seed(seed, r)) and draws, in order: one load
// factor per bus, one uniform for the attack and one for the defense. The
// adversarial attacker best-responds to the policy on the nominal matrix.
inline StatsReport monte_carlo(const net::NetworkState& base, const scenario::ScenarioCatalog& catalog,
                               const resilience::AhpWeights& weights, const PayoffMatrix& m,
                               const DefensePolicy& policy, const McConfig& mc,
                               const std::optional<MixedStrategy>& attacker_mix = std::nullopt) {
  mc.validate();
  if (m.rows() != catalog.attacks.size() || m.cols() != catalog.defenses.size()) {
    throw ValidationError("payoff matrix does not match the catalog");
  }
  const auto values = policy.attack_values(m);
  const std::size_t target = game::argmin(values);
  MixedStrategy eq_mix;
  if (mc.attack_distribution == AttackDistribution::equilibrium) {
    eq_mix = attacker_mix ? *attacker_mix : game::nash_exact(m).attacker;
  }
  const auto uniform = MixedStrategy::uniform(m.rows());

  StatsReport rep;
  rep.runs.resize(mc.runs);
  parallel_for(
      mc.runs,
      [&](std::size_t r) {
        Rng rng(derive_seed(mc.seed, r));
        std::vector<double> factors(base.size());
        for (auto& f : factors) f = rng.uniform(1.0 - mc.load_spread, 1.0 + mc.load_spread);
        std::size_t i = 0;
        switch (mc.attack_distribution) {
          case AttackDistribution::uniform: i = rng.discrete(uniform.probs); break;
          case AttackDistribution::equilibrium: i = rng.discrete(eq_mix.probs); break;
          case AttackDistribution::adversarial: (void)rng.uniform(); i = target; break;
        }
        const std::size_t j = rng.discrete(policy.per_attack[i].probs);
        const auto st = perturb_loads(base, factors);
        const auto card = scenario::evaluate_pair(st, catalog.attacks[i], catalog.defenses[j]);
        rep.runs[r] = {r, i, j, resilience::unified_score(card, weights)};
      },
      mc.workers);
  rep.attack_counts.assign(m.rows(), 0);
  rep.defense_counts.assign(m.cols(), 0);
  for (const auto& rec : rep.runs) {
    ++rep.attack_counts[rec.attack];
    ++rep.defense_counts[rec.defense];
  }
  const auto s = rep.scores();
  rep.summary = stats::summarize(s);
  return rep;
}

inline std::string runs_csv(const StatsReport& rep, const PayoffMatrix& m) {
  std::string out = "run,attack,defense,score\n";
  for (const auto& r : rep.runs) {
    out += std::to_string(r.run) + "," + m.attack_ids[r.attack] + "," + m.defense_ids[r.defense] + "," +
           format_double(r.score) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const stats::Summary& s) {
  return {{"mean", s.mean},
          {"std_dev", s.std_dev},
          {"ci95_low", s.ci95_low},
          {"ci95_high", s.ci95_high},
          {"samples", s.samples}};
}

inline nlohmann::json to_json(const StatsReport& rep, const PayoffMatrix& m) {
  auto j = to_json(rep.summary);
  nlohmann::json attacks = nlohmann::json::object(), defenses = nlohmann::json::object();
  for (std::size_t i = 0; i < m.rows(); ++i) attacks[m.attack_ids[i]] = rep.attack_counts[i];
  for (std::size_t k = 0; k < m.cols(); ++k) defenses[m.defense_ids[k]] = rep.defense_counts[k];
  j["attack_counts"] = attacks;
  j["defense_counts"] = defenses;
  return j;
}

// ---------------------------------------------------------------------------
// Baselines

enum class Baseline { RDS, RBD, SOD };

inline Baseline parse_baseline(const std::string& s) {
  if (s == "RDS" || s == "rds") return Baseline::RDS;
  if (s == "RBD" || s == "rbd") return Baseline::RBD;
  if (s == "SOD" || s == "sod") return Baseline::SOD;
  throw ValidationError("unknown baseline '" + s + "'");
}

// argmax_j mean_i M(i, j), lowest index on ties.
inline std::size_t sod_defense(const PayoffMatrix& m) {
  return game::argmax(game::column_values(m, MixedStrategy::uniform(m.rows())));
}

struct RbdDecision {
  std::string attack;
  std::string defense;
  std::string rule;  // der, multi_line, critical, default
};

namespace detail {

inline bool only_kinds(const scenario::Action& a, std::initializer_list<scenario::EffectKind> kinds) {
  if (a.effects.empty()) return false;
  return std::all_of(a.effects.begin(), a.effects.end(), [&](const scenario::Effect& e) {
    return std::find(kinds.begin(), kinds.end(), e.kind) != kinds.end();
  });
}

inline std::size_t count_kind(const scenario::Action& a, scenario::EffectKind k) {
  return static_cast<std::size_t>(
      std::count_if(a.effects.begin(), a.effects.end(), [&](const scenario::Effect& e) { return e.kind == k; }));
}

}  // namespace detail

// Operator rules evaluated in precedence order:
//   1. attack touches a DER (trip or injected bias): the first DER-dispatch
//      defense whose units are all online after the attack, else the first
//      DER-dispatch defense;
//   2. two or more line trips: the tie-switch defense energizing most buses;
//   3. attack leaves critical demand unserved: the first load-shedding defense;
//   4. otherwise the first defense without effects (else the first defense).
// A rule whose defense class is absent from the catalog falls through.
inline std::vector<RbdDecision> rbd_rule_table(const net::NetworkState& base, const scenario::ScenarioCatalog& catalog) {
  using scenario::EffectKind;
  if (catalog.defenses.empty()) throw ValidationError("catalog has no defenses");
  std::vector<std::size_t> der_boost, ties, sheds;
  std::optional<std::size_t> noop;
  for (std::size_t j = 0; j < catalog.defenses.size(); ++j) {
    const auto& d = catalog.defenses[j];
    if (d.effects.empty() && !noop) noop = j;
    if (detail::only_kinds(d, {EffectKind::set_der_dispatch})) der_boost.push_back(j);
    if (detail::only_kinds(d, {EffectKind::close_switch})) ties.push_back(j);
    if (detail::only_kinds(d, {EffectKind::shed_fraction, EffectKind::shed_threshold})) sheds.push_back(j);
  }
  const scenario::Action none{"none", "", {}};
  std::vector<RbdDecision> out;
  for (const auto& a : catalog.attacks) {
    RbdDecision dec{a.id, catalog.defenses[noop.value_or(0)].id, "default"};
    const bool der_hit = detail::count_kind(a, EffectKind::trip_der) + detail::count_kind(a, EffectKind::fdi_bias) > 0;
    const std::size_t trips = detail::count_kind(a, EffectKind::trip_line);
    const auto attacked = scenario::apply_attack(base, a);
    if (der_hit && !der_boost.empty()) {
      std::size_t pick = der_boost.front();
      for (std::size_t j : der_boost) {
        const bool all_online = std::all_of(catalog.defenses[j].effects.begin(), catalog.defenses[j].effects.end(),
                                            [&](const scenario::Effect& e) {
                                              const auto* der = attacked.find_der(e.target);
                                              return der && der->online;
                                            });
        if (all_online) {
          pick = j;
          break;
        }
      }
      out.push_back({a.id, catalog.defenses[pick].id, "der"});
      continue;
    }
    if (trips >= 2 && !ties.empty()) {
      std::size_t pick = ties.front();
      std::size_t best = 0;
      for (std::size_t j : ties) {
        const auto st = scenario::apply_defense(attacked, catalog.defenses[j]);
        const std::size_t n = resilience::energized_buses(st).size();
        if (n > best) {
          best = n;
          pick = j;
        }
      }
      out.push_back({a.id, catalog.defenses[pick].id, "multi_line"});
      continue;
    }
    if (!sheds.empty()) {
      const auto o = scenario::evaluate_pair_detailed(base, a, none);
      double crit_demand = 0.0, crit_served = 0.0;
      for (std::size_t k = 0; k < base.size(); ++k) {
        if (!base.buses[k].is_critical) continue;
        crit_demand += base.buses[k].load_p;
        crit_served += o.report.served_p[k];
      }
      if (crit_served < crit_demand - 1e-9) {
        out.push_back({a.id, catalog.defenses[sheds.front()].id, "critical"});
        continue;
      }
    }
    out.push_back(dec);
  }
  return out;
}

inline std::size_t defense_index(const scenario::ScenarioCatalog& c, const std::string& id) {
  for (std::size_t j = 0; j < c.defenses.size(); ++j) {
    if (c.defenses[j].id == id) return j;
  }
  throw CatalogError("unknown defense '" + id + "'");
}

// Uses the catalog's enumerated rules when present, the computed table otherwise.
inline DefensePolicy baseline(Baseline kind, const PayoffMatrix& m, const net::NetworkState& base,
                              const scenario::ScenarioCatalog& catalog) {
  switch (kind) {
    case Baseline::RDS: return DefensePolicy::fixed("RDS", MixedStrategy::uniform(m.cols()), m.rows());
    case Baseline::SOD: return DefensePolicy::fixed("SOD", MixedStrategy::pure(m.cols(), sod_defense(m)), m.rows());
    case Baseline::RBD: break;
  }
  DefensePolicy p{"RBD", {}};
  std::map<std::string, std::string> rules = catalog.rbd_rules;
  if (rules.empty()) {
    for (const auto& d : rbd_rule_table(base, catalog)) rules[d.attack] = d.defense;
  }
  for (const auto& a : catalog.attacks) {
    const auto it = rules.find(a.id);
    if (it == rules.end()) throw CatalogError("rbd rules: no entry for attack '" + a.id + "'");
    p.per_attack.push_back(MixedStrategy::pure(m.cols(), defense_index(catalog, it->second)));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Strategy comparison

inline const std::vector<std::string>& all_methods() {
  static const std::vector<std::string> m = {"RDS", "RBD", "SOD", "nash", "stackelberg",
                                             "regret", "softmax", "qlearn", "maql"};
  return m;
}

inline bool is_adaptive(const std::string& method) {
  return method != "RDS" && method != "RBD" && method != "SOD";
}

struct CompareConfig {
  McConfig mc;
  marl::LearningConfig learning;
  std::uint64_t regret_iterations = 10000;
  double softmax_beta = 20.0;
  std::string reference;  // empty: SOD when requested, else the first method
};

struct ComparisonRow {
  std::string method;
  stats::Summary summary;
  double improvement_pct = 0.0;
  std::optional<double> t_stat;  // paired against the reference
  std::optional<double> p_value;
  double wall_seconds = 0.0;
  StatsReport report;
  DefensePolicy policy;
};

// Builds the defense policy a method tag stands for.
inline DefensePolicy method_policy(const std::string& method, const PayoffMatrix& m, const net::NetworkState& base,
                                   const scenario::ScenarioCatalog& catalog, const CompareConfig& cfg) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (method == "RDS" || method == "RBD" || method == "SOD") return baseline(parse_baseline(method), m, base, catalog);
  if (method == "nash") return DefensePolicy::fixed(method, game::nash_exact(m).defender, rows);
  if (method == "stackelberg") {
    return DefensePolicy::fixed(method, MixedStrategy::pure(cols, game::stackelberg(m).defense), rows);
  }
  if (method == "regret") {
    const auto r = game::regret_matching(m, {cfg.regret_iterations, cfg.mc.seed, 0});
    return DefensePolicy::fixed(method, r.defender, rows);
  }
  if (method == "softmax") {
    game::QreOptions q;
    q.beta_attacker = q.beta_defender = cfg.softmax_beta;
    return DefensePolicy::fixed(method, game::qre_fixed_point(m, q).defender, rows);
  }
  if (method == "qlearn") {
    const auto p = marl::train_single_agent(m, MixedStrategy::uniform(rows), cfg.learning);
    return DefensePolicy::fixed(method, MixedStrategy::pure(cols, p.action), rows);
  }
  if (method == "maql") {
    const auto r = marl::train_multi_agent(m, cfg.learning);
    return DefensePolicy::fixed(method, *r.defender.mix, rows);
  }
  throw ValidationError("unknown method '" + method + "'");
}

// Every method sees the same per-run draws (common random numbers).
inline std::vector<ComparisonRow> compare_strategies(const net::NetworkState& base,
                                                     const scenario::ScenarioCatalog& catalog,
                                                     const resilience::AhpWeights& weights, const PayoffMatrix& m,
                                                     const std::vector<std::string>& methods,
                                                     const CompareConfig& cfg) {
  if (methods.empty()) throw ValidationError("no methods requested");
  for (const auto& name : methods) {
    if (std::find(all_methods().begin(), all_methods().end(), name) == all_methods().end()) {
      throw ValidationError("unknown method '" + name + "'");
    }
  }
  std::string ref = cfg.reference;
  if (ref.empty()) {
    ref = std::find(methods.begin(), methods.end(), "SOD") != methods.end() ? "SOD" : methods.front();
  } else if (std::find(methods.begin(), methods.end(), ref) == methods.end()) {
    throw ValidationError("reference method '" + ref + "' is not among the requested methods");
  }
  std::optional<MixedStrategy> attacker_mix;
  if (cfg.mc.attack_distribution == AttackDistribution::equilibrium) attacker_mix = game::nash_exact(m).attacker;

  std::vector<ComparisonRow> rows;
  for (const auto& name : methods) {
    const auto t0 = std::chrono::steady_clock::now();
    ComparisonRow row;
    row.method = name;
    row.policy = method_policy(name, m, base, catalog, cfg);
    row.report = monte_carlo(base, catalog, weights, m, row.policy, cfg.mc, attacker_mix);
    row.summary = row.report.summary;
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  const auto ref_it = std::find_if(rows.begin(), rows.end(), [&](const ComparisonRow& r) { return r.method == ref; });
  const auto ref_scores = ref_it->report.scores();
  for (auto& row : rows) {
    const double base_mean = ref_it->summary.mean;
    row.improvement_pct = base_mean != 0.0 ? 100.0 * (row.summary.mean - base_mean) / base_mean : 0.0;
    if (&row == &*ref_it) continue;
    try {
      const auto s = row.report.scores();
      const auto t = stats::paired_t_test(s, ref_scores);
      row.t_stat = t.t;
      row.p_value = t.p;
    } catch (const ValidationError&) {
      // identical or too few samples: no test
    }
  }
  return rows;
}

// Deterministic table; wall times go to timing_csv.
inline std::string comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& reference) {
  std::string out = "method,mean,std,ci95_low,ci95_high,improvement_pct_vs_" + reference + ",t_stat,p_value\n";
  for (const auto& r : rows) {
    out += r.method + "," + format_double(r.summary.mean) + "," + format_double(r.summary.std_dev) + "," +
           format_double(r.summary.ci95_low) + "," + format_double(r.summary.ci95_high) + "," +
           format_double(r.improvement_pct) + "," + (r.t_stat ? format_double(*r.t_stat) : "") + "," +
           (r.p_value ? format_double(*r.p_value) : "") + "\n";
  }
  return out;
}

inline std::string timing_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "method,wall_seconds\n";
  for (const auto& r : rows) out += r.method + "," + format_double(r.wall_seconds) + "\n";
  return out;
}

inline std::string resolve_reference(const std::vector<std::string>& methods, const std::string& requested) {
  if (!requested.empty()) return requested;
  if (std::find(methods.begin(), methods.end(), "SOD") != methods.end()) return "SOD";
  return methods.empty() ? std::string() : methods.front();
}

// ---------------------------------------------------------------------------
// Scalability probe

struct ProbeRow {
  std::string network;
  std::size_t buses = 0;
  std::size_t ders = 0;
  std::size_t switches = 0;
  double log2_states = 0.0;  // N + D + K
  double state_estimate = 0.0;
  std::optional<double> reported_states;  // externally reported figure for the 33-bus case
  std::string method;  // empty for estimate-only rows
  double wall_seconds = 0.0;
  long peak_rss_kb = 0;
  std::string note;
};

inline std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

inline long peak_rss_kb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return u.ru_maxrss;
}

inline constexpr double kReportedStates33 = 2.1e6;

// For each network: the 2^(N+D+K) estimate and, per method, the time to
// build the payoff matrix and derive the policy.
inline std::vector<ProbeRow> scalability_probe(const std::vector<net::NetworkState>& networks,
                                               const scenario::ScenarioCatalog& catalog,
                                               const resilience::AhpWeights& weights,
                                               const std::vector<std::string>& methods, const CompareConfig& cfg) {
  std::vector<ProbeRow> out;
  for (const auto& n : networks) {
    ProbeRow est;
    est.network = n.name;
    est.buses = n.size();
    est.ders = n.ders.size();
    est.switches = n.switches.size();
    est.log2_states = static_cast<double>(est.buses + est.ders + est.switches);
    est.state_estimate = std::exp2(est.log2_states);
    if (est.buses == 33 && est.ders == 4 && est.switches == 4) {
      est.reported_states = kReportedStates33;
      est.note = "formula gives 2^41 but the reported figure is about 2.1e6";
    }
    est.peak_rss_kb = peak_rss_kb();
    out.push_back(est);
    for (const auto& method : methods) {
      ProbeRow row = est;
      row.method = method;
      row.note.clear();
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const auto m = resilience::build_payoff_matrix(n, catalog, weights, cfg.mc.workers);
        (void)method_policy(method, m, n, catalog, cfg);
      } catch (const InputError& e) {
        row.note = e.what();
      }
      row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.peak_rss_kb = peak_rss_kb();
      out.push_back(std::move(row));
    }
  }
  return out;
}

// Estimate columns only, so the output is reproducible.
inline std::string probe_estimates_csv(const std::vector<ProbeRow>& rows) {
  std::string out = "network,buses,ders,switches,log2_states,state_estimate,reported_states,note\n";
  for (const auto& r : rows) {
    if (!r.method.empty()) continue;
    out += r.network + "," + std::to_string(r.buses) + "," + std::to_string(r.ders) + "," +
           std::to_string(r.switches) + "," + format_double(r.log2_states) + "," + format_double(r.state_estimate) +
           "," + (r.reported_states ? format_double(*r.reported_states) : "") + "," + csv_field(r.note) + "\n";
  }
  return out;
}

inline std::string probe_timing_csv(const std::vector<ProbeRow>& rows) {
  std::string out = "network,method,wall_seconds,peak_rss_kb,note\n";
  for (const auto& r : rows) {
    if (r.method.empty()) continue;
    out += r.network + "," + r.method + "," + format_double(r.wall_seconds) + "," + std::to_string(r.peak_rss_kb) +
           "," + csv_field(r.note) + "\n";
  }
  return out;
}

}  // namespace gridgame::experiments
