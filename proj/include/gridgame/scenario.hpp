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

// Attack and defense catalogs as declarative network transformations, and the
// five-step pipeline that turns one (attack, defense) pair into a scorecard.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "gridgame/error.hpp"
#include "gridgame/metrics.hpp"
#include "gridgame/netmodel.hpp"
#include "json.hpp"

namespace gridgame::scenario {

enum class EffectKind {
  trip_line,         // target: line id
  trip_der,          // target: DER id
  open_switch,       // target: switch id
  close_switch,      // target: switch id; companion: line opened if the close makes a loop
  scale_load,        // target: bus id; value: multiplier on P and Q
  fdi_bias,          // target: bus id; value: bias magnitude (trips DERs at the bus)
  set_der_dispatch,  // target: DER id; value: dispatch fraction
  shed_fraction,     // target: bus id | "noncritical" | "all"; value: fraction in [0,1]
  shed_threshold,    // value: kW; every load strictly above it is fully shed
};

inline const std::vector<std::pair<EffectKind, std::string>>& effect_names() {
  static const std::vector<std::pair<EffectKind, std::string>> kNames = {
      {EffectKind::trip_line, "trip_line"},
      {EffectKind::trip_der, "trip_der"},
      {EffectKind::open_switch, "open_switch"},
      {EffectKind::close_switch, "close_switch"},
      {EffectKind::scale_load, "scale_load"},
      {EffectKind::fdi_bias, "fdi_bias"},
      {EffectKind::set_der_dispatch, "set_der_dispatch"},
      {EffectKind::shed_fraction, "shed_fraction"},
      {EffectKind::shed_threshold, "shed_threshold"},
  };
  return kNames;
}

inline std::string to_string(EffectKind k) {
  for (const auto& [kind, name] : effect_names()) {
    if (kind == k) return name;
  }
  return "unknown";
}

inline EffectKind parse_effect_kind(const std::string& s) {
  for (const auto& [kind, name] : effect_names()) {
    if (name == s) return kind;
  }
  throw CatalogError("unknown effect kind '" + s + "'");
}

struct Effect {
  EffectKind kind = EffectKind::trip_line;
  std::string target;
  double value = 0.0;
  std::string companion;

  bool operator==(const Effect&) const = default;
};

struct Action {
  std::string id;
  std::string label;
  std::vector<Effect> effects;

  bool operator==(const Action&) const = default;
};

using AttackAction = Action;
using DefenseAction = Action;

struct ScenarioCatalog {
  std::string version;
  std::vector<AttackAction> attacks;
  std::vector<DefenseAction> defenses;
  // Rule-based baseline decisions, attack id -> defense id, kept with the
  // catalog so the baseline is auditable.
  std::map<std::string, std::string> rbd_rules;

  std::size_t attack_index(const std::string& id) const {
    for (std::size_t i = 0; i < attacks.size(); ++i) {
      if (attacks[i].id == id) return i;
    }
    throw CatalogError("unknown attack id '" + id + "'");
  }
  std::size_t defense_index(const std::string& id) const {
    for (std::size_t j = 0; j < defenses.size(); ++j) {
      if (defenses[j].id == id) return j;
    }
    throw CatalogError("unknown defense id '" + id + "'");
  }

  bool operator==(const ScenarioCatalog&) const = default;
};

namespace detail {

inline Effect trip(const std::string& line) { return {EffectKind::trip_line, line, 0.0, {}}; }
inline Effect trip_der(const std::string& der) { return {EffectKind::trip_der, der, 0.0, {}}; }
inline Effect close(const std::string& sw, const std::string& companion) {
  return {EffectKind::close_switch, sw, 0.0, companion};
}

}  // namespace detail

// Default catalog for the bundled 33-bus feeder. Line sets for A4-A10 and the
// tie companions are defaults; a catalog file can replace any of them.
inline ScenarioCatalog catalog_default() {
  using detail::close;
  using detail::trip;
  ScenarioCatalog c;
  c.version = "gridgame-default-1";
  c.attacks = {
      {"A1", "False data injection: +/-15% voltage bias at buses 5, 18, 29",
       {{EffectKind::fdi_bias, "5", 0.15, {}},
        {EffectKind::fdi_bias, "18", 0.15, {}},
        {EffectKind::fdi_bias, "29", 0.15, {}}}},
      {"A2", "Protocol exploitation: breaker commands on 6-7 and 14-15",
       {trip("L6-7"), trip("L14-15")}},
      {"A3", "Coordinated DER shutdown",
       {detail::trip_der("DER-1"), detail::trip_der("DER-2"), detail::trip_der("DER-3"),
        detail::trip_der("DER-4")}},
      {"A4", "SCADA HMI compromise: open 5-6, +20% load at buses 20-24",
       {trip("L5-6"),
        {EffectKind::scale_load, "20", 1.2, {}},
        {EffectKind::scale_load, "21", 1.2, {}},
        {EffectKind::scale_load, "22", 1.2, {}},
        {EffectKind::scale_load, "23", 1.2, {}},
        {EffectKind::scale_load, "24", 1.2, {}}}},
      {"A5", "Protection spoofing: false trips on 6-7 and 23-24", {trip("L6-7"), trip("L23-24")}},
      {"A6", "Single line trip 3-4", {trip("L3-4")}},
      {"A7", "Double cut 5-6, 14-15", {trip("L5-6"), trip("L14-15")}},
      {"A8", "Double cut 7-8, 24-25", {trip("L7-8"), trip("L24-25")}},
      {"A9", "Triple cut 2-3, 2-19, 28-29", {trip("L2-3"), trip("L2-19"), trip("L28-29")}},
      {"A10", "Triple cut 6-7, 23-24, 30-31", {trip("L6-7"), trip("L23-24"), trip("L30-31")}},
  };
  c.defenses = {
      {"D1", "No action", {}},
      {"D2", "Close tie SW1 (12-21)", {close("SW1", "L9-10")}},
      {"D3", "Close tie SW2 (9-15)", {close("SW2", "L14-15")}},
      {"D4", "Close tie SW3 (18-33)", {close("SW3", "L32-33")}},
      {"D5", "Close tie SW4 (25-29)", {close("SW4", "L28-29")}},
      {"D6", "Boost DER at bus 5", {{EffectKind::set_der_dispatch, "DER-1", 1.0, {}}}},
      {"D7", "Boost DER at bus 21", {{EffectKind::set_der_dispatch, "DER-3", 1.0, {}}}},
      {"D8", "Shed 30% of non-critical demand", {{EffectKind::shed_fraction, "noncritical", 0.3, {}}}},
      {"D9", "Shed every load above 200 kW", {{EffectKind::shed_threshold, "all", 200.0, {}}}},
      {"D10", "Close SW2 with DER support at bus 21",
       {close("SW2", "L14-15"), {EffectKind::set_der_dispatch, "DER-3", 1.0, {}}}},
  };
  // Output of experiments::rbd_rule_table on the bundled network; a unit test
  // keeps the two in sync.
  c.rbd_rules = {{"A1", "D7"}, {"A2", "D2"}, {"A3", "D6"}, {"A4", "D1"}, {"A5", "D5"},
                 {"A6", "D1"}, {"A7", "D2"}, {"A8", "D5"}, {"A9", "D2"}, {"A10", "D4"}};
  return c;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const Effect& e) {
  nlohmann::json j = {{"kind", to_string(e.kind)}, {"target", e.target}, {"value", e.value}};
  if (!e.companion.empty()) j["companion"] = e.companion;
  return j;
}

inline nlohmann::json to_json(const ScenarioCatalog& c) {
  auto actions = [](const std::vector<Action>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : list) {
      nlohmann::json effects = nlohmann::json::array();
      for (const auto& e : a.effects) effects.push_back(to_json(e));
      arr.push_back({{"id", a.id}, {"label", a.label}, {"effects", effects}});
    }
    return arr;
  };
  nlohmann::json j = {{"version", c.version},
                      {"attacks", actions(c.attacks)},
                      {"defenses", actions(c.defenses)}};
  if (!c.rbd_rules.empty()) j["rbd_rules"] = c.rbd_rules;
  return j;
}

namespace detail {

inline std::vector<Action> parse_actions(const nlohmann::json& arr, const std::string& where) {
  if (!arr.is_array()) throw ValidationError(where + ": expected an array");
  std::vector<Action> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    const auto& item = arr[k];
    if (!item.is_object() || !item.contains("id")) throw ValidationError(at + ": missing 'id'");
    Action a;
    try {
      a.id = item.at("id").get<std::string>();
      a.label = item.value("label", a.id);
      if (item.contains("effects")) {
        const auto& effs = item.at("effects");
        if (!effs.is_array()) throw ValidationError(at + ".effects: expected an array");
        for (std::size_t e = 0; e < effs.size(); ++e) {
          const std::string eat = at + ".effects[" + std::to_string(e) + "]";
          Effect eff;
          try {
            eff.kind = parse_effect_kind(effs[e].at("kind").get<std::string>());
          } catch (const CatalogError& err) {
            throw ValidationError(eat + ": " + err.what());
          }
          const auto& target = effs[e].contains("target") ? effs[e].at("target") : nlohmann::json("");
          eff.target = target.is_string() ? target.get<std::string>() : target.dump();
          eff.value = effs[e].value("value", 0.0);
          eff.companion = effs[e].value("companion", std::string());
          a.effects.push_back(std::move(eff));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(at + ": " + e.what());
    }
    for (const auto& prev : out) {
      if (prev.id == a.id) throw ValidationError(at + ": duplicate id " + a.id);
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace detail

// Arrays present in the document replace the corresponding default list.
inline ScenarioCatalog load_catalog(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("catalog: top level must be an object");
  ScenarioCatalog c = catalog_default();
  const bool replaces = doc.contains("attacks") || doc.contains("defenses");
  if (doc.contains("version")) c.version = doc["version"].get<std::string>();
  if (doc.contains("attacks")) c.attacks = detail::parse_actions(doc["attacks"], "attacks");
  if (doc.contains("defenses")) c.defenses = detail::parse_actions(doc["defenses"], "defenses");
  if (doc.contains("rbd_rules")) {
    c.rbd_rules = doc["rbd_rules"].get<std::map<std::string, std::string>>();
  } else if (replaces) {
    c.rbd_rules.clear();
  }
  if (c.attacks.empty() || c.defenses.empty()) {
    throw ValidationError("catalog: needs at least one attack and one defense");
  }
  return c;
}

inline ScenarioCatalog load_catalog_file(const std::string& path) {
  const auto text = net::read_text_file(path);
  try {
    return load_catalog(net::parse_json_text(text, path));
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Application

struct ApplyLog {
  std::vector<std::string> notes;
  bool switch_noop = false;
};

namespace detail {

inline int parse_bus(const net::NetworkState& st, const std::string& target, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const int id = std::stoi(target, &pos);
    if (pos == target.size() && st.has_bus(id)) return id;
  } catch (...) {
  }
  throw CatalogError(ctx + ": unknown bus '" + target + "'");
}

inline void close_switch(net::NetworkState& st, const Effect& e, const std::string& ctx, ApplyLog* log) {
  auto* sw = st.find_switch(e.target);
  if (!sw) throw CatalogError(ctx + ": unknown switch '" + e.target + "'");
  if (sw->position == net::Position::closed) return;
  if (!net::connected(st, sw->from_bus, sw->to_bus)) {
    sw->position = net::Position::closed;
    return;
  }
  // Closing would form a loop: open the companion sectionalizer if doing so
  // breaks it, otherwise leave the tie open.
  net::Line* comp = e.companion.empty() ? nullptr : st.find_line(e.companion);
  if (!e.companion.empty() && !comp) {
    throw CatalogError(ctx + ": unknown companion line '" + e.companion + "'");
  }
  if (comp && comp->status == net::Position::closed) {
    comp->status = net::Position::open;
    if (!net::connected(st, sw->from_bus, sw->to_bus)) {
      sw->position = net::Position::closed;
      return;
    }
    comp->status = net::Position::closed;
  }
  if (log) {
    log->switch_noop = true;
    log->notes.push_back(ctx + ": closing " + e.target + " would form a loop; left open");
  }
}

inline void apply_effect(net::NetworkState& st, const Effect& e, const std::string& ctx, ApplyLog* log) {
  switch (e.kind) {
    case EffectKind::trip_line: {
      auto* l = st.find_line(e.target);
      if (!l) throw CatalogError(ctx + ": unknown line '" + e.target + "'");
      l->status = net::Position::open;
      break;
    }
    case EffectKind::trip_der: {
      auto* d = st.find_der(e.target);
      if (!d) throw CatalogError(ctx + ": unknown DER '" + e.target + "'");
      d->online = false;
      break;
    }
    case EffectKind::open_switch: {
      auto* sw = st.find_switch(e.target);
      if (!sw) throw CatalogError(ctx + ": unknown switch '" + e.target + "'");
      sw->position = net::Position::open;
      break;
    }
    case EffectKind::close_switch:
      close_switch(st, e, ctx, log);
      break;
    case EffectKind::scale_load: {
      const int b = parse_bus(st, e.target, ctx);
      if (e.value < 0.0) throw CatalogError(ctx + ": negative load multiplier");
      auto& bus = st.buses[st.index_of(b)];
      bus.load_p *= e.value;
      bus.load_q *= e.value;
      break;
    }
    case EffectKind::fdi_bias: {
      // Corrupted voltage telemetry drives protective tripping of the DERs
      // at the biased bus.
      const int b = parse_bus(st, e.target, ctx);
      for (auto& d : st.ders) {
        if (d.bus == b) d.online = false;
      }
      break;
    }
    case EffectKind::set_der_dispatch: {
      auto* d = st.find_der(e.target);
      if (!d) throw CatalogError(ctx + ": unknown DER '" + e.target + "'");
      if (e.value < 0.0 || e.value > 1.0) throw CatalogError(ctx + ": dispatch outside [0,1]");
      d->dispatch_fraction = e.value;
      break;
    }
    case EffectKind::shed_fraction: {
      if (e.value < 0.0 || e.value > 1.0) throw CatalogError(ctx + ": shed fraction outside [0,1]");
      auto shed = [&](std::size_t k) { st.shed_fractions[k] = std::max(st.shed_fractions[k], e.value); };
      if (e.target == "noncritical" || e.target == "all") {
        for (std::size_t k = 0; k < st.size(); ++k) {
          if (e.target == "all" || !st.buses[k].is_critical) shed(k);
        }
      } else {
        shed(st.index_of(parse_bus(st, e.target, ctx)));
      }
      break;
    }
    case EffectKind::shed_threshold: {
      const bool noncritical_only = e.target == "noncritical";
      for (std::size_t k = 0; k < st.size(); ++k) {
        if (noncritical_only && st.buses[k].is_critical) continue;
        if (st.buses[k].load_p > e.value) st.shed_fractions[k] = 1.0;
      }
      break;
    }
  }
}

inline net::NetworkState apply(const net::NetworkState& state, const Action& action, ApplyLog* log) {
  net::NetworkState out = state;
  for (std::size_t k = 0; k < action.effects.size(); ++k) {
    apply_effect(out, action.effects[k], action.id + ".effects[" + std::to_string(k) + "]", log);
  }
  return out;
}

}  // namespace detail

inline net::NetworkState apply_attack(const net::NetworkState& state, const AttackAction& attack,
                                      ApplyLog* log = nullptr) {
  return detail::apply(state, attack, log);
}

inline net::NetworkState apply_defense(const net::NetworkState& state, const DefenseAction& defense,
                                       ApplyLog* log = nullptr) {
  return detail::apply(state, defense, log);
}

// Checks every effect against the network by applying each action to it.
inline void validate_catalog(const ScenarioCatalog& catalog, const net::NetworkState& network) {
  for (const auto& a : catalog.attacks) (void)apply_attack(network, a);
  for (const auto& d : catalog.defenses) (void)apply_defense(network, d);
}

// ---------------------------------------------------------------------------
// Pair evaluation

struct Outcome {
  net::NetworkState final_state;
  net::PowerFlowSolution flow;
  net::ServedLoadReport report;
  resilience::ResilienceScorecard card;
};

namespace detail {

// Solves, serves, and when islands had to curtail, re-solves on the reduced
// load. A non-converging flow falls back to shedding non-critical load in
// 10% steps.
inline void settle(net::NetworkState& st, Outcome& out) {
  out.flow = net::power_flow(st);
  out.report = net::serve_loads(st, out.flow);
  if (out.report.curtailed) {
    st = net::apply_curtailment(st, out.report);
    out.flow = net::power_flow(st);
    out.report = net::serve_loads(st, out.flow);
  }
  if (!out.flow.converged) {
    out.card.flags.insert(resilience::flag::kNonConvergence);
    for (int step = 1; step <= 10 && !out.flow.converged; ++step) {
      for (std::size_t k = 0; k < st.size(); ++k) {
        if (!st.buses[k].is_critical) {
          st.shed_fractions[k] = std::max(st.shed_fractions[k], 0.1 * step);
        }
      }
      out.flow = net::power_flow(st);
    }
    out.report = net::serve_loads(st, out.flow);
  }
}

}  // namespace detail

// Pre-attack flow, attack, defense, post-defense flow, metrics.
inline Outcome evaluate_pair_detailed(const net::NetworkState& base, const AttackAction& attack,
                                      const DefenseAction& defense) {
  Outcome out;
  const auto pre = net::power_flow(base);
  if (!pre.converged) out.card.flags.insert(resilience::flag::kNonConvergence);

  ApplyLog log;
  auto st = apply_defense(apply_attack(base, attack, &log), defense, &log);
  if (log.switch_noop) out.card.flags.insert(resilience::flag::kSwitchNoop);
  detail::settle(st, out);
  if (!out.flow.low_voltage_buses.empty()) out.card.flags.insert(resilience::flag::kLowVoltage);

  auto take = [&](resilience::MetricValue m) {
    if (m.flag) out.card.flags.insert(m.flag);
    return m.value;
  };
  out.card.lsr = take(resilience::lsr(out.report, base));
  out.card.clr = take(resilience::clr(out.report, base));
  out.card.tss = resilience::tss(st);
  out.card.drs = take(resilience::drs(out.report));
  out.final_state = std::move(st);
  return out;
}

inline resilience::ResilienceScorecard evaluate_pair(const net::NetworkState& base,
                                                     const AttackAction& attack,
                                                     const DefenseAction& defense) {
  return evaluate_pair_detailed(base, attack, defense).card;
}

}  // namespace gridgame::scenario
