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

// Radial distribution network model: data types, JSON loading, island
// detection, backward/forward-sweep power flow and served-load accounting.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gridgame/error.hpp"
#include "json.hpp"

namespace gridgame::net {

enum class Position { closed, open };

struct Bus {
  int id = 0;
  double load_p = 0.0;  // kW
  double load_q = 0.0;  // kvar
  bool is_critical = false;
  bool has_der = false;

  bool operator==(const Bus&) const = default;
};

struct Line {
  std::string id;
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;  // ohm
  double x = 0.0;  // ohm
  Position status = Position::closed;

  bool operator==(const Line&) const = default;
};

// Normally-open tie between feeder sections.
struct TieSwitch {
  std::string id;
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;
  double x = 0.0;
  Position position = Position::open;

  bool operator==(const TieSwitch&) const = default;
};

inline constexpr double kDefaultDispatch = 0.7;

struct Der {
  std::string id;
  int bus = 0;
  double rating_p = 0.0;  // kW
  double dispatch_fraction = kDefaultDispatch;
  bool online = true;
  double q_capability_fraction = 0.10;  // carried, unused by the metrics

  double output() const { return online ? rating_p * dispatch_fraction : 0.0; }
  double available() const { return online ? rating_p : 0.0; }

  bool operator==(const Der&) const = default;
};

struct NetworkState {
  std::string name;
  std::vector<Bus> buses;  // buses[k].id == k + 1
  std::vector<Line> lines;
  std::vector<TieSwitch> switches;
  std::vector<Der> ders;
  double base_kv = 12.66;
  double base_mva = 10.0;
  int slack_bus = 1;
  std::vector<double> shed_fractions;  // per bus, same indexing as buses

  std::size_t size() const { return buses.size(); }
  std::size_t index_of(int bus_id) const { return static_cast<std::size_t>(bus_id - 1); }
  bool has_bus(int bus_id) const { return bus_id >= 1 && bus_id <= static_cast<int>(buses.size()); }
  const Bus& bus(int bus_id) const { return buses[index_of(bus_id)]; }
  double shed(int bus_id) const { return shed_fractions[index_of(bus_id)]; }

  // Demand after operator shedding, kW.
  double demand_p(int bus_id) const { return bus(bus_id).load_p * (1.0 - shed(bus_id)); }
  double demand_q(int bus_id) const { return bus(bus_id).load_q * (1.0 - shed(bus_id)); }

  double total_load_p() const {
    return std::accumulate(buses.begin(), buses.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.load_p; });
  }
  double total_load_q() const {
    return std::accumulate(buses.begin(), buses.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.load_q; });
  }

  Line* find_line(const std::string& id) {
    for (auto& l : lines) {
      if (l.id == id) return &l;
    }
    return nullptr;
  }
  const Line* find_line(const std::string& id) const {
    return const_cast<NetworkState*>(this)->find_line(id);
  }
  TieSwitch* find_switch(const std::string& id) {
    for (auto& s : switches) {
      if (s.id == id) return &s;
    }
    return nullptr;
  }
  const TieSwitch* find_switch(const std::string& id) const {
    return const_cast<NetworkState*>(this)->find_switch(id);
  }
  Der* find_der(const std::string& id) {
    for (auto& d : ders) {
      if (d.id == id) return &d;
    }
    return nullptr;
  }
  const Der* find_der(const std::string& id) const {
    return const_cast<NetworkState*>(this)->find_der(id);
  }

  bool operator==(const NetworkState&) const = default;
};

// A closed line or closed tie switch, seen uniformly by the topology code.
struct Branch {
  int from_bus;
  int to_bus;
  double r;
  double x;
};

inline std::vector<Branch> closed_branches(const NetworkState& state) {
  std::vector<Branch> out;
  out.reserve(state.lines.size() + state.switches.size());
  for (const auto& l : state.lines) {
    if (l.status == Position::closed) out.push_back({l.from_bus, l.to_bus, l.r, l.x});
  }
  for (const auto& s : state.switches) {
    if (s.position == Position::closed) out.push_back({s.from_bus, s.to_bus, s.r, s.x});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loading

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
T field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + "." + key + ": wrong type");
  }
}

}  // namespace detail

inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin + ": malformed JSON at " + detail::line_col(text, e.byte) + " (byte " +
                     std::to_string(e.byte) + ")");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::vector<int>> islands(const NetworkState& state);

// Builds a pristine state: lines closed, ties open, DERs online at the
// default dispatch, no shedding. Validation errors name the offending entry.
inline NetworkState load_network(const nlohmann::json& doc) {
  using detail::field;
  if (!doc.is_object()) throw ValidationError("network document: top level must be an object");
  NetworkState st;
  st.name = doc.value("name", std::string("network"));
  st.base_kv = doc.contains("base_kv") ? field<double>(doc, "base_kv", "network") : 12.66;
  st.base_mva = doc.value("base_mva", 10.0);
  st.slack_bus = doc.contains("slack_bus") ? field<int>(doc, "slack_bus", "network") : 1;
  if (st.base_kv <= 0.0 || st.base_mva <= 0.0) {
    throw ValidationError("network: base_kv and base_mva must be positive");
  }

  if (!doc.contains("buses") || !doc["buses"].is_array() || doc["buses"].empty()) {
    throw ValidationError("network: 'buses' must be a non-empty array");
  }
  const auto& buses = doc["buses"];
  st.buses.resize(buses.size());
  std::vector<bool> seen(buses.size(), false);
  for (std::size_t k = 0; k < buses.size(); ++k) {
    const std::string where = "buses[" + std::to_string(k) + "]";
    const int id = field<int>(buses[k], "id", where);
    if (id < 1 || id > static_cast<int>(buses.size())) {
      throw ValidationError(where + ": bus ids must be dense 1.." + std::to_string(buses.size()));
    }
    if (seen[id - 1]) throw ValidationError(where + ": duplicate bus id " + std::to_string(id));
    seen[id - 1] = true;
    Bus b;
    b.id = id;
    b.load_p = buses[k].value("p_kw", 0.0);
    b.load_q = buses[k].value("q_kvar", 0.0);
    if (b.load_p < 0.0) throw ValidationError(where + ": p_kw must be >= 0");
    st.buses[id - 1] = b;
  }
  if (!st.has_bus(st.slack_bus)) throw ValidationError("network: slack_bus does not exist");

  auto check_bus = [&](int id, const std::string& where) {
    if (!st.has_bus(id)) throw ValidationError(where + ": unknown bus " + std::to_string(id));
  };

  if (doc.contains("lines")) {
    const auto& lines = doc["lines"];
    if (!lines.is_array()) throw ValidationError("network: 'lines' must be an array");
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const std::string where = "lines[" + std::to_string(k) + "]";
      Line l;
      l.from_bus = field<int>(lines[k], "from", where);
      l.to_bus = field<int>(lines[k], "to", where);
      l.r = field<double>(lines[k], "r_ohm", where);
      l.x = field<double>(lines[k], "x_ohm", where);
      l.id = lines[k].value("id", "L" + std::to_string(l.from_bus) + "-" + std::to_string(l.to_bus));
      check_bus(l.from_bus, where);
      check_bus(l.to_bus, where);
      if (l.from_bus == l.to_bus) throw ValidationError(where + ": from == to");
      if (l.r < 0.0 || l.x < 0.0) throw ValidationError(where + ": negative impedance");
      if (st.find_line(l.id)) throw ValidationError(where + ": duplicate line id " + l.id);
      st.lines.push_back(l);
    }
  }
  if (doc.contains("switches")) {
    const auto& sws = doc["switches"];
    if (!sws.is_array()) throw ValidationError("network: 'switches' must be an array");
    for (std::size_t k = 0; k < sws.size(); ++k) {
      const std::string where = "switches[" + std::to_string(k) + "]";
      TieSwitch s;
      s.id = field<std::string>(sws[k], "id", where);
      s.from_bus = field<int>(sws[k], "from", where);
      s.to_bus = field<int>(sws[k], "to", where);
      s.r = sws[k].value("r_ohm", 0.0);
      s.x = sws[k].value("x_ohm", 0.0);
      check_bus(s.from_bus, where);
      check_bus(s.to_bus, where);
      if (s.from_bus == s.to_bus) throw ValidationError(where + ": from == to");
      if (s.r < 0.0 || s.x < 0.0) throw ValidationError(where + ": negative impedance");
      if (st.find_switch(s.id)) throw ValidationError(where + ": duplicate switch id " + s.id);
      st.switches.push_back(s);
    }
  }
  if (doc.contains("ders")) {
    const auto& ders = doc["ders"];
    if (!ders.is_array()) throw ValidationError("network: 'ders' must be an array");
    for (std::size_t k = 0; k < ders.size(); ++k) {
      const std::string where = "ders[" + std::to_string(k) + "]";
      Der d;
      d.id = field<std::string>(ders[k], "id", where);
      d.bus = field<int>(ders[k], "bus", where);
      d.rating_p = field<double>(ders[k], "rating_kw", where);
      d.dispatch_fraction = ders[k].value("dispatch_fraction", kDefaultDispatch);
      d.q_capability_fraction = ders[k].value("q_capability_fraction", 0.10);
      check_bus(d.bus, where);
      if (d.rating_p < 0.0) throw ValidationError(where + ": negative rating");
      if (d.dispatch_fraction < 0.0 || d.dispatch_fraction > 1.0) {
        throw ValidationError(where + ": dispatch_fraction outside [0,1]");
      }
      if (st.find_der(d.id)) throw ValidationError(where + ": duplicate DER id " + d.id);
      st.buses[st.index_of(d.bus)].has_der = true;
      st.ders.push_back(d);
    }
  }
  if (doc.contains("critical_buses")) {
    const auto& crit = doc["critical_buses"];
    if (!crit.is_array()) throw ValidationError("network: 'critical_buses' must be an array");
    for (std::size_t k = 0; k < crit.size(); ++k) {
      const std::string where = "critical_buses[" + std::to_string(k) + "]";
      if (!crit[k].is_number_integer()) throw ValidationError(where + ": expected a bus id");
      const int id = crit[k].get<int>();
      check_bus(id, where);
      st.buses[st.index_of(id)].is_critical = true;
    }
  }
  st.shed_fractions.assign(st.buses.size(), 0.0);

  // Base topology must be a forest: every component has exactly |V| - 1 edges.
  const auto comps = islands(st);
  const std::size_t edges = closed_branches(st).size();
  if (edges + comps.size() != st.buses.size()) {
    throw ValidationError("network: base topology (closed lines) is not radial");
  }
  return st;
}

inline NetworkState load_network_text(const std::string& text, const std::string& origin) {
  try {
    return load_network(parse_json_text(text, origin));
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

inline NetworkState load_network_file(const std::string& path) {
  return load_network_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Topology

// Connected components of closed lines and closed switches. Components are
// listed by their smallest bus id; members are sorted ascending.
inline std::vector<std::vector<int>> islands(const NetworkState& state) {
  const std::size_t n = state.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const auto& br : closed_branches(state)) {
    const auto a = find(state.index_of(br.from_bus));
    const auto b = find(state.index_of(br.to_bus));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> out;
  for (std::size_t v = 0; v < n; ++v) {
    const auto root = find(v);
    if (label[root] < 0) {
      label[root] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(label[root])].push_back(static_cast<int>(v + 1));
  }
  return out;
}

// True when closing a branch between a and b would create a loop.
inline bool connected(const NetworkState& state, int a, int b) {
  for (const auto& comp : islands(state)) {
    const bool has_a = std::binary_search(comp.begin(), comp.end(), a);
    const bool has_b = std::binary_search(comp.begin(), comp.end(), b);
    if (has_a || has_b) return has_a && has_b;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Power flow

struct FlowOptions {
  double tolerance = 1e-6;  // p.u. voltage change between sweeps
  int max_sweeps = 100;
};

inline constexpr double kLowVoltage = 0.90;

struct IslandFlow {
  std::vector<int> buses;
  int reference_bus = 0;  // 0 when de-energized
  bool has_slack = false;
  bool energized = false;
  bool converged = true;
  int iterations = 0;
  double max_change = 0.0;
  std::complex<double> reference_injection{};  // p.u.
  double der_injection = 0.0;                  // p.u., non-reference DERs
  double load = 0.0;                           // p.u. active demand solved for
  double losses = 0.0;                         // p.u. active series losses
};

struct PowerFlowSolution {
  std::vector<std::complex<double>> voltages;  // per bus, p.u.
  std::vector<int> island_assignment;          // per bus, index into islands
  std::vector<IslandFlow> islands;
  bool converged = true;
  int iterations = 0;
  double max_mismatch = 0.0;
  std::vector<int> low_voltage_buses;  // energized buses below kLowVoltage

  double magnitude(int bus_id) const { return std::abs(voltages[static_cast<std::size_t>(bus_id - 1)]); }

  // Lowest voltage among energized buses: (bus id, |V|).
  std::pair<int, double> min_voltage() const {
    std::pair<int, double> best{0, 0.0};
    for (std::size_t k = 0; k < voltages.size(); ++k) {
      if (!islands[static_cast<std::size_t>(island_assignment[k])].energized) continue;
      const double v = std::abs(voltages[k]);
      if (best.first == 0 || v < best.second) best = {static_cast<int>(k + 1), v};
    }
    return best;
  }

  bool operator==(const PowerFlowSolution& o) const {
    return voltages == o.voltages && island_assignment == o.island_assignment &&
           converged == o.converged && iterations == o.iterations &&
           max_mismatch == o.max_mismatch;
  }
};

// Reference node of an island: the slack bus, else the bus of the
// largest-rated online DER (first listed wins ties), else none.
inline int reference_bus(const NetworkState& state, const std::vector<int>& members) {
  if (std::binary_search(members.begin(), members.end(), state.slack_bus)) return state.slack_bus;
  const Der* best = nullptr;
  for (const auto& d : state.ders) {
    if (!d.online || !std::binary_search(members.begin(), members.end(), d.bus)) continue;
    if (!best || d.rating_p > best->rating_p) best = &d;
  }
  return best ? best->bus : 0;
}

inline double island_der_capacity(const NetworkState& state, const std::vector<int>& members) {
  double cap = 0.0;
  for (const auto& d : state.ders) {
    if (std::binary_search(members.begin(), members.end(), d.bus)) cap += d.output();
  }
  return cap;
}

inline double island_demand(const NetworkState& state, const std::vector<int>& members) {
  double dem = 0.0;
  for (int b : members) dem += state.demand_p(b);
  return dem;
}

namespace detail {

struct Adjacent {
  int bus;
  std::complex<double> z;  // p.u.
};

// Sweeps one island rooted at its reference node. Throws RadialityError if
// the island's closed branches contain a loop.
inline void sweep_island(const NetworkState& st, const std::vector<std::vector<Adjacent>>& adj,
                         std::size_t branch_count, IslandFlow& isl,
                         std::vector<std::complex<double>>& volts, const FlowOptions& opt) {
  const std::size_t nb = isl.buses.size();
  if (branch_count + 1 != nb) {
    throw RadialityError("island rooted at bus " + std::to_string(isl.reference_bus) +
                         " is not radial (" + std::to_string(branch_count) + " branches, " +
                         std::to_string(nb) + " buses)");
  }
  const double sbase_kw = st.base_mva * 1000.0;

  // Breadth-first order from the reference node.
  std::vector<int> order;
  std::vector<int> parent(st.size() + 1, 0);
  std::vector<std::complex<double>> zup(st.size() + 1);
  std::vector<bool> seen(st.size() + 1, false);
  order.reserve(nb);
  order.push_back(isl.reference_bus);
  seen[static_cast<std::size_t>(isl.reference_bus)] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int u = order[head];
    for (const auto& a : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(a.bus)]) continue;
      seen[static_cast<std::size_t>(a.bus)] = true;
      parent[static_cast<std::size_t>(a.bus)] = u;
      zup[static_cast<std::size_t>(a.bus)] = a.z;
      order.push_back(a.bus);
    }
  }

  // Net complex load per bus in p.u. (DER injections subtract).
  std::vector<std::complex<double>> s_net(st.size() + 1);
  double capacity = 0.0, demand = 0.0;
  for (int b : isl.buses) demand += st.demand_p(b);
  capacity = island_der_capacity(st, isl.buses);
  const double der_scale = (isl.has_slack || capacity <= 0.0) ? 1.0 : std::min(1.0, demand / capacity);
  isl.load = demand / sbase_kw;
  isl.der_injection = 0.0;
  for (int b : isl.buses) {
    s_net[static_cast<std::size_t>(b)] = {st.demand_p(b) / sbase_kw, st.demand_q(b) / sbase_kw};
  }
  for (const auto& d : st.ders) {
    if (!d.online || (d.bus == isl.reference_bus && !isl.has_slack)) continue;
    if (!std::binary_search(isl.buses.begin(), isl.buses.end(), d.bus)) continue;
    const double inj = d.output() * der_scale / sbase_kw;
    s_net[static_cast<std::size_t>(d.bus)] -= inj;
    isl.der_injection += inj;
  }

  for (int b : isl.buses) volts[static_cast<std::size_t>(b - 1)] = {1.0, 0.0};
  std::vector<std::complex<double>> current(st.size() + 1);
  isl.converged = false;
  for (int it = 1; it <= opt.max_sweeps; ++it) {
    // Backward: accumulate branch currents from the leaves.
    for (int b : isl.buses) {
      current[static_cast<std::size_t>(b)] =
          std::conj(s_net[static_cast<std::size_t>(b)] / volts[static_cast<std::size_t>(b - 1)]);
    }
    for (std::size_t k = order.size(); k-- > 1;) {
      const int b = order[k];
      current[static_cast<std::size_t>(parent[static_cast<std::size_t>(b)])] +=
          current[static_cast<std::size_t>(b)];
    }
    // Forward: voltage drops from the reference outward.
    double change = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) {
      const int b = order[k];
      const auto ub = static_cast<std::size_t>(b);
      const auto v_new = volts[static_cast<std::size_t>(parent[ub] - 1)] - zup[ub] * current[ub];
      change = std::max(change, std::abs(v_new - volts[ub - 1]));
      volts[ub - 1] = v_new;
    }
    isl.iterations = it;
    isl.max_change = change;
    if (change <= opt.tolerance) {
      isl.converged = true;
      break;
    }
  }

  // Branch currents consistent with the final voltages, for the balance report.
  for (int b : isl.buses) {
    current[static_cast<std::size_t>(b)] =
        std::conj(s_net[static_cast<std::size_t>(b)] / volts[static_cast<std::size_t>(b - 1)]);
  }
  for (std::size_t k = order.size(); k-- > 1;) {
    const int b = order[k];
    current[static_cast<std::size_t>(parent[static_cast<std::size_t>(b)])] +=
        current[static_cast<std::size_t>(b)];
  }
  isl.losses = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto ub = static_cast<std::size_t>(order[k]);
    isl.losses += std::norm(current[ub]) * zup[ub].real();
  }
  const auto ref = static_cast<std::size_t>(isl.reference_bus);
  isl.reference_injection = volts[ref - 1] * std::conj(current[ref]);
}

}  // namespace detail

// Backward/forward sweep per energized island with constant-power loads.
// Islands without a reference node are reported de-energized at 0 p.u.
inline PowerFlowSolution power_flow(const NetworkState& state, const FlowOptions& opt = {}) {
  PowerFlowSolution sol;
  const auto comps = islands(state);
  const double zbase = state.base_kv * state.base_kv / state.base_mva;
  sol.voltages.assign(state.size(), {0.0, 0.0});
  sol.island_assignment.assign(state.size(), 0);

  std::vector<std::vector<detail::Adjacent>> adj(state.size() + 1);
  for (const auto& br : closed_branches(state)) {
    const std::complex<double> z{br.r / zbase, br.x / zbase};
    adj[static_cast<std::size_t>(br.from_bus)].push_back({br.to_bus, z});
    adj[static_cast<std::size_t>(br.to_bus)].push_back({br.from_bus, z});
  }

  for (std::size_t c = 0; c < comps.size(); ++c) {
    IslandFlow isl;
    isl.buses = comps[c];
    for (int b : isl.buses) sol.island_assignment[state.index_of(b)] = static_cast<int>(c);
    isl.reference_bus = reference_bus(state, isl.buses);
    isl.has_slack = isl.reference_bus == state.slack_bus;
    isl.energized = isl.reference_bus != 0;
    if (isl.energized) {
      std::size_t branch_count = 0;
      for (int b : isl.buses) branch_count += adj[static_cast<std::size_t>(b)].size();
      detail::sweep_island(state, adj, branch_count / 2, isl, sol.voltages, opt);
      sol.converged = sol.converged && isl.converged;
      sol.iterations = std::max(sol.iterations, isl.iterations);
      sol.max_mismatch = std::max(sol.max_mismatch, isl.max_change);
      for (int b : isl.buses) {
        if (sol.magnitude(b) < kLowVoltage) sol.low_voltage_buses.push_back(b);
      }
    }
    sol.islands.push_back(std::move(isl));
  }
  std::sort(sol.low_voltage_buses.begin(), sol.low_voltage_buses.end());
  return sol;
}

// ---------------------------------------------------------------------------
// Served load

struct ServedLoadReport {
  std::vector<double> served_p;  // per bus, kW
  std::vector<double> served_q;  // per bus, kvar
  std::vector<double> der_utilized;  // per DER (state.ders order), kW
  std::vector<double> der_available;  // per DER, kW
  std::vector<int> connected_buses;  // buses in energized islands, ascending
  bool curtailed = false;  // an islanded microgrid had to shed for capacity

  double total_served_p() const { return std::accumulate(served_p.begin(), served_p.end(), 0.0); }
};

// Applies the islanding policy: de-energized islands serve nothing; the
// slack island serves its full post-shedding demand; a DER island whose
// capacity falls short curtails non-critical loads proportionally first and
// critical loads only after those are exhausted. DER utilization is the
// served demand (capped at capacity) split in proportion to each unit's
// dispatched output.
inline ServedLoadReport serve_loads(const NetworkState& state, const PowerFlowSolution& sol) {
  ServedLoadReport rep;
  rep.served_p.assign(state.size(), 0.0);
  rep.served_q.assign(state.size(), 0.0);
  rep.der_utilized.assign(state.ders.size(), 0.0);
  rep.der_available.assign(state.ders.size(), 0.0);
  for (std::size_t k = 0; k < state.ders.size(); ++k) rep.der_available[k] = state.ders[k].available();

  for (const auto& isl : sol.islands) {
    if (!isl.energized) continue;
    double crit = 0.0, noncrit = 0.0;
    for (int b : isl.buses) {
      rep.connected_buses.push_back(b);
      (state.bus(b).is_critical ? crit : noncrit) += state.demand_p(b);
    }
    const double capacity = island_der_capacity(state, isl.buses);
    double crit_scale = 1.0, noncrit_scale = 1.0;
    if (!isl.has_slack && capacity < crit + noncrit) {
      rep.curtailed = true;
      if (capacity >= crit) {
        noncrit_scale = noncrit > 0.0 ? (capacity - crit) / noncrit : 1.0;
      } else {
        noncrit_scale = 0.0;
        crit_scale = crit > 0.0 ? capacity / crit : 1.0;
      }
    }
    double served_total = 0.0;
    for (int b : isl.buses) {
      const auto k = state.index_of(b);
      const double scale = state.bus(b).is_critical ? crit_scale : noncrit_scale;
      rep.served_p[k] = state.demand_p(b) * scale;
      rep.served_q[k] = state.demand_q(b) * scale;
      served_total += rep.served_p[k];
    }
    if (capacity > 0.0) {
      const double used = std::min(capacity, served_total);
      for (std::size_t d = 0; d < state.ders.size(); ++d) {
        const auto& der = state.ders[d];
        if (std::binary_search(isl.buses.begin(), isl.buses.end(), der.bus)) {
          rep.der_utilized[d] = used * der.output() / capacity;
        }
      }
    }
  }
  std::sort(rep.connected_buses.begin(), rep.connected_buses.end());
  return rep;
}

// Folds capacity curtailment from a report back into shed fractions so the
// flow can be re-solved on the load actually served.
inline NetworkState apply_curtailment(const NetworkState& state, const ServedLoadReport& rep) {
  NetworkState out = state;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double load = out.buses[k].load_p;
    if (load <= 0.0 || !std::binary_search(rep.connected_buses.begin(), rep.connected_buses.end(),
                                           static_cast<int>(k + 1))) {
      continue;
    }
    out.shed_fractions[k] = std::clamp(1.0 - rep.served_p[k] / load, 0.0, 1.0);
  }
  return out;
}

}  // namespace gridgame::net
