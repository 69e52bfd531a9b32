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

#include <gtest/gtest.h>

#include <complex>
#include <queue>
#include <set>

#include "gridgame/netmodel.hpp"
#include "gridgame/random.hpp"

using namespace gridgame;
using nlohmann::json;

namespace {

const std::string kNetworkPath = std::string(GRIDGAME_DATA_DIR) + "/ieee33.json";

json raw_network() { return json::parse(net::read_text_file(kNetworkPath)); }

net::NetworkState ieee33() { return net::load_network_file(kNetworkPath); }

net::NetworkState ieee33_without_ders() {
  auto st = ieee33();
  for (auto& d : st.ders) d.online = false;
  return st;
}

// Independent load flow straight from the JSON document: every bus voltage is
// V_k = 1 - sum_m Zc(k, m) * conj(S_m / V_m), where Zc(k, m) is the impedance
// shared by the root paths of k and m. Iterated to 1e-13.
std::vector<double> path_impedance_flow(const json& doc, bool ders_online) {
  const int n = static_cast<int>(doc["buses"].size());
  const double zbase = 12.66 * 12.66 / 10.0;
  std::vector<std::vector<std::pair<int, std::complex<double>>>> adj(n + 1);
  for (const auto& l : doc["lines"]) {
    const int a = l["from"], b = l["to"];
    const std::complex<double> z{l["r_ohm"].get<double>() / zbase, l["x_ohm"].get<double>() / zbase};
    adj[a].push_back({b, z});
    adj[b].push_back({a, z});
  }
  // Root path of each bus as a set of (child bus) edges with their impedance.
  std::vector<int> parent(n + 1, 0);
  std::vector<std::complex<double>> zup(n + 1);
  std::vector<bool> seen(n + 1, false);
  std::queue<int> q;
  q.push(1);
  seen[1] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (auto [v, z] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      parent[v] = u;
      zup[v] = z;
      q.push(v);
    }
  }
  std::vector<std::set<int>> path(n + 1);
  for (int k = 2; k <= n; ++k) {
    for (int b = k; b != 1; b = parent[b]) path[k].insert(b);
  }
  std::vector<std::vector<std::complex<double>>> zc(n + 1, std::vector<std::complex<double>>(n + 1));
  for (int k = 2; k <= n; ++k) {
    for (int m = 2; m <= n; ++m) {
      for (int e : path[k]) {
        if (path[m].count(e)) zc[k][m] += zup[e];
      }
    }
  }
  std::vector<std::complex<double>> s(n + 1);
  for (const auto& b : doc["buses"]) s[b["id"].get<int>()] = {b["p_kw"].get<double>() / 10000.0, b["q_kvar"].get<double>() / 10000.0};
  if (ders_online) {
    for (const auto& d : doc["ders"]) s[d["bus"].get<int>()] -= 0.7 * d["rating_kw"].get<double>() / 10000.0;
  }
  std::vector<std::complex<double>> v(n + 1, {1.0, 0.0});
  for (int it = 0; it < 1000; ++it) {
    std::vector<std::complex<double>> cur(n + 1);
    for (int m = 2; m <= n; ++m) cur[m] = std::conj(s[m] / v[m]);
    double change = 0.0;
    std::vector<std::complex<double>> next(n + 1, {1.0, 0.0});
    for (int k = 2; k <= n; ++k) {
      for (int m = 2; m <= n; ++m) next[k] -= zc[k][m] * cur[m];
      change = std::max(change, std::abs(next[k] - v[k]));
    }
    v = next;
    if (change < 1e-13) break;
  }
  std::vector<double> mag(n);
  for (int k = 1; k <= n; ++k) mag[k - 1] = std::abs(v[k]);
  return mag;
}

// Components by breadth-first search over closed lines and closed switches.
std::set<std::set<int>> bfs_components(const net::NetworkState& st) {
  const int n = static_cast<int>(st.size());
  std::vector<std::vector<int>> adj(n + 1);
  for (const auto& l : st.lines) {
    if (l.status == net::Position::closed) {
      adj[l.from_bus].push_back(l.to_bus);
      adj[l.to_bus].push_back(l.from_bus);
    }
  }
  for (const auto& s : st.switches) {
    if (s.position == net::Position::closed) {
      adj[s.from_bus].push_back(s.to_bus);
      adj[s.to_bus].push_back(s.from_bus);
    }
  }
  std::vector<bool> seen(n + 1, false);
  std::set<std::set<int>> out;
  for (int s = 1; s <= n; ++s) {
    if (seen[s]) continue;
    std::set<int> comp;
    std::queue<int> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      comp.insert(u);
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
      }
    }
    out.insert(comp);
  }
  return out;
}

std::string small_feeder(const std::string& lines) {
  return R"({"buses":[{"id":1},{"id":2,"p_kw":100,"q_kvar":50},{"id":3,"p_kw":80,"q_kvar":40}],"lines":)" + lines +
         "}";
}

}  // namespace

TEST(NetworkLoad, BundledTotals) {
  const auto st = ieee33();
  EXPECT_EQ(st.size(), 33u);
  EXPECT_EQ(st.lines.size(), 32u);
  EXPECT_EQ(st.switches.size(), 4u);
  EXPECT_EQ(st.ders.size(), 4u);
  EXPECT_DOUBLE_EQ(st.total_load_p(), 3715.0);
  EXPECT_DOUBLE_EQ(st.total_load_q(), 2300.0);
  for (int b : {7, 14, 24, 31}) EXPECT_TRUE(st.bus(b).is_critical) << b;
  for (int b : {5, 18, 21, 29}) EXPECT_TRUE(st.bus(b).has_der) << b;
  for (const auto& s : st.switches) EXPECT_EQ(s.position, net::Position::open);
  for (const auto& d : st.ders) {
    EXPECT_TRUE(d.online);
    EXPECT_DOUBLE_EQ(d.dispatch_fraction, net::kDefaultDispatch);
  }
}

TEST(NetworkLoad, DefaultLineIds) {
  const auto st = ieee33();
  EXPECT_NE(st.find_line("L1-2"), nullptr);
  EXPECT_NE(st.find_line("L2-19"), nullptr);
  EXPECT_EQ(st.find_line("L25-26"), nullptr);
}

TEST(NetworkLoad, RejectsLoop) {
  const auto text = small_feeder(
      R"([{"from":1,"to":2,"r_ohm":0.1,"x_ohm":0.1},{"from":2,"to":3,"r_ohm":0.1,"x_ohm":0.1},{"from":3,"to":1,"r_ohm":0.1,"x_ohm":0.1}])");
  try {
    net::load_network_text(text, "loop.json");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("radial"), std::string::npos);
  }
}

TEST(NetworkLoad, RejectsUnknownBusWithPath) {
  const auto text = small_feeder(R"([{"from":1,"to":2,"r_ohm":0.1,"x_ohm":0.1},{"from":2,"to":9,"r_ohm":0.1,"x_ohm":0.1}])");
  try {
    net::load_network_text(text, "bad.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("lines[1]"), std::string::npos) << e.what();
  }
}

TEST(NetworkLoad, RejectsNegativeImpedance) {
  const auto text = small_feeder(R"([{"from":1,"to":2,"r_ohm":-0.1,"x_ohm":0.1},{"from":2,"to":3,"r_ohm":0.1,"x_ohm":0.1}])");
  EXPECT_THROW(net::load_network_text(text, "neg.json"), ValidationError);
}

TEST(NetworkLoad, RejectsSparseIds) {
  const std::string text = R"({"buses":[{"id":1},{"id":3}],"lines":[]})";
  EXPECT_THROW(net::load_network_text(text, "sparse.json"), ValidationError);
}

TEST(NetworkLoad, MalformedJsonReportsPosition) {
  try {
    net::load_network_text("{\n  \"buses\": [\n  {\"id\": 1,, }\n]}", "broken.json");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("broken.json"), std::string::npos);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(NetworkLoad, MissingFileNamesPath) {
  try {
    net::load_network_file("/nonexistent/feeder.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/feeder.json"), std::string::npos);
  }
}

TEST(Topology, BaseIsSingleIsland) {
  const auto st = ieee33();
  const auto comps = net::islands(st);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].size(), 33u);
}

TEST(Topology, IslandsMatchBfsOracle) {
  auto st = ieee33();
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = st;
    for (auto& l : s.lines) l.status = rng.uniform() < 0.2 ? net::Position::open : net::Position::closed;
    for (auto& sw : s.switches) sw.position = net::Position::open;
    std::set<std::set<int>> ours;
    for (const auto& c : net::islands(s)) ours.insert(std::set<int>(c.begin(), c.end()));
    EXPECT_EQ(ours, bfs_components(s)) << "trial " << trial;
  }
}

TEST(Topology, IslandOrderingIsCanonical) {
  auto st = ieee33();
  st.find_line("L6-7")->status = net::Position::open;
  st.find_line("L2-19")->status = net::Position::open;
  const auto comps = net::islands(st);
  ASSERT_EQ(comps.size(), 3u);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    EXPECT_TRUE(std::is_sorted(comps[k].begin(), comps[k].end()));
    if (k > 0) {
      EXPECT_LT(comps[k - 1].front(), comps[k].front());
    }
  }
  EXPECT_TRUE(net::connected(st, 1, 6));
  EXPECT_FALSE(net::connected(st, 1, 7));
  EXPECT_FALSE(net::connected(st, 1, 19));
}

TEST(PowerFlow, BaseCaseMatchesPathImpedanceOracle) {
  const auto st = ieee33_without_ders();
  const auto sol = net::power_flow(st);
  ASSERT_TRUE(sol.converged);
  const auto oracle = path_impedance_flow(raw_network(), false);
  for (int b = 1; b <= 33; ++b) EXPECT_NEAR(sol.magnitude(b), oracle[b - 1], 1e-6) << "bus " << b;
  const auto [bus, v] = sol.min_voltage();
  EXPECT_EQ(bus, 18);
  EXPECT_NEAR(v, 0.913, 0.005);
}

TEST(PowerFlow, BaseCaseLosses) {
  const auto sol = net::power_flow(ieee33_without_ders());
  EXPECT_NEAR(sol.islands[0].losses * 10000.0, 202.7, 0.5);
}

TEST(PowerFlow, DersOnlineMatchOracle) {
  const auto sol = net::power_flow(ieee33());
  ASSERT_TRUE(sol.converged);
  const auto oracle = path_impedance_flow(raw_network(), true);
  for (int b = 1; b <= 33; ++b) EXPECT_NEAR(sol.magnitude(b), oracle[b - 1], 1e-6) << "bus " << b;
  EXPECT_GT(sol.min_voltage().second, 0.94);
}

TEST(PowerFlow, ZeroLoadIsFlat) {
  auto st = ieee33_without_ders();
  for (auto& b : st.buses) b.load_p = b.load_q = 0.0;
  const auto sol = net::power_flow(st);
  for (int b = 1; b <= 33; ++b) EXPECT_NEAR(sol.magnitude(b), 1.0, 1e-12);
}

TEST(PowerFlow, DeEnergizedIslandAtZero) {
  auto st = ieee33();
  st.find_line("L3-23")->status = net::Position::open;  // 23-25 has no DER
  const auto sol = net::power_flow(st);
  for (int b : {23, 24, 25}) {
    EXPECT_EQ(sol.magnitude(b), 0.0);
    EXPECT_FALSE(sol.islands[static_cast<std::size_t>(sol.island_assignment[b - 1])].energized);
  }
}

TEST(PowerFlow, DerIslandUsesLargestUnitAsReference) {
  auto st = ieee33();
  st.find_line("L6-7")->status = net::Position::open;
  const auto sol = net::power_flow(st);
  const auto& isl = sol.islands[static_cast<std::size_t>(sol.island_assignment[17])];  // bus 18
  EXPECT_TRUE(isl.energized);
  EXPECT_FALSE(isl.has_slack);
  EXPECT_EQ(isl.reference_bus, 18);
  EXPECT_NEAR(sol.magnitude(18), 1.0, 1e-12);
}

TEST(PowerFlow, LoopedIslandIsInternalError) {
  auto st = ieee33();
  st.switches[0].position = net::Position::closed;
  EXPECT_THROW(net::power_flow(st), RadialityError);
}

TEST(PowerFlow, EnergyBalanceSlackIsland) {
  const auto st = ieee33();
  const auto sol = net::power_flow(st);
  const auto& isl = sol.islands[0];
  EXPECT_NEAR(isl.reference_injection.real() + isl.der_injection, isl.load + isl.losses, 1e-6);
}

TEST(ServeLoads, SlackIslandServesEverything) {
  const auto st = ieee33();
  const auto rep = net::serve_loads(st, net::power_flow(st));
  EXPECT_NEAR(rep.total_served_p(), 3715.0, 1e-9);
  EXPECT_FALSE(rep.curtailed);
  EXPECT_EQ(rep.connected_buses.size(), 33u);
}

TEST(ServeLoads, DerIslandCurtailsNonCriticalFirst) {
  auto st = ieee33();
  st.find_line("L28-29")->status = net::Position::open;
  const auto rep = net::serve_loads(st, net::power_flow(st));
  EXPECT_TRUE(rep.curtailed);
  // Island 29..33: 740 kW demand, 150 kW of it critical at bus 31, DER-4 at 560 kW output.
  double island_served = 0.0;
  for (int b = 29; b <= 33; ++b) island_served += rep.served_p[static_cast<std::size_t>(b - 1)];
  EXPECT_NEAR(island_served, 560.0, 1e-9);
  EXPECT_NEAR(rep.served_p[30], 150.0, 1e-9);
  const double scale = (560.0 - 150.0) / 590.0;
  EXPECT_NEAR(rep.served_p[28], 120.0 * scale, 1e-9);
  EXPECT_NEAR(rep.served_p[32], 60.0 * scale, 1e-9);
  EXPECT_NEAR(rep.der_utilized[3], 560.0, 1e-9);
}

TEST(ServeLoads, CriticalCurtailedOnlyWhenCapacityShort) {
  auto st = ieee33();
  st.find_line("L28-29")->status = net::Position::open;
  st.find_der("DER-4")->dispatch_fraction = 0.1;  // 80 kW < 150 kW critical
  const auto rep = net::serve_loads(st, net::power_flow(st));
  EXPECT_NEAR(rep.served_p[30], 80.0, 1e-9);
  EXPECT_NEAR(rep.served_p[28], 0.0, 1e-12);
}

TEST(ServeLoads, CurtailmentFoldsIntoShed) {
  auto st = ieee33();
  st.find_line("L28-29")->status = net::Position::open;
  const auto rep = net::serve_loads(st, net::power_flow(st));
  const auto folded = net::apply_curtailment(st, rep);
  for (int b = 1; b <= 33; ++b) EXPECT_NEAR(folded.demand_p(b), rep.served_p[static_cast<std::size_t>(b - 1)], 1e-9);
  const auto again = net::serve_loads(folded, net::power_flow(folded));
  EXPECT_FALSE(again.curtailed);
}

TEST(ServeLoads, DerAvailability) {
  auto st = ieee33();
  st.find_der("DER-2")->online = false;
  const auto rep = net::serve_loads(st, net::power_flow(st));
  EXPECT_EQ(rep.der_available[1], 0.0);
  EXPECT_EQ(rep.der_available[0], 720.0);
}
