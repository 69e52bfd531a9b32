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

#include <cmath>

#include "gridgame/experiments.hpp"

using namespace gridgame;
using experiments::AttackDistribution;
using game::MixedStrategy;

namespace {

struct Fixture {
  net::NetworkState net;
  scenario::ScenarioCatalog catalog;
  resilience::AhpWeights weights;
  PayoffMatrix m;
};

const Fixture& fx() {
  static const Fixture f = [] {
    Fixture x;
    x.net = net::load_network_file(std::string(GRIDGAME_DATA_DIR) + "/ieee33.json");
    x.catalog = scenario::catalog_default();
    x.weights = resilience::ahp_weights(resilience::default_comparison_matrix());
    x.m = resilience::build_payoff_matrix(x.net, x.catalog, x.weights);
    return x;
  }();
  return f;
}

experiments::McConfig small_mc(std::uint64_t runs = 200) {
  experiments::McConfig mc;
  mc.runs = runs;
  mc.seed = 11;
  return mc;
}

}  // namespace

TEST(Sod, TieBreaksToLowestIndex) {
  PayoffMatrix m{{0.9, 0.2}, {0.1, 0.8}};
  EXPECT_EQ(experiments::sod_defense(m), 0u);
}

TEST(Sod, PermutationInvariant) {
  const auto& m = fx().m;
  const std::size_t j = experiments::sod_defense(m);
  // Reverse the attack rows: the column means do not change.
  PayoffMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = 0; k < m.cols(); ++k) r(m.rows() - 1 - i, k) = m(i, k);
  }
  EXPECT_EQ(experiments::sod_defense(r), j);
  // Reverse the defense columns: the pick moves with its column.
  PayoffMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = 0; k < m.cols(); ++k) c(i, m.cols() - 1 - k) = m(i, k);
  }
  EXPECT_EQ(experiments::sod_defense(c), m.cols() - 1 - j);
}

TEST(Baselines, ParseNames) {
  EXPECT_EQ(experiments::parse_baseline("rds"), experiments::Baseline::RDS);
  EXPECT_EQ(experiments::parse_baseline("SOD"), experiments::Baseline::SOD);
  EXPECT_THROW(experiments::parse_baseline("XYZ"), ValidationError);
}

TEST(Baselines, RdsIsUniform) {
  const auto p = experiments::baseline(experiments::Baseline::RDS, fx().m, fx().net, fx().catalog);
  ASSERT_EQ(p.per_attack.size(), 10u);
  for (const auto& mix : p.per_attack) EXPECT_EQ(mix, MixedStrategy::uniform(10));
}

TEST(Rbd, DerAttackPicksDerDispatch) {
  const auto p = experiments::baseline(experiments::Baseline::RBD, fx().m, fx().net, fx().catalog);
  const std::size_t a3 = fx().catalog.attack_index("A3");
  const std::size_t j = game::argmax(p.per_attack[a3].probs);
  const auto& id = fx().catalog.defenses[j].id;
  EXPECT_TRUE(id == "D6" || id == "D7") << id;
}

TEST(Rbd, ComputedTableMatchesCatalogRules) {
  const auto table = experiments::rbd_rule_table(fx().net, fx().catalog);
  ASSERT_EQ(table.size(), fx().catalog.rbd_rules.size());
  for (const auto& d : table) {
    ASSERT_TRUE(fx().catalog.rbd_rules.count(d.attack)) << d.attack;
    EXPECT_EQ(fx().catalog.rbd_rules.at(d.attack), d.defense) << d.attack << " via " << d.rule;
  }
}

TEST(Rbd, EmptyRulesFallBackToComputedTable) {
  auto c = fx().catalog;
  c.rbd_rules.clear();
  const auto a = experiments::baseline(experiments::Baseline::RBD, fx().m, fx().net, c);
  const auto b = experiments::baseline(experiments::Baseline::RBD, fx().m, fx().net, fx().catalog);
  EXPECT_EQ(a.per_attack, b.per_attack);
}

TEST(Rbd, MissingRuleIsCatalogError) {
  auto c = fx().catalog;
  c.rbd_rules.erase("A4");
  EXPECT_THROW(experiments::baseline(experiments::Baseline::RBD, fx().m, fx().net, c), CatalogError);
}

TEST(MonteCarlo, Deterministic) {
  const auto p = experiments::baseline(experiments::Baseline::RDS, fx().m, fx().net, fx().catalog);
  auto mc = small_mc(100);
  mc.attack_distribution = AttackDistribution::uniform;
  const auto a = experiments::monte_carlo(fx().net, fx().catalog, fx().weights, fx().m, p, mc);
  mc.workers = 1;
  const auto b = experiments::monte_carlo(fx().net, fx().catalog, fx().weights, fx().m, p, mc);
  EXPECT_EQ(a.scores(), b.scores());
  EXPECT_EQ(experiments::runs_csv(a, fx().m), experiments::runs_csv(b, fx().m));
}

TEST(MonteCarlo, ZeroSpreadPurePolicyIsDegenerate) {
  const auto p = experiments::baseline(experiments::Baseline::SOD, fx().m, fx().net, fx().catalog);
  auto mc = small_mc(50);
  mc.load_spread = 0.0;
  const auto r = experiments::monte_carlo(fx().net, fx().catalog, fx().weights, fx().m, p, mc);
  EXPECT_EQ(r.summary.std_dev, 0.0);
  const std::size_t i = game::argmin(p.attack_values(fx().m));
  EXPECT_NEAR(r.summary.mean, fx().m(i, experiments::sod_defense(fx().m)), 1e-12);
  EXPECT_EQ(r.attack_counts[i], 50u);
}

TEST(MonteCarlo, ZeroSpreadScoresAreMatrixCells) {
  const auto p = experiments::baseline(experiments::Baseline::RDS, fx().m, fx().net, fx().catalog);
  auto mc = small_mc(60);
  mc.load_spread = 0.0;
  mc.attack_distribution = AttackDistribution::uniform;
  const auto r = experiments::monte_carlo(fx().net, fx().catalog, fx().weights, fx().m, p, mc);
  for (const auto& run : r.runs) EXPECT_NEAR(run.score, fx().m(run.attack, run.defense), 1e-12);
}

TEST(MonteCarlo, RejectsBadConfig) {
  const auto p = experiments::baseline(experiments::Baseline::RDS, fx().m, fx().net, fx().catalog);
  auto mc = small_mc();
  mc.runs = 0;
  EXPECT_THROW(experiments::monte_carlo(fx().net, fx().catalog, fx().weights, fx().m, p, mc), ValidationError);
  mc = small_mc();
  mc.load_spread = 1.5;
  EXPECT_THROW(experiments::monte_carlo(fx().net, fx().catalog, fx().weights, fx().m, p, mc), ValidationError);
}

TEST(AttackDistribution, ParseAliases) {
  EXPECT_EQ(experiments::parse_attack_distribution("equilibrium-mix"), AttackDistribution::equilibrium);
  EXPECT_EQ(experiments::parse_attack_distribution("adversarial-best-response"), AttackDistribution::adversarial);
  EXPECT_EQ(experiments::parse_attack_distribution("uniform"), AttackDistribution::uniform);
  EXPECT_THROW(experiments::parse_attack_distribution("random"), ValidationError);
}

TEST(Compare, SingleMethodHasZeroImprovement) {
  experiments::CompareConfig cfg;
  cfg.mc = small_mc(20);
  const auto rows = experiments::compare_strategies(fx().net, fx().catalog, fx().weights, fx().m, {"nash"}, cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].improvement_pct, 0.0);
  EXPECT_FALSE(rows[0].t_stat.has_value());
  const auto csv = experiments::comparison_csv(rows, "nash");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "method,mean,std,ci95_low,ci95_high,improvement_pct_vs_nash,t_stat,p_value");
}

TEST(Compare, UnknownMethodOrReference) {
  experiments::CompareConfig cfg;
  cfg.mc = small_mc(5);
  EXPECT_THROW(experiments::compare_strategies(fx().net, fx().catalog, fx().weights, fx().m, {"oracle"}, cfg),
               ValidationError);
  cfg.reference = "RDS";
  EXPECT_THROW(experiments::compare_strategies(fx().net, fx().catalog, fx().weights, fx().m, {"SOD"}, cfg),
               ValidationError);
}

TEST(Compare, StackelbergNotWorseThanSod) {
  experiments::CompareConfig cfg;
  cfg.mc = small_mc(300);
  const auto rows =
      experiments::compare_strategies(fx().net, fx().catalog, fx().weights, fx().m, {"SOD", "stackelberg"}, cfg);
  const auto& sod = rows[0].summary;
  const auto& st = rows[1].summary;
  EXPECT_GE(st.mean, sod.mean - 2.0 * (sod.ci95_high - sod.ci95_low));
}

TEST(Compare, CommonRandomNumbersAcrossMethods) {
  experiments::CompareConfig cfg;
  cfg.mc = small_mc(40);
  cfg.mc.attack_distribution = AttackDistribution::uniform;
  const auto rows =
      experiments::compare_strategies(fx().net, fx().catalog, fx().weights, fx().m, {"RDS", "SOD"}, cfg);
  for (std::size_t r = 0; r < 40; ++r) EXPECT_EQ(rows[0].report.runs[r].attack, rows[1].report.runs[r].attack);
  EXPECT_TRUE(rows[0].t_stat.has_value());
}

TEST(Compare, EveryMethodBuildsAPolicy) {
  experiments::CompareConfig cfg;
  cfg.learning.episodes = 2000;
  cfg.regret_iterations = 500;
  for (const auto& method : experiments::all_methods()) {
    const auto p = experiments::method_policy(method, fx().m, fx().net, fx().catalog, cfg);
    ASSERT_EQ(p.per_attack.size(), 10u) << method;
    for (const auto& mix : p.per_attack) EXPECT_TRUE(mix.valid(1e-9)) << method;
  }
}

TEST(Probe, StateEstimateAndRepeatability) {
  experiments::CompareConfig cfg;
  const auto a = experiments::scalability_probe({fx().net}, fx().catalog, fx().weights, {}, cfg);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].log2_states, 41.0);
  EXPECT_EQ(a[0].state_estimate, std::exp2(41.0));
  ASSERT_TRUE(a[0].reported_states.has_value());
  EXPECT_EQ(*a[0].reported_states, 2.1e6);
  const auto b = experiments::scalability_probe({fx().net}, fx().catalog, fx().weights, {}, cfg);
  EXPECT_EQ(experiments::probe_estimates_csv(a), experiments::probe_estimates_csv(b));
}

TEST(Probe, MethodRowsCarryTiming) {
  experiments::CompareConfig cfg;
  const auto rows = experiments::scalability_probe({fx().net}, fx().catalog, fx().weights, {"SOD", "nash"}, cfg);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].method, "SOD");
  EXPECT_GE(rows[2].wall_seconds, 0.0);
  EXPECT_GT(rows[2].peak_rss_kb, 0);
  EXPECT_TRUE(rows[2].note.empty());
}
