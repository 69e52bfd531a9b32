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

// gridgame: command-line driver. Every subcommand writes its artifacts and a
// manifest.json into --out; nothing is written elsewhere.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridgame/gridgame.hpp"
#include "json.hpp"

#ifndef GRIDGAME_DEFAULT_NETWORK
#define GRIDGAME_DEFAULT_NETWORK "data/ieee33.json"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gridgame;

namespace {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) s[static_cast<std::size_t>(k)] = digits[v & 0xf];
  return s;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects inputs and outputs of one command and writes the manifest last.
class Run {
 public:
  Run(std::string command, std::vector<std::string> argv) : command_(std::move(command)), argv_(std::move(argv)) {
    started_ = utc_now();
  }

  void set_out(const std::string& dir) {
    out_ = dir;
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
  }

  std::string read_input(const std::string& path) {
    const auto text = net::read_text_file(path);
    inputs_.push_back({{"path", path}, {"fnv1a64", hex(fnv1a(text))}, {"bytes", text.size()}});
    return text;
  }

  void write(const std::string& name, const std::string& content, bool deterministic = true) {
    const auto path = out_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    f << content;
    if (!f) throw InputError("write failed: " + path.string());
    outputs_.push_back({{"file", name}, {"fnv1a64", hex(fnv1a(content))}, {"deterministic", deterministic}});
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  json config = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;

  void finish() {
    json m;
    m["artifact"] = "gridgame";
    m["artifact_version"] = kVersion;
    m["command"] = command_;
    m["argv"] = argv_;
    m["config"] = config;
    m["config_digest"] = hex(fnv1a(config.dump()));
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["warnings"] = warnings;
    m["started_at"] = started_;
    m["finished_at"] = utc_now();
    const auto path = out_ / "manifest.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    f << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::string started_;
  fs::path out_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

struct Inputs {
  std::string network = GRIDGAME_DEFAULT_NETWORK;
  std::string catalog;
  std::string ahp;
  std::string ahp_method = "eigenvector";
  std::string out = "out";
};

struct Loaded {
  net::NetworkState network;
  scenario::ScenarioCatalog catalog;
  resilience::AhpWeights weights;
};

Loaded load_inputs(Run& run, const Inputs& in) {
  Loaded l;
  l.network = net::load_network_text(run.read_input(in.network), in.network);
  if (in.catalog.empty()) {
    l.catalog = scenario::catalog_default();
  } else {
    const auto text = run.read_input(in.catalog);
    l.catalog = scenario::load_catalog(net::parse_json_text(text, in.catalog));
  }
  scenario::validate_catalog(l.catalog, l.network);
  auto a = resilience::default_comparison_matrix();
  if (!in.ahp.empty()) {
    const auto text = run.read_input(in.ahp);
    a = resilience::load_comparison_matrix(net::parse_json_text(text, in.ahp));
  }
  resilience::AhpMethod method;
  if (in.ahp_method == "eigenvector") {
    method = resilience::AhpMethod::eigenvector;
  } else if (in.ahp_method == "column_mean") {
    method = resilience::AhpMethod::column_mean;
  } else {
    throw ValidationError("unknown AHP method '" + in.ahp_method + "'");
  }
  l.weights = resilience::ahp_weights(a, method);
  if (l.weights.consistency_ratio >= 0.1) {
    run.warnings.push_back("AHP consistency ratio " + format_double(l.weights.consistency_ratio) + " is not below 0.1");
  }
  run.config["network"] = in.network;
  run.config["catalog"] = in.catalog.empty() ? l.catalog.version : in.catalog;
  run.config["ahp"] = in.ahp.empty() ? "default" : in.ahp;
  run.config["ahp_method"] = in.ahp_method;
  run.config["weights"] = l.weights.w;
  return l;
}

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--network", in.network, "network JSON")->capture_default_str();
  cmd->add_option("--catalog", in.catalog, "scenario catalog JSON (default: bundled catalog)");
  cmd->add_option("--ahp", in.ahp, "AHP comparison matrix JSON (default: bundled matrix)");
  cmd->add_option("--ahp-method", in.ahp_method, "eigenvector | column_mean")->capture_default_str();
  cmd->add_option("--out", in.out, "output directory")->capture_default_str();
}

json weights_json(const resilience::AhpWeights& w) {
  return {{"weights", {{"LSR", w.w[0]}, {"CLR", w.w[1]}, {"TSS", w.w[2]}, {"DRS", w.w[3]}}},
          {"lambda_max", w.lambda_max},
          {"consistency_index", w.consistency_index},
          {"consistency_ratio", w.consistency_ratio}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> parse_methods(const std::string& s) {
  if (s == "all") return experiments::all_methods();
  if (s == "none" || s.empty()) return {};
  return split_list(s);
}

std::string scorecards_csv(const resilience::PayoffBuild& b) {
  std::string out = "attack,defense,lsr,clr,tss,drs,score,flags\n";
  for (std::size_t i = 0; i < b.matrix.rows(); ++i) {
    for (std::size_t j = 0; j < b.matrix.cols(); ++j) {
      const auto& c = b.cards[i * b.matrix.cols() + j];
      std::string flags;
      for (const auto& f : c.flags) flags += (flags.empty() ? "" : ";") + f;
      out += b.matrix.attack_ids[i] + "," + b.matrix.defense_ids[j] + "," + format_double(c.lsr) + "," +
             format_double(c.clr) + "," + format_double(c.tss) + "," + format_double(c.drs) + "," +
             format_double(b.matrix(i, j)) + "," + flags + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_payoff(Run& run, const Inputs& in) {
  run.set_out(in.out);
  const auto l = load_inputs(run, in);
  const auto b = resilience::build_payoff_detailed(l.network, l.catalog, l.weights);
  run.write("payoff.csv", to_csv(b.matrix));
  run.write("payoff_long.csv", to_long_csv(b.matrix));
  run.write("scorecards.csv", scorecards_csv(b));
  run.write_json("weights.json", weights_json(l.weights));
  return 0;
}

struct SolveArgs {
  std::string matrix;
  std::string method = "nash";
  std::uint64_t iters = 10000;
  std::uint64_t stride = 1;
  double beta = 2.0;
  double tol = 1e-3;
  double damping = 0.5;
  std::uint64_t seed = 1;
  std::string out = "out";
};

int cmd_solve(Run& run, const SolveArgs& a) {
  run.set_out(a.out);
  const auto m = parse_matrix_csv(run.read_input(a.matrix), a.matrix);
  run.config = {{"matrix", a.matrix}, {"method", a.method}};
  json j;
  if (a.method == "nash") {
    j = game::to_json(game::nash_exact(m));
  } else if (a.method == "fictitious_play" || a.method == "fp") {
    run.config["iters"] = a.iters;
    run.config["tol"] = a.tol;
    j = game::to_json(game::nash_fictitious_play(m, a.iters, a.tol));
  } else if (a.method == "regret") {
    run.config["iters"] = a.iters;
    run.config["stride"] = a.stride;
    run.seed = a.seed;
    const auto r = game::regret_matching(m, {a.iters, a.seed, a.stride});
    j = game::to_json(r);
    run.write("trajectory.csv", game::trajectory_csv(r.trajectory));
  } else if (a.method == "stackelberg") {
    const auto s = game::stackelberg(m);
    j = {{"method", "stackelberg"},
         {"defense", m.defense_ids[s.defense]},
         {"security_level", s.security_level},
         {"attacker_response", m.attack_ids[s.attacker_response]},
         {"security_levels", s.security_levels}};
  } else if (a.method == "softmax" || a.method == "qre") {
    game::QreOptions q;
    q.beta_attacker = q.beta_defender = a.beta;
    q.damping = a.damping;
    run.config["beta"] = a.beta;
    run.config["damping"] = a.damping;
    const auto r = game::qre_fixed_point(m, q);
    j = {{"method", "qre"},
         {"beta", a.beta},
         {"attacker_probs", r.attacker.probs},
         {"defender_probs", r.defender.probs},
         {"value", game::expected_value(m, r.attacker, r.defender)},
         {"converged", r.converged},
         {"iterations", r.iterations},
         {"residual", r.residual}};
  } else {
    throw ValidationError("unknown solve method '" + a.method + "'");
  }
  j["attack_ids"] = m.attack_ids;
  j["defense_ids"] = m.defense_ids;
  run.write_json("equilibrium.json", j);
  return 0;
}

struct LearnArgs {
  std::string matrix;
  std::string mode = "multi";
  std::string config;
  std::string opponent;
  std::optional<std::uint64_t> episodes;
  std::optional<double> epsilon0, decay, gamma, alpha_param;
  std::optional<std::string> alpha;
  std::optional<std::uint64_t> seed, telemetry_every, freeze;
  std::string out = "out";
};

int cmd_learn(Run& run, const LearnArgs& a) {
  run.set_out(a.out);
  const auto m = parse_matrix_csv(run.read_input(a.matrix), a.matrix);
  marl::LearningConfig c;
  c.telemetry_every = 100;
  if (!a.config.empty()) c = marl::load_learning_config(net::parse_json_text(run.read_input(a.config), a.config), c);
  if (a.episodes) c.episodes = *a.episodes;
  if (a.epsilon0) c.epsilon0 = *a.epsilon0;
  if (a.decay) c.epsilon_decay = *a.decay;
  if (a.gamma) c.gamma = *a.gamma;
  if (a.alpha) c.alpha = marl::parse_alpha_schedule(*a.alpha, a.alpha_param.value_or(c.alpha.param));
  else if (a.alpha_param) c.alpha.param = *a.alpha_param;
  if (a.seed) c.seed = *a.seed;
  if (a.telemetry_every) c.telemetry_every = *a.telemetry_every;
  if (a.freeze) c.freeze_defender_episodes = *a.freeze;
  for (const auto& w : c.validate()) run.warnings.push_back(w);
  run.seed = c.seed;
  run.config = {{"matrix", a.matrix}, {"mode", a.mode}, {"learning", marl::to_json(c)}};

  std::vector<marl::TelemetryRow> telemetry;
  json j;
  if (a.mode == "single") {
    game::MixedStrategy opp = game::MixedStrategy::uniform(m.rows());
    if (!a.opponent.empty()) {
      opp.probs.clear();
      for (const auto& s : split_list(a.opponent)) {
        try {
          opp.probs.push_back(std::stod(s));
        } catch (const std::exception&) {
          throw ValidationError("--opponent: '" + s + "' is not a number");
        }
      }
    }
    run.config["opponent"] = opp.probs;
    const auto p = marl::train_single_agent(m, opp, c, &telemetry);
    j = {{"mode", "single"}, {"defender", marl::to_json(p, m.defense_ids, m.attack_ids)}};
  } else if (a.mode == "multi") {
    const auto r = marl::train_multi_agent(m, c, &telemetry);
    j = {{"mode", "multi"},
         {"value", r.value},
         {"converged", r.converged},
         {"tail_average_reward", r.tail_average},
         {"attacker", marl::to_json(r.attacker, m.attack_ids, m.defense_ids)},
         {"defender", marl::to_json(r.defender, m.defense_ids, m.attack_ids)}};
  } else if (a.mode == "mdp") {
    const auto mdp = marl::stage_mdp_default(m);
    const auto r = marl::mdp_train(mdp, c);
    json states = json::array();
    for (std::size_t s = 0; s < r.policies.size(); ++s) {
      const auto& p = r.policies[s];
      states.push_back({{"state", p.state},
                        {"visits", r.state_visits[s]},
                        {"attack", m.attack_ids[p.attack]},
                        {"defense", m.defense_ids[p.defense]},
                        {"attacker_mix", p.attacker_mix.probs},
                        {"defender_mix", p.defender_mix.probs},
                        {"value", p.value},
                        {"pure", p.pure}});
    }
    j = {{"mode", "mdp"}, {"states", states}};
  } else {
    throw ValidationError("unknown learn mode '" + a.mode + "'");
  }
  run.write_json("policy.json", j);
  if (a.mode != "mdp") run.write("telemetry.csv", marl::telemetry_csv(telemetry));
  return 0;
}

struct McArgs {
  std::uint64_t runs = 1000;
  std::uint64_t seed = 1;
  std::string attack_dist = "adversarial";
  double spread = 0.10;
};

void add_mc(CLI::App* cmd, McArgs& mc) {
  cmd->add_option("--runs", mc.runs, "Monte Carlo runs")->capture_default_str();
  cmd->add_option("--seed", mc.seed, "base seed")->capture_default_str();
  cmd->add_option("--attack-dist", mc.attack_dist, "uniform | equilibrium | adversarial")->capture_default_str();
  cmd->add_option("--load-spread", mc.spread, "per-bus load multiplier half-width")->capture_default_str();
}

experiments::McConfig to_mc(Run& run, const McArgs& a) {
  experiments::McConfig mc;
  mc.runs = a.runs;
  mc.seed = a.seed;
  mc.attack_distribution = experiments::parse_attack_distribution(a.attack_dist);
  mc.load_spread = a.spread;
  mc.validate();
  run.seed = a.seed;
  run.config["runs"] = a.runs;
  run.config["attack_dist"] = experiments::to_string(mc.attack_distribution);
  run.config["load_spread"] = a.spread;
  return mc;
}

json policy_json(const experiments::DefensePolicy& p, const PayoffMatrix& m) {
  json rows = json::object();
  for (std::size_t i = 0; i < m.rows(); ++i) rows[m.attack_ids[i]] = p.per_attack[i].probs;
  return {{"name", p.name}, {"defense_ids", m.defense_ids}, {"per_attack", rows}};
}

struct BaselineArgs {
  std::string kind = "SOD";
  bool evaluate = false;
};

int cmd_baseline(Run& run, const Inputs& in, const BaselineArgs& b, const McArgs& mca) {
  run.set_out(in.out);
  const auto l = load_inputs(run, in);
  const auto m = resilience::build_payoff_matrix(l.network, l.catalog, l.weights);
  const auto kind = experiments::parse_baseline(b.kind);
  run.config["kind"] = b.kind;
  const auto policy = experiments::baseline(kind, m, l.network, l.catalog);
  json j = {{"policy", policy_json(policy, m)}};
  if (kind == experiments::Baseline::RBD) {
    json table = json::array();
    for (const auto& d : experiments::rbd_rule_table(l.network, l.catalog)) {
      table.push_back({{"attack", d.attack}, {"defense", d.defense}, {"rule", d.rule}});
    }
    j["computed_rules"] = table;
    j["catalog_rules"] = l.catalog.rbd_rules;
  }
  if (b.evaluate) {
    const auto mc = to_mc(run, mca);
    const auto rep = experiments::monte_carlo(l.network, l.catalog, l.weights, m, policy, mc);
    j["stats"] = experiments::to_json(rep, m);
    run.write("runs.csv", experiments::runs_csv(rep, m));
  }
  run.write_json("baseline.json", j);
  return 0;
}

struct CompareArgs {
  std::string methods = "all";
  std::string reference;
  double beta = 20.0;
  std::uint64_t iters = 10000;
  std::optional<std::uint64_t> episodes;
  std::optional<double> epsilon0, decay;
};

int cmd_compare(Run& run, const Inputs& in, const CompareArgs& c, const McArgs& mca) {
  run.set_out(in.out);
  const auto l = load_inputs(run, in);
  experiments::CompareConfig cfg;
  cfg.mc = to_mc(run, mca);
  cfg.softmax_beta = c.beta;
  cfg.regret_iterations = c.iters;
  cfg.learning.seed = mca.seed;
  if (c.episodes) cfg.learning.episodes = *c.episodes;
  if (c.epsilon0) cfg.learning.epsilon0 = *c.epsilon0;
  if (c.decay) cfg.learning.epsilon_decay = *c.decay;
  cfg.learning.validate();
  const auto methods = parse_methods(c.methods);
  cfg.reference = experiments::resolve_reference(methods, c.reference);
  run.config["methods"] = methods;
  run.config["reference"] = cfg.reference;
  run.config["beta"] = c.beta;
  run.config["regret_iterations"] = c.iters;
  run.config["learning"] = marl::to_json(cfg.learning);

  const auto m = resilience::build_payoff_matrix(l.network, l.catalog, l.weights);
  const auto rows = experiments::compare_strategies(l.network, l.catalog, l.weights, m, methods, cfg);
  run.write("payoff.csv", to_csv(m));
  run.write("comparison.csv", experiments::comparison_csv(rows, cfg.reference));
  json stats = json::object();
  std::string runs = "method,run,attack,defense,score\n";
  for (const auto& r : rows) {
    auto s = experiments::to_json(r.report, m);
    s["improvement_pct"] = r.improvement_pct;
    s["t_stat"] = r.t_stat ? json(*r.t_stat) : json(nullptr);
    s["p_value"] = r.p_value ? json(*r.p_value) : json(nullptr);
    s["policy"] = policy_json(r.policy, m);
    stats[r.method] = s;
    for (const auto& rec : r.report.runs) {
      runs += r.method + "," + std::to_string(rec.run) + "," + m.attack_ids[rec.attack] + "," +
              m.defense_ids[rec.defense] + "," + format_double(rec.score) + "\n";
    }
  }
  run.write_json("stats.json", {{"reference", cfg.reference}, {"methods", stats}});
  run.write("runs.csv", runs);
  run.write("timing.csv", experiments::timing_csv(rows), false);
  return 0;
}

struct ProbeArgs {
  std::vector<std::string> networks;
  std::string methods = "none";
};

int cmd_probe(Run& run, const Inputs& in, const ProbeArgs& p) {
  run.set_out(in.out);
  auto l = load_inputs(run, in);
  std::vector<net::NetworkState> nets = {l.network};
  for (const auto& path : p.networks) nets.push_back(net::load_network_text(run.read_input(path), path));
  experiments::CompareConfig cfg;
  const auto methods = parse_methods(p.methods);
  run.config["methods"] = methods;
  run.config["extra_networks"] = p.networks;
  const auto rows = experiments::scalability_probe(nets, l.catalog, l.weights, methods, cfg);
  run.write("probe.csv", experiments::probe_estimates_csv(rows));
  if (!methods.empty()) run.write("probe_timing.csv", experiments::probe_timing_csv(rows), false);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridgame: attack/defense games on distribution feeders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Inputs payoff_in, baseline_in, compare_in, probe_in;
  SolveArgs solve;
  LearnArgs learn;
  BaselineArgs base;
  CompareArgs compare;
  ProbeArgs probe;
  McArgs baseline_mc, compare_mc;

  auto* payoff_cmd = app.add_subcommand("payoff", "build the attack x defense payoff matrix");
  add_inputs(payoff_cmd, payoff_in);

  auto* solve_cmd = app.add_subcommand("solve", "solve the matrix game");
  solve_cmd->add_option("--matrix", solve.matrix, "payoff matrix CSV")->required();
  solve_cmd->add_option("--method", solve.method, "nash | fictitious_play | stackelberg | regret | softmax")
      ->capture_default_str();
  solve_cmd->add_option("--iters", solve.iters, "iterations for iterative methods")->capture_default_str();
  solve_cmd->add_option("--stride", solve.stride, "trajectory sampling stride")->capture_default_str();
  solve_cmd->add_option("--beta", solve.beta, "softmax rationality")->capture_default_str();
  solve_cmd->add_option("--tol", solve.tol, "fictitious play stopping tolerance")->capture_default_str();
  solve_cmd->add_option("--damping", solve.damping, "QRE damping")->capture_default_str();
  solve_cmd->add_option("--seed", solve.seed, "seed for sampled play")->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "output directory")->capture_default_str();

  auto* learn_cmd = app.add_subcommand("learn", "train Q-learning agents on a payoff matrix");
  learn_cmd->add_option("--matrix", learn.matrix, "payoff matrix CSV")->required();
  learn_cmd->add_option("--mode", learn.mode, "single | multi | mdp")->capture_default_str();
  learn_cmd->add_option("--config", learn.config, "learning config JSON");
  learn_cmd->add_option("--opponent", learn.opponent, "comma-separated attack mix for single mode");
  learn_cmd->add_option("--iters,--episodes", learn.episodes, "training episodes");
  learn_cmd->add_option("--epsilon0", learn.epsilon0, "initial exploration rate");
  learn_cmd->add_option("--decay", learn.decay, "exploration decay per episode");
  learn_cmd->add_option("--gamma", learn.gamma, "discount (mdp mode)");
  learn_cmd->add_option("--alpha", learn.alpha, "harmonic | constant | power");
  learn_cmd->add_option("--alpha-param", learn.alpha_param, "constant value or power exponent");
  learn_cmd->add_option("--seed", learn.seed, "seed");
  learn_cmd->add_option("--telemetry-every", learn.telemetry_every, "telemetry stride (0 disables)");
  learn_cmd->add_option("--freeze-defender", learn.freeze, "leading episodes with a frozen uniform defender");
  learn_cmd->add_option("--out", learn.out, "output directory")->capture_default_str();

  auto* baseline_cmd = app.add_subcommand("baseline", "derive a baseline defense policy");
  add_inputs(baseline_cmd, baseline_in);
  baseline_cmd->add_option("--kind", base.kind, "RDS | RBD | SOD")->capture_default_str();
  baseline_cmd->add_flag("--evaluate", base.evaluate, "also run the Monte Carlo evaluation");
  add_mc(baseline_cmd, baseline_mc);

  auto* compare_cmd = app.add_subcommand("compare", "Monte Carlo comparison of defense strategies");
  add_inputs(compare_cmd, compare_in);
  add_mc(compare_cmd, compare_mc);
  compare_cmd->add_option("--methods", compare.methods, "all | comma-separated method tags")->capture_default_str();
  compare_cmd->add_option("--reference", compare.reference, "reference method for improvements");
  compare_cmd->add_option("--beta", compare.beta, "softmax rationality")->capture_default_str();
  compare_cmd->add_option("--iters", compare.iters, "regret matching iterations")->capture_default_str();
  compare_cmd->add_option("--episodes", compare.episodes, "learning episodes");
  compare_cmd->add_option("--epsilon0", compare.epsilon0, "initial exploration rate");
  compare_cmd->add_option("--decay", compare.decay, "exploration decay per episode");

  auto* probe_cmd = app.add_subcommand("probe", "state-space estimates and timing");
  add_inputs(probe_cmd, probe_in);
  probe_cmd->add_option("--extra-network", probe.networks, "additional network JSON files");
  probe_cmd->add_option("--methods", probe.methods, "none | all | comma-separated method tags")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::vector<std::string> args(argv, argv + argc);
  const auto* sub = app.get_subcommands().front();
  Run run(sub->get_name(), args);
  try {
    int rc = 0;
    if (sub == payoff_cmd) rc = cmd_payoff(run, payoff_in);
    else if (sub == solve_cmd) rc = cmd_solve(run, solve);
    else if (sub == learn_cmd) rc = cmd_learn(run, learn);
    else if (sub == baseline_cmd) rc = cmd_baseline(run, baseline_in, base, baseline_mc);
    else if (sub == compare_cmd) rc = cmd_compare(run, compare_in, compare, compare_mc);
    else if (sub == probe_cmd) rc = cmd_probe(run, probe_in, probe);
    run.finish();
    for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
    return rc;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
