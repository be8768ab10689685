// Command-line front end: exact equilibrium values, Stackelberg commitments,
// metagame stability checks, repeated-play simulation, and the built-in
// reproduction suites.
//
// Exit codes: 0 success, 1 reproduction-check failure, 2 usage/IO error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gamelab/harness.hpp"

namespace {

using namespace gamelab;

Game load_cli_game(const std::string& source, const std::string& eps, std::uint64_t eps_seed) {
  Game g = resolve_game(source);
  if (!eps.empty()) g = perturb(g, Rational::parse(eps), eps_seed);
  return g;
}

std::string render(const Rational& v) {
  return v.str() + " (" + std::to_string(v.to_double()) + ")";
}

int cmd_values(const std::string& source, const std::string& eps, std::uint64_t eps_seed,
               const std::string& pairs, const std::string& player, bool min_sense) {
  Game g = load_cli_game(source, eps, eps_seed);
  Player target = player == "B" ? Player::B : Player::A;
  for (const auto& pair : [&] {
         std::vector<std::string> out;
         std::string cur;
         for (char c : pairs) {
           if (c == ',') {
             out.push_back(cur);
             cur.clear();
           } else {
             cur.push_back(c);
           }
         }
         out.push_back(cur);
         return out;
       }()) {
    auto colon = pair.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--pairs expects devA:devB entries");
    EquilibriumQuery q;
    q.game = g;
    q.dev_a = make_deviation_set(g, Player::A, deviation_kind_from_string(pair.substr(0, colon)));
    q.dev_b = make_deviation_set(g, Player::B, deviation_kind_from_string(pair.substr(colon + 1)));
    q.target = target;
    q.sense = min_sense ? LpSense::minimize : LpSense::maximize;
    ValueResult v = equilibrium_value(q);
    std::cout << (min_sense ? "MinVal" : "Val") << "_" << to_string(target) << "("
              << pair << ") = " << render(v.value) << "\n";
  }
  return 0;
}

int cmd_stackelberg(const std::string& source, const std::string& eps, std::uint64_t eps_seed,
                    const std::string& leader) {
  Game g = load_cli_game(source, eps, eps_seed);
  Player lead = leader == "B" ? Player::B : Player::A;
  StackelbergResult st = stackelberg(g, lead);
  std::cout << "Stack_" << to_string(lead) << " = " << render(st.value) << "\n";
  std::cout << "leader mixed:";
  for (const auto& v : st.leader_mixed) std::cout << ' ' << v.str();
  std::cout << "\nfollower action: "
            << g.label(opponent_of(lead), st.follower_action) << "\n";
  for (size_t b = 0; b < st.per_follower_values.size(); ++b) {
    std::cout << "  induce " << g.label(opponent_of(lead), static_cast<int>(b)) << ": ";
    if (st.per_follower_values[b]) {
      std::cout << render(*st.per_follower_values[b]) << "\n";
    } else {
      std::cout << "not inducible\n";
    }
  }
  return 0;
}

int cmd_metagame(const std::string& source, const std::string& eps, std::uint64_t eps_seed) {
  Game g = load_cli_game(source, eps, eps_seed);
  MetagameReport rep = metagame_check(g);
  std::cout << "Stack_A = " << render(rep.stack_a) << "\nStack_B = " << render(rep.stack_b)
            << "\n";
  if (!rep.assumption_ok)
    std::cout << "warning: unique-inducibility condition fails; interpretation is weaker\n";
  std::cout << "exists_pair (some CE attains both Stackelberg values): "
            << (rep.exists_pair ? "true" : "false") << "\n";
  std::cout << "all_pairs (every CE attains both): " << (rep.all_pairs ? "true" : "false")
            << "\n";
  if (rep.witness) std::cout << "witness: " << joint_distribution_to_json(*rep.witness).dump()
                             << "\n";
  return 0;
}

int cmd_dominated(const std::string& source, const std::string& eps, std::uint64_t eps_seed,
                  const std::string& player) {
  Game g = load_cli_game(source, eps, eps_seed);
  Player p = player == "A" ? Player::A : Player::B;
  auto dom = dominated_actions(g, p);
  std::cout << "D(G) for player " << to_string(p) << ":";
  if (dom.empty()) std::cout << " (empty)";
  for (int k : dom) std::cout << ' ' << g.label(p, k);
  std::cout << "\n";
  return 0;
}

int cmd_perturb(const std::string& source, const std::string& eps, std::uint64_t seed,
                const std::string& out_path) {
  Game g = resolve_game(source);
  Game out = perturb(g, Rational::parse(eps.empty() ? "1/100" : eps), seed);
  if (out_path.empty()) {
    std::cout << game_to_json(out).dump(2) << "\n";
  } else {
    save_game(out, out_path);
    std::cout << "wrote " << out_path << " (hash " << game_hash(out) << ")\n";
  }
  return 0;
}

int cmd_simulate(ExperimentSpec spec) {
  auto reports = run_repetitions(spec);
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : reports) all.push_back(r.to_json());
  nlohmann::json doc;
  doc["spec"] = spec.to_json();
  doc["game_hash"] = reports.front().game_hash;
  doc["runs"] = std::move(all);
  if (!spec.report_path.empty()) {
    std::ofstream os(spec.report_path);
    if (!os) throw std::runtime_error("cannot open report path " + spec.report_path);
    os << doc.dump(2) << "\n";
  }
  const auto& first = reports.front();
  std::cout << "avg reward A " << first.avg_reward_a << ", B " << first.avg_reward_b << "\n";
  for (const auto& r : first.regrets)
    std::cout << "regret " << to_string(r.player) << " " << to_string(r.kind) << ": "
              << r.value << "\n";
  std::cout << "eq violation (ext,ext) " << first.eq_violation_ee << ", (int,int) "
            << first.eq_violation_ii << "\n";
  if (!first.protocol.is_null()) std::cout << "protocol: " << first.protocol.dump() << "\n";
  if (reports.size() > 1) std::cout << reports.size() << " repetitions run\n";
  return 0;
}

int cmd_reproduce(const std::string& name) {
  std::vector<std::string> names;
  if (name == "all") {
    names = reproduction_names();
  } else {
    names.push_back(name);
  }
  bool all_pass = true;
  for (const auto& n : names) {
    ReproResult res = reproduce(n);
    all_pass = all_pass && res.pass;
    std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << res.name << " (" << res.seconds
              << "s)\n";
    for (const auto& line : res.lines) std::cout << line << "\n";
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated-game equilibrium laboratory"};
  app.require_subcommand(1);

  std::string game = "builtin:g1", eps, player = "A", pairs, leader = "A", out_path;
  std::uint64_t eps_seed = 0;
  bool min_sense = false;

  auto add_game_flags = [&](CLI::App* cmd) {
    cmd->add_option("--game", game, "builtin:<name> | file:<path> | family:<M>:<j,..> | random:<MxN>:<seed>");
    cmd->add_option("--perturb", eps, "perturbation magnitude (exact rational)");
    cmd->add_option("--perturb-seed", eps_seed, "perturbation seed");
  };

  auto* values = app.add_subcommand("values", "equilibrium values over deviation-set pairs");
  add_game_flags(values);
  values->add_option("--pairs", pairs, "comma list of devA:devB")->required();
  values->add_option("--player", player, "target player (A|B)");
  values->add_flag("--min", min_sense, "minimize instead of maximize");

  auto* stack = app.add_subcommand("stackelberg", "Stackelberg value and commitment");
  add_game_flags(stack);
  stack->add_option("--leader", leader, "leader (A|B)");

  auto* meta = app.add_subcommand("metagame", "no-swap-play stability report");
  add_game_flags(meta);

  auto* dom = app.add_subcommand("dominated", "actions that are never a best response");
  add_game_flags(dom);
  std::string dom_player = "B";
  dom->add_option("--player", dom_player, "player (A|B)");

  auto* pert = app.add_subcommand("perturb", "emit a perturbed copy of a game");
  pert->add_option("--game", game, "game source");
  std::string pert_eps = "1/100";
  std::uint64_t pert_seed = 1;
  pert->add_option("--eps", pert_eps, "magnitude (exact rational)");
  pert->add_option("--seed", pert_seed, "seed");
  pert->add_option("-o,--out", out_path, "output path (default: stdout)");

  auto* sim = app.add_subcommand("simulate", "repeated play between learners/protocols");
  ExperimentSpec spec;
  std::string spec_path, mode = "expected";
  sim->add_option("--spec", spec_path, "experiment spec JSON (flags override)");
  auto* og = sim->add_option("--game", game, "game source");
  auto* oe = sim->add_option("--perturb", eps, "perturbation magnitude");
  auto* os_ = sim->add_option("--perturb-seed", eps_seed, "perturbation seed");
  auto* oa = sim->add_option("--learner-a", spec.learner_a, "player A spec");
  auto* ob = sim->add_option("--learner-b", spec.learner_b, "player B spec");
  auto* op = sim->add_option("--pair", spec.pair, "paired protocol (exploit_noregret)");
  auto* ot = sim->add_option("-T,--rounds", spec.rounds, "horizon");
  auto* om = sim->add_option("--mode", mode, "expected | sampled");
  auto* osd = sim->add_option("--seed", spec.seed, "base seed");
  auto* orp = sim->add_option("--reps", spec.repetitions, "repetitions (fan out over workers)");
  auto* otr = sim->add_option("--trace", spec.trace_path, "trajectory CSV path");
  auto* ore = sim->add_option("--report", spec.report_path, "report JSON path");

  auto* rep = app.add_subcommand("reproduce", "run a named reproduction suite");
  std::string suite;
  rep->add_option("name", suite, "suite name or 'all'")->required();

  try {
    app.parse(argc, argv);
    if (values->parsed()) return cmd_values(game, eps, eps_seed, pairs, player, min_sense);
    if (stack->parsed()) return cmd_stackelberg(game, eps, eps_seed, leader);
    if (meta->parsed()) return cmd_metagame(game, eps, eps_seed);
    if (dom->parsed()) return cmd_dominated(game, eps, eps_seed, dom_player);
    if (pert->parsed()) return cmd_perturb(game, pert_eps, pert_seed, out_path);
    if (sim->parsed()) {
      if (!spec_path.empty()) {
        std::ifstream is(spec_path);
        if (!is) throw std::runtime_error("cannot open spec " + spec_path);
        nlohmann::json j;
        is >> j;
        ExperimentSpec base = ExperimentSpec::from_json(j);
        // Flags given on the command line win over the file.
        if (og->count()) base.game = game; else game = base.game;
        if (oe->count()) base.perturb_eps = eps;
        if (os_->count()) base.perturb_seed = eps_seed;
        if (oa->count()) base.learner_a = spec.learner_a;
        if (ob->count()) base.learner_b = spec.learner_b;
        if (op->count()) base.pair = spec.pair;
        if (ot->count()) base.rounds = spec.rounds;
        if (om->count()) base.mode = play_mode_from_string(mode);
        if (osd->count()) base.seed = spec.seed;
        if (orp->count()) base.repetitions = spec.repetitions;
        if (otr->count()) base.trace_path = spec.trace_path;
        if (ore->count()) base.report_path = spec.report_path;
        spec = base;
      } else {
        spec.game = game;
        spec.perturb_eps = eps;
        spec.perturb_seed = eps_seed;
        spec.mode = play_mode_from_string(mode);
      }
      return cmd_simulate(spec);
    }
    if (rep->parsed()) return cmd_reproduce(suite);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
