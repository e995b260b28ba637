// fleetflow command line: scenario generation, policy runs, parameter
// sweeps and a scenario invariant checker.
//
// Exit codes: 0 ok, 1 configuration error, 2 solver error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fleetflow/baselines.hpp"
#include "fleetflow/dispatch.hpp"
#include "fleetflow/dispatch_lp.hpp"
#include "fleetflow/io.hpp"
#include "fleetflow/oracle.hpp"
#include "fleetflow/scenario_gen.hpp"
#include "fleetflow/simulator.hpp"

namespace fs = std::filesystem;
using namespace fleetflow;

namespace {

struct RunConfig {
  std::string scenario_dir;
  std::string policy = "flowopt-lp";
  int horizon = 30;       // K
  double alpha = 100.0;
  double gamma = 0.0;     // 0 = auto (1e-5 clamped under the admissible bound)
  int cost_scale = kDefaultCostScale;
  double kappa = -1.0;    // < 0 = use the scenario's kappa
  uint64_t seed = 0;
  double driver_multiplier = 1.0;
  std::string out_dir = "out";
  bool quiet = false;
};

double solver_time_budget(int steps_per_day) {
  // A simulated step spans 86400/T seconds of day time; warn above a tenth.
  return 86400.0 / steps_per_day / 10.0;
}

struct RunArtifacts {
  Metrics metrics;
  std::ostringstream x_dump;  // "step,from,to,count" rows for planner policies
  double total_solver_seconds = 0;
  int budget_warnings = 0;
  json oracle_plan;  // only for --policy oracle
};

/// Builds the policy closure and runs one day. Planner policies solve the
/// K-step problem from the observed (d_t, r_t) with hold-over demand and
/// apply only the first step.
RunArtifacts run_policy(const Scenario& sc, const RunConfig& cfg) {
  RunArtifacts art;
  int n = sc.cell_count();
  double kappa = cfg.kappa < 0 ? sc.cost_kappa : cfg.kappa;
  double budget = solver_time_budget(sc.steps_per_day);
  art.x_dump << "step,from,to,count\n";

  auto record_x = [&art, n](int t, const std::vector<long long>& x) {
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j)
        if (x[static_cast<size_t>(i) * n + j] != 0)
          art.x_dump << t << "," << i << "," << j << ","
                     << x[static_cast<size_t>(i) * n + j] << "\n";
  };

  auto planner = [&](bool use_lp) -> DispatchPolicy {
    return [&, use_lp](const std::vector<long long>& d_t,
                       const std::vector<long long>& r_t, int t) {
      DispatchProblem p;
      p.grid = sc.grid;
      p.drivers = d_t;
      p.horizon = cfg.horizon;
      p.requests = hold_demand(r_t, cfg.horizon);
      p.alpha = cfg.alpha;
      p.cost_scale = cfg.cost_scale;
      p.set_distance_cost(kappa);

      auto t0 = std::chrono::steady_clock::now();
      DispatchSolution sol =
          use_lp ? solve_lp_dispatch(p, {}, cfg.gamma) : solve_mcmf_dispatch(p);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
      art.total_solver_seconds += secs;
      if (secs > budget) {
        ++art.budget_warnings;
        if (!cfg.quiet)
          std::cerr << "warning: step " << t << " solve took " << secs
                    << "s, above the 1/10-step budget of " << budget << "s\n";
      }
      record_x(t, sol.reposition[0]);
      return sol.reposition[0];
    };
  };

  if (cfg.policy == "flowopt-lp" || cfg.policy == "flowopt-mcmf") {
    art.metrics = run_day(sc, planner(cfg.policy == "flowopt-lp"), cfg.seed);
  } else if (cfg.policy == "prop-to-demand") {
    DispatchPolicy pol = [&](const std::vector<long long>& d,
                             const std::vector<long long>& r, int t) {
      auto x = proportional_to_demand(d, r, *sc.grid);
      record_x(t, x);
      return x;
    };
    art.metrics = run_day(sc, pol, cfg.seed);
  } else if (cfg.policy == "random-move") {
    DispatchPolicy pol = [&](const std::vector<long long>& d,
                             const std::vector<long long>&, int t) {
      auto x = random_move(d, *sc.grid);
      record_x(t, x);
      return x;
    };
    art.metrics = run_day(sc, pol, cfg.seed);
  } else if (cfg.policy == "oracle") {
    auto t0 = std::chrono::steady_clock::now();
    OraclePlan plan = solve_oracle(sc);
    art.total_solver_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (int t = 0; t < sc.steps_per_day; ++t) record_x(t, plan.reposition[t]);
    art.oracle_plan = oracle_plan_to_json(plan, sc.cell_count());
    art.metrics = replay_oracle_plan(sc, plan, cfg.seed);
  } else {
    throw CLI::ValidationError("policy", "unknown policy '" + cfg.policy + "'");
  }
  return art;
}

void write_run_outputs(const RunArtifacts& art, const RunConfig& cfg,
                       const fs::path& out) {
  fs::create_directories(out);
  json mj = metrics_to_json(art.metrics);
  mj["policy"] = cfg.policy;
  mj["seed"] = cfg.seed;
  mj["horizon"] = cfg.horizon;
  mj["solver_seconds"] = art.total_solver_seconds;
  mj["budget_warnings"] = art.budget_warnings;
  std::ofstream(out / "metrics.json") << mj.dump(2) << "\n";
  std::ofstream(out / "per_step.csv") << metrics_to_csv(art.metrics);
  std::ofstream(out / "dispatch.csv") << art.x_dump.str();
  if (!art.oracle_plan.is_null())
    std::ofstream(out / "oracle.json") << art.oracle_plan.dump(2) << "\n";
}

Scenario load_run_scenario(const RunConfig& cfg) {
  Scenario sc = load_scenario(cfg.scenario_dir);
  if (cfg.driver_multiplier != 1.0)
    sc = apply_driver_multiplier(std::move(sc), cfg.driver_multiplier);
  return sc;
}

int cmd_run(const RunConfig& cfg) {
  Scenario sc = load_run_scenario(cfg);
  RunArtifacts art = run_policy(sc, cfg);
  write_run_outputs(art, cfg, cfg.out_dir);
  if (!cfg.quiet)
    std::cout << "policy=" << cfg.policy << " gmv=" << art.metrics.gmv
              << " cost=" << art.metrics.reposition_cost
              << " relative_profit=" << art.metrics.relative_profit
              << " relative_income=" << art.metrics.relative_income << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& axis,
              const std::vector<double>& values) {
  fs::create_directories(cfg.out_dir);
  std::ostringstream table;
  table << axis << ",gmv,reposition_cost,relative_profit,relative_income,served\n";
  std::vector<double> profits;
  for (double v : values) {
    RunConfig c = cfg;
    if (axis == "K")
      c.horizon = static_cast<int>(v);
    else
      c.driver_multiplier = v;
    Scenario sc = load_run_scenario(c);
    RunArtifacts art = run_policy(sc, c);
    const Metrics& m = art.metrics;
    table << v << "," << m.gmv << "," << m.reposition_cost << "," << m.relative_profit
          << "," << m.relative_income << "," << m.served_count << "\n";
    profits.push_back(m.relative_profit);
    if (!cfg.quiet)
      std::cout << axis << "=" << v << " relative_profit=" << m.relative_profit << "\n";
  }
  std::ofstream(fs::path(cfg.out_dir) / "sweep.csv") << table.str();

  bool nondecreasing = true, nonincreasing = true;
  for (size_t i = 1; i < profits.size(); ++i) {
    if (profits[i] < profits[i - 1]) nondecreasing = false;
    if (profits[i] > profits[i - 1]) nonincreasing = false;
  }
  std::cout << "trend: relative profit is "
            << (nondecreasing   ? "non-decreasing"
                : nonincreasing ? "non-increasing"
                                : "non-monotone")
            << " along " << axis << "\n";
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  Scenario sc = load_run_scenario(cfg);
  sc.validate();
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << " " << name << "\n";
    if (!ok) ++failures;
  };

  // Fleet conservation under a moving policy when the fleet is fixed.
  if (!sc.allow_online_offline) {
    long long fleet = 0;
    for (long long d : sc.initial_drivers) fleet += d;
    bool ok = true;
    long long lost_forever = 0;  // rides ending after the day keep the driver
    SimState state;
    int n = sc.cell_count();
    std::vector<std::vector<std::vector<size_t>>> by_step(
        sc.steps_per_day, std::vector<std::vector<size_t>>(n));
    for (size_t id = 0; id < sc.requests.size(); ++id)
      by_step[sc.requests[id].start][sc.requests[id].dep].push_back(id);
    state.idle = sc.initial_drivers;
    state.in_transit.assign(sc.steps_per_day + 1, std::vector<long long>(n, 0));
    state.rng.seed(cfg.seed);
    for (int t = 0; t < sc.steps_per_day; ++t) {
      StepReport rep = step(state, sc, random_move(state.idle, *sc.grid), by_step[t]);
      for (size_t id : rep.matched_request_ids)
        if (arrival_step(sc.requests[id]) > sc.steps_per_day) ++lost_forever;
      long long idle = 0;
      for (long long d : state.idle) idle += d;
      if (idle + state.in_transit_total() + lost_forever != fleet) ok = false;
    }
    check("driver conservation (idle + in-transit constant)", ok);
  }

  // Determinism: two identical runs agree bit for bit.
  {
    auto pol = [&](const std::vector<long long>& d, const std::vector<long long>& r,
                   int) { return proportional_to_demand(d, r, *sc.grid); };
    Metrics a = run_day(sc, pol, cfg.seed);
    Metrics b = run_day(sc, pol, cfg.seed);
    check("determinism (same seed, identical metrics)",
          a.gmv == b.gmv && a.reposition_cost == b.reposition_cost &&
              a.served_count == b.served_count);
  }

  // Requests within bounds was already enforced by validate(); report it.
  check("scenario structure (validate())", true);

  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fleetflow: hex-grid fleet dispatch planner and day simulator"};
  app.require_subcommand(1);

  // ---- gen ----
  ScenarioGenSpec spec;
  std::string gen_out = "scenario";
  uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "generate a synthetic day scenario");
  gen->add_option("--out", gen_out, "output scenario directory");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--radius", spec.grid_radius, "hex patch radius");
  gen->add_option("--steps", spec.steps_per_day, "steps per day (T)");
  gen->add_option("--demand-rate", spec.demand_rate, "mean requests per cell-step");
  gen->add_option("--center-bias", spec.center_bias, "spatial concentration in [0,1]");
  gen->add_flag("!--no-rush", spec.rush_hours, "disable rush-hour demand peaks");
  gen->add_option("--price-base", spec.price_base, "flag-fall price");
  gen->add_option("--price-per-hop", spec.price_per_hop, "price per trip hex hop");
  gen->add_option("--drivers", spec.total_drivers, "fleet size");
  gen->add_option("--kappa", spec.cost_kappa, "reposition cost per hex hop");
  gen->add_option("--online-rate", spec.online_rate, "drivers going online per cell-step");
  gen->add_option("--offline-rate", spec.offline_rate,
                  "drivers going offline per cell-step");

  // ---- shared run options ----
  RunConfig cfg;
  std::string config_path;
  auto add_run_options = [&](CLI::App* c) {
    c->add_option("--scenario", cfg.scenario_dir, "scenario directory")->required();
    c->add_option("--policy", cfg.policy,
                  "flowopt-lp | flowopt-mcmf | oracle | prop-to-demand | random-move");
    c->add_option("-K,--horizon", cfg.horizon, "prediction horizon K");
    c->add_option("--alpha", cfg.alpha, "delay penalty");
    c->add_option("--gamma", cfg.gamma, "scalarization weight (0 = auto)");
    c->add_option("--cost-scale", cfg.cost_scale, "integer cost scaling factor");
    c->add_option("--kappa", cfg.kappa, "override reposition cost per hop");
    c->add_option("--seed", cfg.seed, "simulation seed");
    c->add_option("--driver-multiplier", cfg.driver_multiplier, "fleet scaling in (0,1]");
    c->add_option("--out", cfg.out_dir, "output directory");
    c->add_option("--config", config_path, "JSON config file; flags override");
    c->add_flag("--quiet", cfg.quiet, "suppress progress output");
  };

  auto* run = app.add_subcommand("run", "run one policy over a scenario");
  add_run_options(run);

  auto* sweep = app.add_subcommand("sweep", "sweep K or the driver multiplier");
  std::string axis = "K";
  std::vector<double> values;
  add_run_options(sweep);
  sweep->add_option("--axis", axis, "K | driver_multiplier")
      ->check(CLI::IsMember({"K", "driver_multiplier"}));
  sweep->add_option("--values", values, "axis values (space- or comma-separated)")
      ->required()
      ->delimiter(',');

  auto* validate = app.add_subcommand("validate", "invariant suite over a scenario");
  add_run_options(validate);

  // JSON config file: applied before flag parsing so flags win.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    try {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config " + config_path);
      json j = json::parse(in);
      cfg.scenario_dir = j.value("scenario", cfg.scenario_dir);
      cfg.policy = j.value("policy", cfg.policy);
      cfg.horizon = j.value("horizon", cfg.horizon);
      cfg.alpha = j.value("alpha", cfg.alpha);
      cfg.gamma = j.value("gamma", cfg.gamma);
      cfg.cost_scale = j.value("cost_scale", cfg.cost_scale);
      cfg.kappa = j.value("kappa", cfg.kappa);
      cfg.seed = j.value("seed", cfg.seed);
      cfg.driver_multiplier = j.value("driver_multiplier", cfg.driver_multiplier);
      cfg.out_dir = j.value("out", cfg.out_dir);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Scenario sc = generate_scenario(spec, gen_seed);
      save_scenario(sc, gen_out);
      std::cout << "wrote " << gen_out << ": " << sc.cell_count() << " cells, "
                << sc.requests.size() << " requests, T=" << sc.steps_per_day << "\n";
      return 0;
    }
    if (run->parsed()) return cmd_run(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, axis, values);
    if (validate->parsed()) return cmd_validate(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
