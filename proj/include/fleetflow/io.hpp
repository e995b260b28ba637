#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fleetflow/dispatch.hpp"
#include "fleetflow/grid.hpp"
#include "fleetflow/oracle.hpp"
#include "fleetflow/simulator.hpp"

namespace fleetflow {

using nlohmann::json;

// ---- grid: {"radius": R, "blocked": [[q, r], ...]} ----

inline json grid_to_json(const HexGrid& grid) {
  json blocked = json::array();
  // Reconstruct the blocked set as the patch cells absent from the grid.
  for (int r = -grid.radius(); r <= grid.radius(); ++r)
    for (int q = -grid.radius(); q <= grid.radius(); ++q) {
      AxialCoord c{q, r};
      if (hex_distance(c, {0, 0}) > grid.radius()) continue;
      if (!grid.find_cell(c)) blocked.push_back({c.q, c.r});
    }
  return json{{"radius", grid.radius()}, {"blocked", blocked}};
}

inline HexGrid grid_from_json(const json& j) {
  std::set<AxialCoord> blocked;
  if (j.contains("blocked"))
    for (const auto& b : j.at("blocked"))
      blocked.insert({b.at(0).get<int>(), b.at(1).get<int>()});
  return build_hex_grid(j.at("radius").get<int>(), blocked);
}

/// Cells CSV: "index,q,r" with header row.
inline std::string cells_to_csv(const HexGrid& grid) {
  std::ostringstream os;
  os << "index,q,r\n";
  for (CellId i = 0; i < grid.size(); ++i)
    os << i << "," << grid.coord(i).q << "," << grid.coord(i).r << "\n";
  return os.str();
}

// ---- requests CSV: "dep,dest,start,end,price" ----

inline std::string requests_to_csv(const std::vector<RideRequest>& requests) {
  std::ostringstream os;
  os << "dep,dest,start,end,price\n";
  for (const RideRequest& r : requests)
    os << r.dep << "," << r.dest << "," << r.start << "," << r.end << "," << r.price
       << "\n";
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace detail

inline std::vector<RideRequest> requests_from_csv(std::istream& in) {
  std::vector<RideRequest> out;
  std::string line;
  if (!std::getline(in, line) || line.rfind("dep,dest,start,end,price", 0) != 0)
    throw std::invalid_argument("requests CSV must start with the documented header");
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 5)
      throw std::invalid_argument("requests CSV line " + std::to_string(lineno) +
                                  ": expected 5 fields");
    RideRequest r;
    r.dep = std::stoi(f[0]);
    r.dest = std::stoi(f[1]);
    r.start = std::stoi(f[2]);
    r.end = std::stoi(f[3]);
    r.price = std::stod(f[4]);
    out.push_back(r);
  }
  return out;
}

// ---- driver events CSV: "cell,step,delta" (positive online, negative offline) ----

inline std::string events_to_csv(const Scenario& sc) {
  std::ostringstream os;
  os << "cell,step,delta\n";
  int n = sc.cell_count();
  for (int t = 0; t < sc.steps_per_day; ++t)
    for (CellId i = 0; i < n; ++i) {
      if (!sc.online_events.empty() && sc.online_events[t][i] != 0)
        os << i << "," << t << "," << sc.online_events[t][i] << "\n";
      if (!sc.offline_events.empty() && sc.offline_events[t][i] != 0)
        os << i << "," << t << "," << -sc.offline_events[t][i] << "\n";
    }
  return os.str();
}

/// Fills the scenario's event tables from the CSV stream.
inline void events_from_csv(std::istream& in, Scenario& sc) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("cell,step,delta", 0) != 0)
    throw std::invalid_argument("events CSV must start with the documented header");
  int n = sc.cell_count();
  sc.online_events.assign(sc.steps_per_day, std::vector<long long>(n, 0));
  sc.offline_events.assign(sc.steps_per_day, std::vector<long long>(n, 0));
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 3)
      throw std::invalid_argument("events CSV line " + std::to_string(lineno) +
                                  ": expected 3 fields");
    int cell = std::stoi(f[0]);
    int step = std::stoi(f[1]);
    long long delta = std::stoll(f[2]);
    if (cell < 0 || cell >= n || step < 0 || step >= sc.steps_per_day)
      throw std::invalid_argument("events CSV line " + std::to_string(lineno) +
                                  ": cell or step out of range");
    if (delta >= 0)
      sc.online_events[step][cell] += delta;
    else
      sc.offline_events[step][cell] += -delta;
  }
}

// ---- scenario directory: scenario.json + requests.csv [+ events.csv] ----

inline void save_scenario(const Scenario& sc, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json j{{"grid", grid_to_json(*sc.grid)},
         {"steps_per_day", sc.steps_per_day},
         {"cost_kappa", sc.cost_kappa},
         {"allow_online_offline", sc.allow_online_offline},
         {"driver_multiplier", sc.driver_multiplier},
         {"initial_drivers", sc.initial_drivers}};
  std::ofstream(dir / "scenario.json") << j.dump(2) << "\n";
  std::ofstream(dir / "requests.csv") << requests_to_csv(sc.requests);
  std::ofstream(dir / "cells.csv") << cells_to_csv(*sc.grid);
  if (sc.allow_online_offline)
    std::ofstream(dir / "events.csv") << events_to_csv(sc);
}

inline Scenario load_scenario(const std::filesystem::path& dir) {
  std::ifstream sj(dir / "scenario.json");
  if (!sj) throw std::invalid_argument("cannot open " + (dir / "scenario.json").string());
  json j = json::parse(sj);

  Scenario sc;
  sc.grid = std::make_shared<HexGrid>(grid_from_json(j.at("grid")));
  sc.steps_per_day = j.at("steps_per_day").get<int>();
  sc.cost_kappa = j.at("cost_kappa").get<double>();
  sc.allow_online_offline = j.value("allow_online_offline", false);
  sc.driver_multiplier = j.value("driver_multiplier", 1.0);
  sc.initial_drivers = j.at("initial_drivers").get<std::vector<long long>>();

  std::ifstream rq(dir / "requests.csv");
  if (!rq) throw std::invalid_argument("cannot open " + (dir / "requests.csv").string());
  sc.requests = requests_from_csv(rq);

  if (sc.allow_online_offline) {
    std::ifstream ev(dir / "events.csv");
    if (ev) events_from_csv(ev, sc);
  }
  sc.validate();
  return sc;
}

// ---- dispatch problem / solution ----

inline json dispatch_problem_to_json(const DispatchProblem& p) {
  int n = p.cell_count();
  json cost = json::array();
  for (int k = 0; k < p.horizon; ++k)
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j)
        if (p.reposition_cost(k, i, j) != 0)
          cost.push_back({k, i, j, p.reposition_cost(k, i, j)});
  return json{{"grid", grid_to_json(*p.grid)}, {"n", n},
              {"d", p.drivers},             {"r", p.requests},
              {"c", cost},                  {"K", p.horizon},
              {"alpha", p.alpha},           {"cost_scale", p.cost_scale}};
}

inline DispatchProblem dispatch_problem_from_json(const json& j) {
  DispatchProblem p;
  p.grid = std::make_shared<HexGrid>(grid_from_json(j.at("grid")));
  p.drivers = j.at("d").get<std::vector<long long>>();
  p.requests = j.at("r").get<std::vector<std::vector<long long>>>();
  p.horizon = j.at("K").get<int>();
  p.alpha = j.at("alpha").get<double>();
  p.cost_scale = j.value("cost_scale", kDefaultCostScale);
  int n = p.cell_count();
  p.cost.assign(static_cast<size_t>(p.horizon) * n * n, 0.0);
  for (const auto& t : j.at("c"))
    p.cost[t.at(0).get<size_t>() * n * n + t.at(1).get<size_t>() * n +
           t.at(2).get<size_t>()] = t.at(3).get<double>();
  p.validate();
  return p;
}

inline json dispatch_solution_to_json(const DispatchSolution& sol, int cells) {
  json x = json::array();
  for (size_t k = 0; k < sol.reposition.size(); ++k)
    for (CellId i = 0; i < cells; ++i)
      for (CellId j = 0; j < cells; ++j) {
        long long v = sol.reposition[k][static_cast<size_t>(i) * cells + j];
        if (v != 0) x.push_back({k, i, j, v});
      }
  return json{{"x", x},
              {"served", sol.served},
              {"objective_plus", sol.objective_plus},
              {"objective_minus", sol.objective_minus}};
}

// ---- metrics ----

inline json metrics_to_json(const Metrics& m) {
  return json{{"gmv", m.gmv},
              {"reposition_cost", m.reposition_cost},
              {"max_gmv", m.max_gmv},
              {"served_count", m.served_count},
              {"relative_profit", m.relative_profit},
              {"relative_income", m.relative_income}};
}

/// Per-step CSV: "step,gmv,reposition_cost,served" with header row.
inline std::string metrics_to_csv(const Metrics& m) {
  std::ostringstream os;
  os << "step,gmv,reposition_cost,served\n";
  for (size_t t = 0; t < m.per_step.size(); ++t)
    os << t << "," << m.per_step[t].gmv << "," << m.per_step[t].reposition_cost << ","
       << m.per_step[t].served << "\n";
  return os.str();
}

// ---- oracle plan: {"accepted": [...], "x": [[t,i,j,v],...], "objective": o} ----

inline json oracle_plan_to_json(const OraclePlan& plan, int cells) {
  json accepted = json::array();
  for (size_t a = 0; a < plan.accept.size(); ++a)
    if (plan.accept[a]) accepted.push_back(a);
  json x = json::array();
  for (size_t t = 0; t < plan.reposition.size(); ++t)
    for (CellId i = 0; i < cells; ++i)
      for (CellId j = 0; j < cells; ++j) {
        long long v = plan.reposition[t][static_cast<size_t>(i) * cells + j];
        if (v != 0) x.push_back({t, i, j, v});
      }
  return json{{"accepted", accepted}, {"x", x}, {"objective", plan.objective}};
}

}  // namespace fleetflow
