#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetflow/lp.hpp"
#include "fleetflow/simulator.hpp"

namespace fleetflow {

/// Requests grouped by departure (cell, start step) and by destination
/// (cell, arrival step). A ride finishing after the day ends appears in
/// no destination set.
struct RequestIndexSets {
  int cells = 0;
  int steps = 0;
  std::vector<std::vector<size_t>> dep;   // [t*n + i] -> request ids
  std::vector<std::vector<size_t>> dest;  // [t*n + i] -> request ids
};

/// The driver is back online at the start of this step (same-step rides
/// still take one step).
inline int arrival_step(const RideRequest& r) { return std::max(r.end, r.start + 1); }

inline RequestIndexSets build_request_index_sets(const Scenario& sc) {
  RequestIndexSets sets;
  sets.cells = sc.cell_count();
  sets.steps = sc.steps_per_day;
  sets.dep.assign(static_cast<size_t>(sets.steps) * sets.cells, {});
  sets.dest.assign(static_cast<size_t>(sets.steps) * sets.cells, {});
  for (size_t a = 0; a < sc.requests.size(); ++a) {
    const RideRequest& r = sc.requests[a];
    sets.dep[static_cast<size_t>(r.start) * sets.cells + r.dep].push_back(a);
    int arr = arrival_step(r);
    if (arr < sets.steps)
      sets.dest[static_cast<size_t>(arr) * sets.cells + r.dest].push_back(a);
  }
  return sets;
}

/// Full-information day plan.
struct OraclePlan {
  std::vector<uint8_t> accept;                     // per request, 0/1
  std::vector<std::vector<long long>> reposition;  // T entries, x[t][i*n+j]
  double objective = 0.0;                          // gmv - reposition cost
};

struct OracleLpMap {
  int cells = 0;
  int steps = 0;
  std::vector<int> b_var;  // per request
  std::vector<int> x_var;  // [t*n*n + i*n + j], -1 where L[i][j] = 0
  std::vector<int> s_var;  // [t*n + i]
  std::vector<int> d_var;  // [t*n + i], t >= 1 only
};

/// Relaxed offline planning LP over all request tuples: acceptance
/// variables 0 <= b <= 1, repositions x, leftover drivers s, and the
/// balance/arrival/mass rows per (cell, step).
inline LinearProgram build_oracle_lp(const Scenario& sc, OracleLpMap* map_out = nullptr) {
  sc.validate();
  if (sc.allow_online_offline)
    throw std::invalid_argument("the oracle requires a fixed fleet (no on/offline events)");

  int n = sc.cell_count();
  int T = sc.steps_per_day;
  const AdjacencyMatrix& L = sc.grid->adjacency();
  RequestIndexSets sets = build_request_index_sets(sc);

  LinearProgram lp;
  OracleLpMap map;
  map.cells = n;
  map.steps = T;
  map.b_var.resize(sc.requests.size());
  map.x_var.assign(static_cast<size_t>(T) * n * n, -1);
  map.s_var.assign(static_cast<size_t>(T) * n, -1);
  map.d_var.assign(static_cast<size_t>(T) * n, -1);

  for (size_t a = 0; a < sc.requests.size(); ++a)
    map.b_var[a] = lp.add_variable(sc.requests[a].price, 1.0);
  for (int t = 0; t < T; ++t) {
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j)
        if (L(i, j))
          map.x_var[static_cast<size_t>(t) * n * n + static_cast<size_t>(i) * n + j] =
              lp.add_variable(-sc.reposition_cost(i, j));
    for (CellId i = 0; i < n; ++i) {
      map.s_var[static_cast<size_t>(t) * n + i] = lp.add_variable(0.0);
      if (t >= 1) map.d_var[static_cast<size_t>(t) * n + i] = lp.add_variable(0.0);
    }
  }

  auto xv = [&](int t, CellId i, CellId j) {
    return map.x_var[static_cast<size_t>(t) * n * n + static_cast<size_t>(i) * n + j];
  };

  for (int t = 0; t < T; ++t) {
    for (CellId i = 0; i < n; ++i) {
      // Balance: sum_a b + s = d + inflow - outflow.
      double rhs = t == 0 ? static_cast<double>(sc.initial_drivers[i]) : 0.0;
      auto& brow = lp.add_row(Relation::Equal, rhs);
      for (size_t a : sets.dep[static_cast<size_t>(t) * n + i])
        brow.coeffs.push_back({map.b_var[a], 1.0});
      brow.coeffs.push_back({map.s_var[static_cast<size_t>(t) * n + i], 1.0});
      for (CellId j = 0; j < n; ++j) {
        if (j == i) continue;  // self-loop cancels
        if (L(j, i)) brow.coeffs.push_back({xv(t, j, i), -1.0});
        if (L(i, j)) brow.coeffs.push_back({xv(t, i, j), 1.0});
      }
      if (t >= 1) brow.coeffs.push_back({map.d_var[static_cast<size_t>(t) * n + i], -1.0});

      // Arrival: d_{i,t} = s_{i,t-1} + accepted rides finishing here now.
      if (t >= 1) {
        auto& arow = lp.add_row(Relation::Equal, 0.0);
        arow.coeffs.push_back({map.d_var[static_cast<size_t>(t) * n + i], 1.0});
        arow.coeffs.push_back({map.s_var[static_cast<size_t>(t - 1) * n + i], -1.0});
        for (size_t a : sets.dest[static_cast<size_t>(t) * n + i])
          arow.coeffs.push_back({map.b_var[a], -1.0});
      }

      // Mass: sum_j x_{i->j,t} <= d_{i,t}.
      auto& mrow = lp.add_row(Relation::LessEq, rhs);
      for (CellId j = 0; j < n; ++j)
        if (L(i, j)) mrow.coeffs.push_back({xv(t, i, j), 1.0});
      if (t >= 1) mrow.coeffs.push_back({map.d_var[static_cast<size_t>(t) * n + i], -1.0});
    }
  }

  if (map_out) *map_out = std::move(map);
  return lp;
}

/// Solves the relaxed plan and asserts the acceptance vector came out
/// integral (tolerance 1e-7, then exact rounding).
inline OraclePlan solve_oracle(const Scenario& sc, SimplexOptions opt = {}) {
  OracleLpMap map;
  LinearProgram lp = build_oracle_lp(sc, &map);
  BasicSolution bs = simplex_solve(lp, opt);
  if (bs.status != SolveStatus::Optimal)
    throw std::runtime_error("oracle LP did not solve to optimality");

  auto as_integer = [&](double v, const char* what) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-7)
      throw std::logic_error(std::string("non-integral ") + what +
                             " in oracle basic solution: " + std::to_string(v));
    return static_cast<long long>(r);
  };

  int n = map.cells;
  OraclePlan plan;
  plan.accept.resize(sc.requests.size());
  for (size_t a = 0; a < sc.requests.size(); ++a)
    plan.accept[a] = static_cast<uint8_t>(as_integer(bs.values[map.b_var[a]], "b value"));
  plan.reposition.assign(map.steps,
                         std::vector<long long>(static_cast<size_t>(n) * n, 0));
  for (int t = 0; t < map.steps; ++t)
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j) {
        int v = map.x_var[static_cast<size_t>(t) * n * n + static_cast<size_t>(i) * n + j];
        if (v >= 0)
          plan.reposition[t][static_cast<size_t>(i) * n + j] =
              as_integer(bs.values[v], "x value");
      }
  plan.objective = bs.objective_value;
  return plan;
}

/// Replays the plan through the simulator: the policy applies the plan's
/// repositions and matching accepts exactly the b-selected requests.
inline Metrics replay_oracle_plan(const Scenario& sc, const OraclePlan& plan,
                                  uint64_t seed = 0) {
  DispatchPolicy policy = [&plan](const std::vector<long long>&,
                                  const std::vector<long long>&, int t) {
    return plan.reposition.at(t);
  };
  return run_day(sc, policy, seed, &plan.accept);
}

}  // namespace fleetflow
