#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetflow/dispatch.hpp"
#include "fleetflow/lp.hpp"

namespace fleetflow {

/// Admissible range for the scalarization weight: gamma must stay below
/// both 1/sup|f-| (over the feasible box, safely over-estimated) and
/// 1/(alpha*(K-1)). The defaults follow gamma = 1e-5 clamped under the
/// bound.
struct GammaBound {
  double upper = kInfinity;
  double chosen = 1e-5;
};

inline GammaBound gamma_bound(const DispatchProblem& p) {
  p.validate();
  int n = p.cell_count();
  long long total_supply = 0;
  for (long long d : p.drivers) total_supply += d;
  long long total_requests = 0;
  for (const auto& r : p.requests)
    for (long long v : r) total_requests += v;

  // Box over-estimate of sup f-: every x bounded by the total supply,
  // every served count bounded by its request count.
  double cost_sum = 0;
  for (int k = 0; k < p.horizon; ++k)
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j) cost_sum += p.reposition_cost(k, i, j);
  double fminus_sup = cost_sum * static_cast<double>(total_supply) +
                      p.alpha * (p.horizon - 1) * static_cast<double>(total_requests);

  GammaBound gb;
  gb.upper = kInfinity;
  if (fminus_sup > 0) gb.upper = 1.0 / fminus_sup;
  if (p.horizon > 1) gb.upper = std::min(gb.upper, 1.0 / (p.alpha * (p.horizon - 1)));
  gb.chosen = std::min(1e-5, gb.upper / 2);
  return gb;
}

/// Maps LP column indices back to the dispatch variables.
struct DispatchLpMap {
  int cells = 0;
  int horizon = 0;
  std::vector<int> x_var;  // [k*n*n + i*n + j], -1 where L[i][j] = 0
  std::vector<int> z_var;  // [k*n + i]
  std::vector<int> d_var;  // [k*n + i], defined for k >= 1 only
};

/// Scalarized LP of the K-step dispatch problem:
///   max sum z - gamma * (sum c x + alpha sum (k-t) z)
/// with rows z <= r, the flow-balance inequality, and the mass limit,
/// all transcribed per step and cell. d_{i,k} for k > t stay explicit.
inline LinearProgram build_dispatch_lp(const DispatchProblem& p, double gamma,
                                       DispatchLpMap* map_out = nullptr) {
  p.validate();
  GammaBound gb = gamma_bound(p);
  if (!(gamma > 0) || !(gamma < gb.upper))
    throw std::invalid_argument("gamma " + std::to_string(gamma) +
                                " outside admissible range (0, " +
                                std::to_string(gb.upper) + ")");

  int n = p.cell_count();
  int K = p.horizon;
  const AdjacencyMatrix& L = p.grid->adjacency();
  LinearProgram lp;
  DispatchLpMap map;
  map.cells = n;
  map.horizon = K;
  map.x_var.assign(static_cast<size_t>(K) * n * n, -1);
  map.z_var.assign(static_cast<size_t>(K) * n, -1);
  map.d_var.assign(static_cast<size_t>(K) * n, -1);

  for (int k = 0; k < K; ++k) {
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j)
        if (L(i, j))
          map.x_var[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j] =
              lp.add_variable(-gamma * p.reposition_cost(k, i, j));
    for (CellId i = 0; i < n; ++i)
      map.z_var[static_cast<size_t>(k) * n + i] =
          lp.add_variable(1.0 - gamma * p.alpha * k);
    if (k >= 1)
      for (CellId i = 0; i < n; ++i)
        map.d_var[static_cast<size_t>(k) * n + i] = lp.add_variable(0.0);
  }

  auto xv = [&](int k, CellId i, CellId j) {
    return map.x_var[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j];
  };

  for (int k = 0; k < K; ++k) {
    for (CellId i = 0; i < n; ++i) {
      // z_{i,k} <= r_{i,k}
      auto& zrow = lp.add_row(Relation::LessEq, static_cast<double>(p.requests[k][i]));
      zrow.coeffs.push_back({map.z_var[static_cast<size_t>(k) * n + i], 1.0});

      // d_{i,k+1} <= d_{i,k} + inflow - outflow - z_{i,k}, with d at the
      // current step being data and d_{i,t+K} defined as 0.
      double rhs = k == 0 ? static_cast<double>(p.drivers[i]) : 0.0;
      auto& frow = lp.add_row(Relation::LessEq, rhs);
      if (k + 1 < K)
        frow.coeffs.push_back({map.d_var[static_cast<size_t>(k + 1) * n + i], 1.0});
      if (k >= 1)
        frow.coeffs.push_back({map.d_var[static_cast<size_t>(k) * n + i], -1.0});
      for (CellId j = 0; j < n; ++j) {
        if (j == i) continue;  // the self-loop cancels between the sums
        if (L(j, i)) frow.coeffs.push_back({xv(k, j, i), -1.0});
        if (L(i, j)) frow.coeffs.push_back({xv(k, i, j), 1.0});
      }
      frow.coeffs.push_back({map.z_var[static_cast<size_t>(k) * n + i], 1.0});

      // sum_j x_{i->j,k} <= d_{i,k}
      auto& mrow = lp.add_row(Relation::LessEq, rhs);
      for (CellId j = 0; j < n; ++j)
        if (L(i, j)) mrow.coeffs.push_back({xv(k, i, j), 1.0});
      if (k >= 1)
        mrow.coeffs.push_back({map.d_var[static_cast<size_t>(k) * n + i], -1.0});
    }
  }

  if (map_out) *map_out = std::move(map);
  return lp;
}

/// Solves the dispatch problem through the LP route. The basic solution
/// is integral (the constraint matrix is network-structured), asserted
/// within tolerance and rounded exactly.
inline DispatchSolution solve_lp_dispatch(const DispatchProblem& p,
                                          SimplexOptions opt = {},
                                          double gamma = 0.0 /* 0 = auto */) {
  GammaBound gb = gamma_bound(p);
  if (gamma <= 0.0) gamma = gb.chosen;
  DispatchLpMap map;
  LinearProgram lp = build_dispatch_lp(p, gamma, &map);
  BasicSolution bs = simplex_solve(lp, opt);
  if (bs.status != SolveStatus::Optimal)
    throw std::runtime_error("dispatch LP did not solve to optimality");

  int n = p.cell_count();
  int K = p.horizon;
  auto as_integer = [&](double v, const char* what) {
    double r = std::round(v);
    if (std::abs(v - r) > 1e-7)
      throw std::logic_error(std::string("non-integral ") + what +
                             " in basic solution: " + std::to_string(v));
    return static_cast<long long>(r);
  };

  std::vector<std::vector<long long>> raw_x(
      K, std::vector<long long>(static_cast<size_t>(n) * n, 0));
  std::vector<std::vector<long long>> served(K, std::vector<long long>(n, 0));
  for (int k = 0; k < K; ++k)
    for (CellId i = 0; i < n; ++i) {
      served[k][i] =
          as_integer(bs.values[map.z_var[static_cast<size_t>(k) * n + i]], "z value");
      for (CellId j = 0; j < n; ++j) {
        int v = map.x_var[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j];
        if (v >= 0)
          raw_x[k][static_cast<size_t>(i) * n + j] = as_integer(bs.values[v], "x value");
      }
    }
  return detail::finalize_solution(p, std::move(raw_x), std::move(served));
}

}  // namespace fleetflow
