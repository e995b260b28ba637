#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetflow/flownet.hpp"
#include "fleetflow/grid.hpp"

namespace fleetflow {

/// Default factor for scaling real-valued reposition costs to the integer
/// costs used by the flow solver.
inline constexpr int kDefaultCostScale = 100;

inline CostUnit scaled_cost(double c, int scale) {
  return static_cast<CostUnit>(std::llround(c * scale));
}

/// One receding-horizon dispatch instance: current drivers, K steps of
/// (held or forecast) demand, reposition costs and the delay penalty.
struct DispatchProblem {
  std::shared_ptr<const HexGrid> grid;
  std::vector<long long> drivers;                 // d_t, size n
  std::vector<std::vector<long long>> requests;   // K vectors of size n
  std::vector<double> cost;                       // c[k*n*n + i*n + j], 0 where L[i][j]=0
  int horizon = 1;                                // K
  double alpha = 100.0;
  int cost_scale = kDefaultCostScale;

  int cell_count() const { return grid->size(); }

  double reposition_cost(int k, CellId i, CellId j) const {
    size_t n = static_cast<size_t>(cell_count());
    return cost[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j];
  }

  /// Fills the cost tensor with kappa * hex hop distance for adjacent
  /// pairs, constant over the horizon.
  void set_distance_cost(double kappa) {
    int n = cell_count();
    cost.assign(static_cast<size_t>(horizon) * n * n, 0.0);
    const AdjacencyMatrix& L = grid->adjacency();
    for (int k = 0; k < horizon; ++k)
      for (CellId i = 0; i < n; ++i)
        for (CellId j = 0; j < n; ++j)
          if (L(i, j) && i != j)
            cost[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j] =
                kappa * hex_distance(grid->coord(i), grid->coord(j));
  }

  void validate() const {
    int n = cell_count();
    if (horizon < 1) throw std::invalid_argument("horizon K must be >= 1");
    if (alpha <= 0) throw std::invalid_argument("alpha must be > 0");
    if (static_cast<int>(drivers.size()) != n)
      throw std::invalid_argument("driver vector size mismatch");
    if (static_cast<int>(requests.size()) != horizon)
      throw std::invalid_argument("request vectors must cover the horizon");
    for (const auto& r : requests)
      if (static_cast<int>(r.size()) != n)
        throw std::invalid_argument("request vector size mismatch");
    if (cost.size() != static_cast<size_t>(horizon) * n * n)
      throw std::invalid_argument("cost tensor size mismatch");
    // The delay penalty must stay strictly positive after integer cost
    // scaling, otherwise deferring service becomes free in the network.
    if (scaled_cost(alpha, cost_scale) < 1)
      throw std::invalid_argument("alpha * cost_scale must round to >= 1");
  }
};

struct DispatchSolution {
  std::vector<std::vector<long long>> reposition;  // K entries, x[k][i*n + j]
  std::vector<std::vector<long long>> served;      // K x n, g_{i,k}
  long long objective_plus = 0;                    // f+
  double objective_minus = 0.0;                    // f- in real cost units
};

/// Flow network over per-step copies V_{i,k}, W_{i,k} plus source/sink,
/// with index maps back to (cell, step).
struct TimeExpandedNetwork {
  FlowNetwork net;
  int cells = 0;
  int horizon = 0;
  std::vector<int> supply_edge;  // i -> edge S -> V_{i,0}
  std::vector<int> move_edge;    // [k*n*n + i*n + j] -> edge, -1 if absent
  std::vector<int> carry_edge;   // [k*n + i] -> W_{i,k} -> V_{i,k+1}, -1 at last step
  std::vector<int> sink_edge;    // [k*n + i] -> W_{i,k} -> T

  VertexId v_vertex(CellId i, int k) const { return 2 + k * 2 * cells + i; }
  VertexId w_vertex(CellId i, int k) const { return 2 + k * 2 * cells + cells + i; }
};

/// Served requests in one cell after repositioning: the driver count
/// cannot go negative, and service is limited by both supply and demand.
inline long long served_count(long long d_i, long long inflow, long long outflow,
                              long long r_i) {
  long long avail = d_i + inflow - outflow;
  if (avail < 0)
    throw std::invalid_argument("negative post-movement driver count (" +
                                std::to_string(avail) + ")");
  return std::min(avail, r_i);
}

/// Hold-over demand forecast: the current request vector repeated K times.
inline std::vector<std::vector<long long>> hold_demand(
    const std::vector<long long>& r_t, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon K must be >= 1");
  return std::vector<std::vector<long long>>(static_cast<size_t>(horizon), r_t);
}

/// S -> V_i (cap d_i), V_i -> W_j (uncapacitated, cost c_ij) where
/// L[i][j] = 1, W_j -> T (cap r_j).
inline TimeExpandedNetwork build_single_step_network(const DispatchProblem& p) {
  p.validate();
  if (p.horizon != 1)
    throw std::invalid_argument("single-step network requires K = 1");
  int n = p.cell_count();
  const AdjacencyMatrix& L = p.grid->adjacency();

  TimeExpandedNetwork tx;
  tx.cells = n;
  tx.horizon = 1;
  tx.net.vertex_count = 2 + 2 * n;
  tx.net.source = 0;
  tx.net.sink = 1;
  tx.supply_edge.resize(n);
  tx.move_edge.assign(static_cast<size_t>(n) * n, -1);
  tx.carry_edge.assign(n, -1);
  tx.sink_edge.resize(n);

  for (CellId i = 0; i < n; ++i)
    tx.supply_edge[i] = tx.net.add_edge(tx.net.source, tx.v_vertex(i, 0), p.drivers[i], 0);
  for (CellId i = 0; i < n; ++i)
    for (CellId j = 0; j < n; ++j)
      if (L(i, j))
        tx.move_edge[static_cast<size_t>(i) * n + j] =
            tx.net.add_edge(tx.v_vertex(i, 0), tx.w_vertex(j, 0), kUnboundedCapacity,
                            scaled_cost(p.reposition_cost(0, i, j), p.cost_scale));
  for (CellId j = 0; j < n; ++j)
    tx.sink_edge[j] = tx.net.add_edge(tx.w_vertex(j, 0), tx.net.sink, p.requests[0][j], 0);
  return tx;
}

/// Time-expanded network for the K-step horizon. Only d_t feeds the
/// source; unused vehicles carry over through the zero-cost W -> V edges,
/// and serving at step k incurs the delay penalty alpha * k on W -> T.
inline TimeExpandedNetwork build_horizon_network(const DispatchProblem& p) {
  p.validate();
  if (p.horizon == 1) return build_single_step_network(p);
  int n = p.cell_count();
  int K = p.horizon;
  const AdjacencyMatrix& L = p.grid->adjacency();

  TimeExpandedNetwork tx;
  tx.cells = n;
  tx.horizon = K;
  tx.net.vertex_count = 2 + 2 * n * K;
  tx.net.source = 0;
  tx.net.sink = 1;
  tx.supply_edge.resize(n);
  tx.move_edge.assign(static_cast<size_t>(K) * n * n, -1);
  tx.carry_edge.assign(static_cast<size_t>(K) * n, -1);
  tx.sink_edge.resize(static_cast<size_t>(K) * n);

  for (CellId i = 0; i < n; ++i)
    tx.supply_edge[i] = tx.net.add_edge(tx.net.source, tx.v_vertex(i, 0), p.drivers[i], 0);
  for (int k = 0; k < K; ++k) {
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j)
        if (L(i, j))
          tx.move_edge[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j] =
              tx.net.add_edge(tx.v_vertex(i, k), tx.w_vertex(j, k), kUnboundedCapacity,
                              scaled_cost(p.reposition_cost(k, i, j), p.cost_scale));
    for (CellId i = 0; i < n; ++i) {
      if (k + 1 < K)
        tx.carry_edge[static_cast<size_t>(k) * n + i] =
            tx.net.add_edge(tx.w_vertex(i, k), tx.v_vertex(i, k + 1), kUnboundedCapacity, 0);
      tx.sink_edge[static_cast<size_t>(k) * n + i] =
          tx.net.add_edge(tx.w_vertex(i, k), tx.net.sink, p.requests[k][i],
                          scaled_cost(p.alpha * k, p.cost_scale));
    }
  }
  return tx;
}

namespace detail {

/// Assembles a dispatch solution from raw movement matrices and served
/// counts, applying the stay convention (unrouted supply booked as
/// x_{i->i,k}) and validating the constraints along the driver evolution.
inline DispatchSolution finalize_solution(const DispatchProblem& p,
                                          std::vector<std::vector<long long>> raw_x,
                                          std::vector<std::vector<long long>> served) {
  int n = p.cell_count();
  int K = p.horizon;
  DispatchSolution sol;
  sol.reposition = std::move(raw_x);
  sol.served = std::move(served);

  std::vector<long long> d_cur = p.drivers;
  for (int k = 0; k < K; ++k) {
    auto& x = sol.reposition[k];
    std::vector<long long> avail(n, 0);
    for (CellId i = 0; i < n; ++i) {
      long long inflow = 0, outflow = 0;
      for (CellId j = 0; j < n; ++j) {
        inflow += x[static_cast<size_t>(j) * n + i];
        outflow += x[static_cast<size_t>(i) * n + j];
      }
      long long g = sol.served[k][i];
      // alpha > 0 forces serving at the earliest feasible step, so any
      // optimal plan satisfies g = min(available, requests).
      if (served_count(d_cur[i], inflow, outflow, p.requests[k][i]) != g)
        throw std::logic_error(
            "served count does not match min(available, requests) at cell " +
            std::to_string(i) + " step " + std::to_string(k));
      avail[i] = d_cur[i] + inflow - outflow;
      sol.objective_minus += p.alpha * k * g;
      sol.objective_plus += g;

      // Stay convention: book unrouted supply as x_{i->i}.
      x[static_cast<size_t>(i) * n + i] += d_cur[i] - outflow;
      if (x[static_cast<size_t>(i) * n + i] < 0)
        throw std::logic_error("movement exceeds available drivers at cell " +
                               std::to_string(i));
      for (CellId j = 0; j < n; ++j)
        sol.objective_minus +=
            p.reposition_cost(k, i, j) * x[static_cast<size_t>(i) * n + j];
    }
    for (CellId i = 0; i < n; ++i) d_cur[i] = avail[i] - sol.served[k][i];
  }
  return sol;
}

/// Reads x and g off a solved time-expanded flow.
inline DispatchSolution extract_solution(const DispatchProblem& p,
                                         const TimeExpandedNetwork& tx,
                                         const FlowAssignment& fa) {
  int n = p.cell_count();
  int K = p.horizon;
  std::vector<std::vector<long long>> raw_x(
      K, std::vector<long long>(static_cast<size_t>(n) * n, 0));
  std::vector<std::vector<long long>> served(K, std::vector<long long>(n, 0));
  for (int k = 0; k < K; ++k)
    for (CellId i = 0; i < n; ++i) {
      served[k][i] = fa.flow[tx.sink_edge[static_cast<size_t>(k) * n + i]];
      for (CellId j = 0; j < n; ++j) {
        int e = tx.move_edge[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j];
        if (e >= 0) raw_x[k][static_cast<size_t>(i) * n + j] = fa.flow[e];
      }
    }
  DispatchSolution sol = finalize_solution(p, std::move(raw_x), std::move(served));
  if (sol.objective_plus != fa.total_flow)
    throw std::logic_error("served total does not match flow into the sink");
  return sol;
}

}  // namespace detail

/// Solves the K-step dispatch problem with the MCMF algorithm; the
/// extracted x is integral and maximizes served requests, with minimal
/// (delay-regularized) reposition cost among the maximizers.
inline DispatchSolution solve_mcmf_dispatch(const DispatchProblem& p) {
  TimeExpandedNetwork tx = build_horizon_network(p);
  FlowAssignment fa = mcmf(tx.net);
  return detail::extract_solution(p, tx, fa);
}

/// Served requests at the first horizon step (the time-greedy quantity).
inline long long first_step_served(const DispatchProblem& p, const DispatchSolution& sol) {
  (void)p;
  long long total = 0;
  for (long long g : sol.served.at(0)) total += g;
  return total;
}

}  // namespace fleetflow
