#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetflow/grid.hpp"

namespace fleetflow {

struct RideRequest {
  CellId dep = 0;
  CellId dest = 0;
  int start = 0;
  int end = 0;  // >= start; the driver is back online at the start of this step
  double price = 0.0;
};

/// A full-day scenario: requests, driver events and the cost model.
/// Driver events at step s adjust the fleet available at the beginning of
/// step s (step-0 events fold into the initial distribution).
struct Scenario {
  std::shared_ptr<const HexGrid> grid;
  int steps_per_day = 144;  // T
  std::vector<RideRequest> requests;
  std::vector<std::vector<long long>> online_events;   // T x n, zero when absent
  std::vector<std::vector<long long>> offline_events;  // T x n
  std::vector<long long> initial_drivers;              // d_{.,0}
  double cost_kappa = 0.0;  // reposition cost per hex hop
  bool allow_online_offline = false;
  double driver_multiplier = 1.0;

  int cell_count() const { return grid->size(); }

  double reposition_cost(CellId i, CellId j) const {
    return i == j ? 0.0 : cost_kappa * hex_distance(grid->coord(i), grid->coord(j));
  }

  void validate() const {
    int n = cell_count();
    if (steps_per_day < 1) throw std::invalid_argument("T must be >= 1");
    if (static_cast<int>(initial_drivers.size()) != n)
      throw std::invalid_argument("initial driver vector size mismatch");
    for (const RideRequest& r : requests) {
      if (r.dep < 0 || r.dep >= n || r.dest < 0 || r.dest >= n)
        throw std::invalid_argument("request references an unknown cell");
      if (r.end < r.start) throw std::invalid_argument("request ends before it starts");
      if (r.start < 0 || r.start >= steps_per_day)
        throw std::invalid_argument("request start step out of range");
      if (r.price < 0) throw std::invalid_argument("negative request price");
    }
    for (const auto* ev : {&online_events, &offline_events}) {
      if (!ev->empty() && (static_cast<int>(ev->size()) != steps_per_day ||
                           static_cast<int>(ev->front().size()) != n))
        throw std::invalid_argument("driver event table dimension mismatch");
    }
  }
};

/// Evolving state of one simulation run.
struct SimState {
  int step = 0;
  std::vector<long long> idle;                      // d_t per cell
  std::vector<std::vector<long long>> in_transit;   // [arrival step][dest cell]
  std::mt19937_64 rng;

  long long in_transit_total() const {
    long long total = 0;
    for (const auto& row : in_transit)
      total += std::accumulate(row.begin(), row.end(), 0LL);
    return total;
  }
};

struct StepReport {
  double gmv = 0.0;
  double reposition_cost = 0.0;
  long long served = 0;
  std::vector<size_t> matched_request_ids;
};

struct Metrics {
  double gmv = 0.0;
  double reposition_cost = 0.0;
  double max_gmv = 0.0;
  long long served_count = 0;
  double relative_profit = 0.0;
  double relative_income = 0.0;
  std::vector<StepReport> per_step;
};

/// (relative profit, relative income). A day with no requests reports
/// both as 1.0 by convention.
inline std::pair<double, double> relative_metrics(double gmv, double cost, double max_gmv) {
  if (max_gmv <= 0) return {1.0, 1.0};
  return {(gmv - cost) / max_gmv, gmv / max_gmv};
}

/// Scales the initial driver distribution by floor(m * d_i).
inline Scenario apply_driver_multiplier(Scenario scenario, double m) {
  if (!(m > 0.0) || m > 1.0)
    throw std::invalid_argument("driver multiplier must lie in (0, 1]");
  for (long long& d : scenario.initial_drivers)
    d = static_cast<long long>(std::floor(m * static_cast<double>(d)));
  scenario.driver_multiplier = m;
  return scenario;
}

/// Picks the top min(idle, count) requests by price. Ties are ordered by
/// a seeded shuffle, standing in for the random assignment of drivers to
/// equally priced requests. Returns indices into `requests`.
inline std::vector<size_t> match_requests(long long idle_in_cell,
                                          const std::vector<RideRequest>& requests,
                                          std::mt19937_64& rng) {
  std::vector<size_t> order(requests.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return requests[a].price > requests[b].price;
  });
  size_t take = static_cast<size_t>(
      std::min<long long>(idle_in_cell, static_cast<long long>(requests.size())));
  order.resize(take);
  return order;
}

/// Dispatch policy: observed (d_t, r_t, t) -> flattened n x n movement
/// matrix x_t.
using DispatchPolicy = std::function<std::vector<long long>(
    const std::vector<long long>&, const std::vector<long long>&, int)>;

namespace detail {

inline void apply_events(const Scenario& sc, SimState& state, int step) {
  if (!sc.allow_online_offline) return;
  int n = sc.cell_count();
  if (!sc.online_events.empty())
    for (CellId i = 0; i < n; ++i) state.idle[i] += sc.online_events[step][i];
  if (!sc.offline_events.empty())
    for (CellId i = 0; i < n; ++i)
      // More drivers may leave than are idle; the count floors at zero.
      state.idle[i] = std::max(0LL, state.idle[i] - sc.offline_events[step][i]);
}

}  // namespace detail

/// Advances one time step: reposition per x_t, match requests most
/// expensive first, then arrivals and driver events. `accept_override`,
/// when given, matches exactly the flagged requests instead (oracle
/// replay). `request_ids` lists the scenario requests starting this step,
/// grouped by the caller.
inline StepReport step(SimState& state, const Scenario& scenario,
                       const std::vector<long long>& x_t,
                       const std::vector<std::vector<size_t>>& requests_by_cell,
                       const std::vector<uint8_t>* accept_override = nullptr) {
  int n = scenario.cell_count();
  const AdjacencyMatrix& L = scenario.grid->adjacency();
  if (static_cast<int>(x_t.size()) != n * n)
    throw std::invalid_argument("dispatch matrix has wrong dimensions");

  StepReport report;

  // Stage 1: reposition.
  std::vector<long long> moved = state.idle;
  for (CellId i = 0; i < n; ++i) {
    long long out = 0;
    for (CellId j = 0; j < n; ++j) {
      long long x = x_t[static_cast<size_t>(i) * n + j];
      if (x < 0 || (x > 0 && !L(i, j)))
        throw std::invalid_argument("infeasible dispatch from cell " + std::to_string(i) +
                                    " to non-adjacent cell " + std::to_string(j));
      if (i != j) {
        out += x;
        moved[j] += x;
        report.reposition_cost += scenario.reposition_cost(i, j) * x;
      }
    }
    if (out > state.idle[i])
      throw std::invalid_argument("dispatch exceeds idle drivers in cell " +
                                  std::to_string(i));
    moved[i] -= out;
  }
  state.idle = moved;

  // Stage 2: match requests in each cell, most expensive first.
  for (CellId i = 0; i < n; ++i) {
    const std::vector<size_t>& ids = requests_by_cell[i];
    if (ids.empty()) continue;
    std::vector<size_t> matched;  // positions into ids
    if (accept_override) {
      for (size_t pos = 0; pos < ids.size(); ++pos)
        if ((*accept_override)[ids[pos]]) matched.push_back(pos);
      if (static_cast<long long>(matched.size()) > state.idle[i])
        throw std::invalid_argument("replay accepts more requests than idle drivers in cell " +
                                    std::to_string(i));
    } else {
      std::vector<RideRequest> local;
      local.reserve(ids.size());
      for (size_t id : ids) local.push_back(scenario.requests[id]);
      matched = match_requests(state.idle[i], local, state.rng);
    }
    for (size_t pos : matched) {
      const RideRequest& r = scenario.requests[ids[pos]];
      state.idle[i] -= 1;
      report.gmv += r.price;
      report.served += 1;
      report.matched_request_ids.push_back(ids[pos]);
      int arrival = std::max(r.end, state.step + 1);
      if (arrival < static_cast<int>(state.in_transit.size()))
        state.in_transit[arrival][r.dest] += 1;
      // else: the ride finishes after the day ends; the driver never returns
    }
  }

  // Stage 3: arrivals, then online, then offline with clamp at zero.
  int next = state.step + 1;
  if (next < static_cast<int>(state.in_transit.size())) {
    for (CellId i = 0; i < n; ++i) {
      state.idle[i] += state.in_transit[next][i];
      state.in_transit[next][i] = 0;
    }
  }
  if (next < scenario.steps_per_day) detail::apply_events(scenario, state, next);

  state.step = next;
  return report;
}

/// Runs a whole day under the given policy and aggregates metrics.
inline Metrics run_day(const Scenario& scenario, const DispatchPolicy& policy,
                       uint64_t seed = 0,
                       const std::vector<uint8_t>* accept_override = nullptr) {
  scenario.validate();
  int n = scenario.cell_count();
  int T = scenario.steps_per_day;

  // Requests grouped by (start step, departure cell).
  std::vector<std::vector<std::vector<size_t>>> by_step(
      T, std::vector<std::vector<size_t>>(n));
  for (size_t id = 0; id < scenario.requests.size(); ++id)
    by_step[scenario.requests[id].start][scenario.requests[id].dep].push_back(id);

  SimState state;
  state.idle = scenario.initial_drivers;
  state.in_transit.assign(T + 1, std::vector<long long>(n, 0));
  state.rng.seed(seed);
  detail::apply_events(scenario, state, 0);

  Metrics metrics;
  for (const RideRequest& r : scenario.requests) metrics.max_gmv += r.price;

  for (int t = 0; t < T; ++t) {
    std::vector<long long> r_t(n, 0);
    for (CellId i = 0; i < n; ++i)
      r_t[i] = static_cast<long long>(by_step[t][i].size());
    std::vector<long long> x_t;
    try {
      x_t = policy(state.idle, r_t, t);
    } catch (const std::exception& e) {
      throw std::runtime_error("policy failed at step " + std::to_string(t) + ": " +
                               e.what());
    }
    StepReport report = step(state, scenario, x_t, by_step[t], accept_override);
    metrics.gmv += report.gmv;
    metrics.reposition_cost += report.reposition_cost;
    metrics.served_count += report.served;
    metrics.per_step.push_back(std::move(report));
  }

  auto [profit, income] = relative_metrics(metrics.gmv, metrics.reposition_cost,
                                           metrics.max_gmv);
  metrics.relative_profit = profit;
  metrics.relative_income = income;
  return metrics;
}

}  // namespace fleetflow
