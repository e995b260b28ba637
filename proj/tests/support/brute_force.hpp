// Independent brute-force reference implementations used to cross-check
// the solvers on tiny instances. Deliberately naive: plain enumeration,
// no shared code with the library beyond data types.
#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "fleetflow/dispatch.hpp"
#include "fleetflow/flownet.hpp"
#include "fleetflow/grid.hpp"
#include "fleetflow/simulator.hpp"

namespace brute {

using namespace fleetflow;

// ---- exhaustive min-cost max-flow -------------------------------------

struct FlowOptimum {
  FlowUnit max_flow = 0;
  CostUnit min_cost = 0;  // among maximum flows
};

/// Enumerates every integral flow vector edge by edge and keeps the
/// lexicographic best (max total flow, then min cost). Exponential.
inline FlowOptimum enumerate_flows(const FlowNetwork& net) {
  FlowUnit supply = 0;
  for (const FlowEdge& e : net.edges)
    if (e.from == net.source) supply += e.capacity;

  std::vector<FlowUnit> flow(net.edges.size(), 0);
  FlowOptimum best;
  bool found = false;

  std::function<void(size_t)> rec = [&](size_t e) {
    if (e == net.edges.size()) {
      std::vector<FlowUnit> balance(net.vertex_count, 0);
      for (size_t i = 0; i < net.edges.size(); ++i) {
        balance[net.edges[i].from] -= flow[i];
        balance[net.edges[i].to] += flow[i];
      }
      for (VertexId v = 0; v < net.vertex_count; ++v)
        if (v != net.source && v != net.sink && balance[v] != 0) return;
      FlowUnit total = balance[net.sink];
      CostUnit cost = 0;
      for (size_t i = 0; i < net.edges.size(); ++i)
        cost += flow[i] * net.edges[i].cost;
      if (!found || total > best.max_flow ||
          (total == best.max_flow && cost < best.min_cost)) {
        best = {total, cost};
        found = true;
      }
      return;
    }
    FlowUnit cap = net.edges[e].capacity == kUnboundedCapacity ? supply
                                                               : net.edges[e].capacity;
    for (FlowUnit f = 0; f <= cap; ++f) {
      flow[e] = f;
      rec(e + 1);
    }
    flow[e] = 0;
  };
  rec(0);
  return best;
}

// ---- exhaustive dispatch plans ----------------------------------------

struct DispatchOptimum {
  long long objective_plus = 0;
  double objective_minus = 0.0;
};

/// All ways to split `total` drivers across `bins` destinations.
inline void compositions(long long total, int bins, std::vector<long long>& cur,
                         const std::function<void(const std::vector<long long>&)>& emit) {
  if (bins == 1) {
    cur.push_back(total);
    emit(cur);
    cur.pop_back();
    return;
  }
  for (long long v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions(total - v, bins - 1, cur, emit);
    cur.pop_back();
  }
}

/// Lexicographic optimum (max served, then min cost + delay penalty) over
/// every feasible integer movement plan, serving min(available, requests)
/// at each step. Exponential; keep n <= 3, K <= 2, d small.
inline DispatchOptimum enumerate_dispatch_plans(const DispatchProblem& p) {
  int n = p.cell_count();
  int K = p.horizon;
  DispatchOptimum best{-1, 0.0};

  // Per-step recursion: distribute each cell's drivers over its neighbors.
  std::function<void(int, const std::vector<long long>&, long long, double)> step_rec =
      [&](int k, const std::vector<long long>& d, long long fplus, double fminus) {
        if (k == K) {
          if (fplus > best.objective_plus ||
              (fplus == best.objective_plus && fminus < best.objective_minus))
            best = {fplus, fminus};
          return;
        }
        // Enumerate movement choices cell by cell.
        std::vector<std::vector<long long>> sends(n);  // per source: per neighbor
        std::function<void(int)> cell_rec = [&](int i) {
          if (i == n) {
            std::vector<long long> avail(n, 0);
            double move_cost = 0;
            for (CellId s = 0; s < n; ++s) {
              auto nbrs = p.grid->neighbors(s);
              for (size_t a = 0; a < nbrs.size(); ++a) {
                avail[nbrs[a]] += sends[s][a];
                move_cost += p.reposition_cost(k, s, nbrs[a]) * sends[s][a];
              }
            }
            long long served_total = 0;
            double delay = 0;
            std::vector<long long> next(n);
            for (CellId c = 0; c < n; ++c) {
              long long g = std::min(avail[c], p.requests[k][c]);
              served_total += g;
              delay += p.alpha * k * g;
              next[c] = avail[c] - g;
            }
            step_rec(k + 1, next, fplus + served_total, fminus + move_cost + delay);
            return;
          }
          auto nbrs = p.grid->neighbors(i);
          std::vector<long long> cur;
          compositions(d[i], static_cast<int>(nbrs.size()), cur,
                       [&](const std::vector<long long>& split) {
                         sends[i] = split;
                         cell_rec(i + 1);
                       });
        };
        cell_rec(0);
      };
  step_rec(0, p.drivers, 0, 0.0);
  return best;
}

// ---- exhaustive offline oracle ----------------------------------------

/// Best day objective (gmv - min reposition cost) over every acceptance
/// vector b and every movement plan realizing it. Mirrors the simulator's
/// timing: a ride accepted at step t returns the driver at step
/// max(end, t+1); arrivals past the day end are dropped.
inline std::optional<double> enumerate_oracle(const Scenario& sc) {
  int n = sc.cell_count();
  int T = sc.steps_per_day;
  size_t m = sc.requests.size();
  double best = -std::numeric_limits<double>::infinity();
  bool feasible_any = false;

  for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
    double gmv = 0;
    for (size_t a = 0; a < m; ++a)
      if (mask >> a & 1) gmv += sc.requests[a].price;

    // Min movement cost serving exactly the accepted set, or infeasible.
    double best_cost = std::numeric_limits<double>::infinity();
    std::function<void(int, std::vector<long long>,
                       std::vector<std::vector<long long>>, double)>
        rec = [&](int t, std::vector<long long> idle,
                  std::vector<std::vector<long long>> transit, double cost) {
          if (cost >= best_cost) return;
          if (t == T) {
            best_cost = cost;
            return;
          }
          // Required services this step.
          std::vector<long long> need(n, 0);
          for (size_t a = 0; a < m; ++a)
            if ((mask >> a & 1) && sc.requests[a].start == t)
              need[sc.requests[a].dep] += 1;

          std::vector<std::vector<long long>> sends(n);
          std::function<void(int)> cell_rec = [&](int i) {
            if (i == n) {
              std::vector<long long> after(n, 0);
              double move_cost = 0;
              for (CellId s = 0; s < n; ++s) {
                auto nbrs = sc.grid->neighbors(s);
                for (size_t a = 0; a < nbrs.size(); ++a) {
                  after[nbrs[a]] += sends[s][a];
                  move_cost += sc.reposition_cost(s, nbrs[a]) * sends[s][a];
                }
              }
              for (CellId c = 0; c < n; ++c)
                if (after[c] < need[c]) return;  // cannot serve the accepted set
              // Serve: drivers leave, arrive later at the destination.
              auto next_transit = transit;
              for (size_t a = 0; a < m; ++a)
                if ((mask >> a & 1) && sc.requests[a].start == t) {
                  after[sc.requests[a].dep] -= 1;
                  int arr = std::max(sc.requests[a].end, t + 1);
                  if (arr < T) next_transit[arr][sc.requests[a].dest] += 1;
                }
              if (t + 1 < T)
                for (CellId c = 0; c < n; ++c) {
                  after[c] += next_transit[t + 1][c];
                  next_transit[t + 1][c] = 0;
                }
              rec(t + 1, after, next_transit, cost + move_cost);
              return;
            }
            auto nbrs = sc.grid->neighbors(i);
            std::vector<long long> cur;
            compositions(idle[i], static_cast<int>(nbrs.size()), cur,
                         [&](const std::vector<long long>& split) {
                           sends[i] = split;
                           cell_rec(i + 1);
                         });
          };
          cell_rec(0);
        };
    rec(0, sc.initial_drivers,
        std::vector<std::vector<long long>>(T, std::vector<long long>(n, 0)), 0.0);
    if (best_cost < std::numeric_limits<double>::infinity()) {
      feasible_any = true;
      best = std::max(best, gmv - best_cost);
    }
  }
  if (!feasible_any) return std::nullopt;
  return best;
}

}  // namespace brute
