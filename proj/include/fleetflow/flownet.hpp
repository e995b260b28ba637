#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fleetflow {

using VertexId = int;
using FlowUnit = long long;
using CostUnit = long long;

/// Sentinel for an uncapacitated edge. Replaced by the total finite
/// capacity leaving the source before solving, which no feasible flow
/// can exceed, so all arithmetic stays integral.
inline constexpr FlowUnit kUnboundedCapacity = -1;

struct FlowEdge {
  VertexId from = 0;
  VertexId to = 0;
  FlowUnit capacity = 0;  // kUnboundedCapacity or >= 0
  CostUnit cost = 0;
};

/// Directed flow network with a distinguished source and sink.
/// Immutable during a solve.
struct FlowNetwork {
  int vertex_count = 0;
  VertexId source = 0;
  VertexId sink = 0;
  std::vector<FlowEdge> edges;

  VertexId add_vertex() { return vertex_count++; }
  int add_edge(VertexId u, VertexId v, FlowUnit cap, CostUnit cost) {
    edges.push_back({u, v, cap, cost});
    return static_cast<int>(edges.size()) - 1;
  }
};

struct FlowAssignment {
  std::vector<FlowUnit> flow;  // per input edge
  FlowUnit total_flow = 0;
  CostUnit total_cost = 0;
};

namespace detail {

/// Residual-arc solver state for one MCMF run. Forward and reverse arcs
/// are stored adjacently (arc ^ 1 is the partner arc).
class McmfSolver {
 public:
  explicit McmfSolver(const FlowNetwork& net) : net_(net) {
    // Algorithm precondition: (v,u) must not appear when (u,v) does,
    // otherwise the residual reverse arc would collide with an input arc.
    std::set<std::pair<VertexId, VertexId>> seen;
    for (const FlowEdge& e : net.edges) seen.insert({e.from, e.to});
    for (const FlowEdge& e : net.edges) {
      if (seen.count({e.to, e.from}))
        throw std::invalid_argument("flow network contains an antiparallel edge pair (" +
                                    std::to_string(e.from) + "," + std::to_string(e.to) + ")");
    }

    supply_ = 0;
    for (const FlowEdge& e : net.edges) {
      if (e.from == net.source) {
        if (e.capacity == kUnboundedCapacity)
          throw std::invalid_argument("source edges must have finite capacity");
        supply_ += e.capacity;
      }
    }

    head_.assign(net.vertex_count, -1);
    for (const FlowEdge& e : net.edges) {
      push_arc(e.from, e.to, effective_capacity(e), e.cost);
      push_arc(e.to, e.from, 0, -e.cost);
    }
  }

  FlowUnit effective_capacity(const FlowEdge& e) const {
    return e.capacity == kUnboundedCapacity ? supply_ : e.capacity;
  }

  /// Load an existing feasible flow into the residual arcs.
  void apply_flow(const FlowAssignment& flow) {
    if (flow.flow.size() != net_.edges.size())
      throw std::invalid_argument("flow vector size does not match edge count");
    for (size_t e = 0; e < net_.edges.size(); ++e) {
      FlowUnit f = flow.flow[e];
      FlowUnit cap = effective_capacity(net_.edges[e]);
      if (f < 0 || f > cap)
        throw std::invalid_argument("given flow is infeasible on edge " + std::to_string(e));
      arc_residual_[2 * e] = cap - f;
      arc_residual_[2 * e + 1] = f;
    }
  }

  /// Classical Bellman-Ford on the residual arcs: exactly |V| - 1 full
  /// relaxation passes, then one detection pass that must find no further
  /// improvement (a residual negative-cost cycle otherwise). Fixed arc
  /// scan order plus strict relaxation makes the chosen path
  /// deterministic, so each augmentation costs O(|V| * |E|).
  std::optional<std::vector<int>> shortest_path() const {
    const CostUnit inf = std::numeric_limits<CostUnit>::max();
    std::vector<CostUnit> dist(net_.vertex_count, inf);
    std::vector<int> pred_arc(net_.vertex_count, -1);
    dist[net_.source] = 0;

    const int arcs = static_cast<int>(arc_to_.size());
    for (int pass = 0; pass + 1 < net_.vertex_count; ++pass) {
      for (int a = 0; a < arcs; ++a) {
        if (arc_residual_[a] <= 0) continue;
        VertexId u = arc_from_[a], v = arc_to_[a];
        if (dist[u] == inf) continue;
        CostUnit nd = dist[u] + arc_cost_[a];
        if (nd < dist[v]) {
          dist[v] = nd;
          pred_arc[v] = a;
        }
      }
    }
    for (int a = 0; a < arcs; ++a) {
      if (arc_residual_[a] <= 0 || dist[arc_from_[a]] == inf) continue;
      if (dist[arc_from_[a]] + arc_cost_[a] < dist[arc_to_[a]])
        throw std::logic_error("negative-cost cycle in residual network");
    }
    if (pred_arc[net_.sink] < 0) return std::nullopt;
    return pred_arc;
  }

  /// Vertex sequence of the current minimum-cost augmenting path.
  std::optional<std::vector<VertexId>> current_path() const {
    auto pred = shortest_path();
    if (!pred) return std::nullopt;
    return trace(*pred);
  }

  FlowAssignment run() {
    FlowAssignment out;
    CostUnit prev_path_cost = std::numeric_limits<CostUnit>::min();
    while (auto pred = shortest_path()) {
      (void)trace(*pred);  // validates acyclicity

      CostUnit path_cost = 0;
      FlowUnit bottleneck = std::numeric_limits<FlowUnit>::max();
      for (VertexId v = net_.sink; v != net_.source; v = arc_from_[(*pred)[v]]) {
        int a = (*pred)[v];
        path_cost += arc_cost_[a];
        bottleneck = std::min(bottleneck, arc_residual_[a]);
      }
      // Successive shortest paths have non-decreasing costs.
      assert(path_cost >= prev_path_cost);
      prev_path_cost = path_cost;

      for (VertexId v = net_.sink; v != net_.source; v = arc_from_[(*pred)[v]]) {
        int a = (*pred)[v];
        arc_residual_[a] -= bottleneck;
        arc_residual_[a ^ 1] += bottleneck;
      }
      out.total_flow += bottleneck;
    }

    out.flow.resize(net_.edges.size());
    for (size_t e = 0; e < net_.edges.size(); ++e) {
      out.flow[e] = arc_residual_[2 * e + 1];  // reverse residual = pushed flow
      out.total_cost += out.flow[e] * net_.edges[e].cost;
    }
    return out;
  }

  /// Signed cost of a residual path given as a vertex sequence. Picks the
  /// cheapest positive-residual arc for each hop.
  CostUnit residual_path_cost(const std::vector<VertexId>& path) const {
    CostUnit total = 0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      CostUnit best = std::numeric_limits<CostUnit>::max();
      for (int a = head_[path[i]]; a >= 0; a = arc_next_[a]) {
        if (arc_to_[a] == path[i + 1] && arc_residual_[a] > 0)
          best = std::min(best, arc_cost_[a]);
      }
      if (best == std::numeric_limits<CostUnit>::max())
        throw std::invalid_argument("path uses a missing or saturated residual edge");
      total += best;
    }
    return total;
  }

 private:
  void push_arc(VertexId u, VertexId v, FlowUnit cap, CostUnit cost) {
    arc_from_.push_back(u);
    arc_to_.push_back(v);
    arc_residual_.push_back(cap);
    arc_cost_.push_back(cost);
    arc_next_.push_back(head_[u]);
    head_[u] = static_cast<int>(arc_from_.size()) - 1;
  }

  std::vector<VertexId> trace(const std::vector<int>& pred_arc) const {
    std::vector<VertexId> path;
    for (VertexId v = net_.sink;; v = arc_from_[pred_arc[v]]) {
      path.push_back(v);
      if (v == net_.source) break;
      if (path.size() > static_cast<size_t>(net_.vertex_count))
        throw std::logic_error("augmenting path revisits a vertex");
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  const FlowNetwork& net_;
  FlowUnit supply_ = 0;
  std::vector<VertexId> arc_from_, arc_to_;
  std::vector<FlowUnit> arc_residual_;
  std::vector<CostUnit> arc_cost_;
  std::vector<int> arc_next_, head_;
};

}  // namespace detail

/// Minimum cost maximum flow by successive minimum-cost augmenting paths.
/// With integer capacities every flow value in the result is integral.
inline FlowAssignment mcmf(const FlowNetwork& net) {
  detail::McmfSolver solver(net);
  FlowAssignment out = solver.run();

  // Conservation at every non-terminal vertex.
  std::vector<FlowUnit> balance(net.vertex_count, 0);
  for (size_t e = 0; e < net.edges.size(); ++e) {
    balance[net.edges[e].from] -= out.flow[e];
    balance[net.edges[e].to] += out.flow[e];
  }
  for (VertexId v = 0; v < net.vertex_count; ++v) {
    if (v == net.source || v == net.sink) continue;
    if (balance[v] != 0)
      throw std::logic_error("flow conservation violated at vertex " + std::to_string(v));
  }
  return out;
}

/// Minimum-cost augmenting path for the given feasible flow, as a vertex
/// sequence, or nullopt when the network is saturated.
inline std::optional<std::vector<VertexId>> find_min_cost_augmenting_path(
    const FlowNetwork& net, const FlowAssignment& flow) {
  detail::McmfSolver solver(net);
  if (!flow.flow.empty()) solver.apply_flow(flow);
  return solver.current_path();
}

/// Signed cost of a residual path under the given flow (reverse arcs carry
/// negated cost).
inline CostUnit path_cost(const FlowNetwork& net, const std::vector<VertexId>& path,
                          const FlowAssignment* flow = nullptr) {
  if (path.size() < 2) return 0;
  detail::McmfSolver solver(net);
  if (flow && !flow->flow.empty()) solver.apply_flow(*flow);
  return solver.residual_path_cost(path);
}

/// Edge-list text dump: "u v cap cost flow" per line.
inline std::string dump_network(const FlowNetwork& net, const FlowAssignment* flow = nullptr) {
  std::ostringstream os;
  os << "# source=" << net.source << " sink=" << net.sink
     << " vertices=" << net.vertex_count << "\n";
  for (size_t e = 0; e < net.edges.size(); ++e) {
    const FlowEdge& ed = net.edges[e];
    os << ed.from << " " << ed.to << " ";
    if (ed.capacity == kUnboundedCapacity)
      os << "inf";
    else
      os << ed.capacity;
    os << " " << ed.cost;
    if (flow) os << " " << flow->flow[e];
    os << "\n";
  }
  return os.str();
}

}  // namespace fleetflow
