#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fleetflow {

/// Axial hex coordinate (pointy-top convention).
struct AxialCoord {
  int q = 0;
  int r = 0;

  friend bool operator==(const AxialCoord&, const AxialCoord&) = default;
  friend auto operator<=>(const AxialCoord&, const AxialCoord&) = default;
};

/// Hop distance between two axial coordinates on an unblocked hex plane.
inline int hex_distance(AxialCoord a, AxialCoord b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  const int ds = -(dq + dr);
  return (std::abs(dq) + std::abs(dr) + std::abs(ds)) / 2;
}

/// The six axial neighbor offsets, in a fixed order.
inline constexpr AxialCoord kHexOffsets[6] = {
    {+1, 0}, {+1, -1}, {0, -1}, {-1, 0}, {-1, +1}, {0, +1}};

using CellId = int;

class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(int n) : n_(n), entries_(static_cast<size_t>(n) * n, 0) {}

  int size() const { return n_; }
  uint8_t operator()(CellId i, CellId j) const {
    return entries_[static_cast<size_t>(i) * n_ + j];
  }
  void set(CellId i, CellId j, uint8_t v) {
    entries_[static_cast<size_t>(i) * n_ + j] = v;
  }

  int row_sum(CellId i) const {
    int s = 0;
    for (CellId j = 0; j < n_; ++j) s += (*this)(i, j);
    return s;
  }

 private:
  int n_ = 0;
  std::vector<uint8_t> entries_;
};

/// Hexagon-shaped patch of cells around the origin, minus blocked cells.
/// Immutable after construction; cell ids are assigned row-major over
/// (r, q) so indexing is reproducible across runs.
class HexGrid {
 public:
  HexGrid(int radius, const std::set<AxialCoord>& blocked) : radius_(radius) {
    if (radius < 0) throw std::invalid_argument("grid radius must be >= 0");
    for (const AxialCoord& b : blocked) {
      if (hex_distance(b, {0, 0}) > radius) {
        throw std::invalid_argument("blocked coordinate outside the patch: (" +
                                    std::to_string(b.q) + "," + std::to_string(b.r) + ")");
      }
    }
    for (int r = -radius; r <= radius; ++r) {
      for (int q = -radius; q <= radius; ++q) {
        AxialCoord c{q, r};
        if (hex_distance(c, {0, 0}) > radius) continue;
        if (blocked.count(c)) continue;
        coords_.push_back(c);
      }
    }
    adj_ = AdjacencyMatrix(static_cast<int>(coords_.size()));
    for (CellId i = 0; i < size(); ++i) {
      adj_.set(i, i, 1);
      for (const AxialCoord& off : kHexOffsets) {
        AxialCoord nb{coords_[i].q + off.q, coords_[i].r + off.r};
        if (auto j = find_cell(nb)) adj_.set(i, *j, 1);
      }
    }
  }

  int size() const { return static_cast<int>(coords_.size()); }
  int radius() const { return radius_; }
  AxialCoord coord(CellId i) const { return coords_.at(i); }
  const AdjacencyMatrix& adjacency() const { return adj_; }

  std::optional<CellId> find_cell(AxialCoord c) const {
    auto it = std::lower_bound(coords_.begin(), coords_.end(), c,
                               [](AxialCoord a, AxialCoord b) {
                                 return std::pair(a.r, a.q) < std::pair(b.r, b.q);
                               });
    if (it == coords_.end() || !(*it == c)) return std::nullopt;
    return static_cast<CellId>(it - coords_.begin());
  }

  /// Cells j with L[i][j] = 1, i itself included.
  std::vector<CellId> neighbors(CellId i) const {
    if (i < 0 || i >= size()) throw std::out_of_range("unknown cell id " + std::to_string(i));
    std::vector<CellId> out;
    for (CellId j = 0; j < size(); ++j)
      if (adj_(i, j)) out.push_back(j);
    return out;
  }

  /// Longest shortest-path hop count over L. Throws if the grid is
  /// disconnected, naming one disconnected pair.
  int graph_diameter() const {
    int diam = 0;
    for (CellId s = 0; s < size(); ++s) {
      std::vector<int> dist(size(), -1);
      std::queue<CellId> bfs;
      dist[s] = 0;
      bfs.push(s);
      while (!bfs.empty()) {
        CellId u = bfs.front();
        bfs.pop();
        for (CellId v = 0; v < size(); ++v) {
          if (adj_(u, v) && dist[v] < 0) {
            dist[v] = dist[u] + 1;
            bfs.push(v);
          }
        }
      }
      for (CellId v = 0; v < size(); ++v) {
        if (dist[v] < 0)
          throw std::runtime_error("grid is disconnected: no path between cells " +
                                   std::to_string(s) + " and " + std::to_string(v));
        diam = std::max(diam, dist[v]);
      }
    }
    return diam;
  }

  /// BFS hop distance over L (respects blocked cells, unlike hex_distance).
  int bfs_distance(CellId a, CellId b) const {
    std::vector<int> dist(size(), -1);
    std::queue<CellId> bfs;
    dist[a] = 0;
    bfs.push(a);
    while (!bfs.empty()) {
      CellId u = bfs.front();
      bfs.pop();
      if (u == b) return dist[u];
      for (CellId v = 0; v < size(); ++v) {
        if (adj_(u, v) && dist[v] < 0) {
          dist[v] = dist[u] + 1;
          bfs.push(v);
        }
      }
    }
    throw std::runtime_error("grid is disconnected: no path between cells " +
                             std::to_string(a) + " and " + std::to_string(b));
  }

 private:
  int radius_ = 0;
  std::vector<AxialCoord> coords_;  // sorted by (r, q)
  AdjacencyMatrix adj_;
};

inline HexGrid build_hex_grid(int radius, const std::set<AxialCoord>& blocked = {}) {
  return HexGrid(radius, blocked);
}

}  // namespace fleetflow
