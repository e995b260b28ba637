#pragma once

#include <stdexcept>
#include <vector>

#include "fleetflow/grid.hpp"

namespace fleetflow {

/// Sends floor(w_ij * d_i) drivers to each adjacent cell, with
/// w_ij = r_j / (r_i + sum of neighbor requests). With no demand in the
/// whole neighborhood everyone stays. Remainders stay.
inline std::vector<long long> proportional_to_demand(const std::vector<long long>& d_t,
                                                     const std::vector<long long>& r_t,
                                                     const HexGrid& grid) {
  int n = grid.size();
  if (static_cast<int>(d_t.size()) != n || static_cast<int>(r_t.size()) != n)
    throw std::invalid_argument("vector size does not match grid");
  std::vector<long long> x(static_cast<size_t>(n) * n, 0);
  for (CellId i = 0; i < n; ++i) {
    long long denom = 0;
    for (CellId j : grid.neighbors(i)) denom += r_t[j];  // includes r_i
    long long sent = 0;
    if (denom > 0) {
      for (CellId j : grid.neighbors(i)) {
        if (j == i) continue;
        long long move = d_t[i] * r_t[j] / denom;  // floor, all nonnegative
        x[static_cast<size_t>(i) * n + j] = move;
        sent += move;
      }
    }
    x[static_cast<size_t>(i) * n + i] = d_t[i] - sent;
  }
  return x;
}

/// Sends floor(d_i / (l+1)) drivers to each of the l adjacent cells;
/// the remainder stays. Deterministic despite the name.
inline std::vector<long long> random_move(const std::vector<long long>& d_t,
                                          const HexGrid& grid) {
  int n = grid.size();
  if (static_cast<int>(d_t.size()) != n)
    throw std::invalid_argument("vector size does not match grid");
  std::vector<long long> x(static_cast<size_t>(n) * n, 0);
  for (CellId i = 0; i < n; ++i) {
    std::vector<CellId> nbrs = grid.neighbors(i);
    long long share = d_t[i] / static_cast<long long>(nbrs.size());  // l + 1 with self
    long long sent = 0;
    for (CellId j : nbrs) {
      if (j == i) continue;
      x[static_cast<size_t>(i) * n + j] = share;
      sent += share;
    }
    x[static_cast<size_t>(i) * n + i] = d_t[i] - sent;
  }
  return x;
}

}  // namespace fleetflow
