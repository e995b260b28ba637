// Seeded random instance generators shared by the unit and acceptance
// tests. Costs are always exact multiples of 0.01 so the integer-scaled
// flow objective and the real LP objective coincide.
#pragma once

#include <memory>
#include <random>
#include <set>

#include "fleetflow/dispatch.hpp"
#include "fleetflow/grid.hpp"

namespace testsupport {

using namespace fleetflow;

/// Small connected grids with 1, 2 or 3 cells (radius-1 patch with ring
/// cells blocked). The kept ring cells are mutually adjacent.
inline std::shared_ptr<const HexGrid> tiny_grid(int cells) {
  if (cells == 1) return std::make_shared<HexGrid>(build_hex_grid(0));
  std::set<AxialCoord> blocked(std::begin(kHexOffsets), std::end(kHexOffsets));
  blocked.erase({+1, 0});
  if (cells >= 3) blocked.erase({+1, -1});
  return std::make_shared<HexGrid>(build_hex_grid(1, blocked));
}

inline std::shared_ptr<const HexGrid> shared_grid(int radius) {
  return std::make_shared<HexGrid>(build_hex_grid(radius));
}

/// Random heterogeneous reposition costs in cents, zero on the diagonal
/// and on non-adjacent pairs.
inline void randomize_costs(DispatchProblem& p, std::mt19937_64& rng, int max_cents) {
  int n = p.cell_count();
  const AdjacencyMatrix& L = p.grid->adjacency();
  std::uniform_int_distribution<int> cents(0, max_cents);
  p.cost.assign(static_cast<size_t>(p.horizon) * n * n, 0.0);
  for (int k = 0; k < p.horizon; ++k)
    for (CellId i = 0; i < n; ++i)
      for (CellId j = 0; j < n; ++j)
        if (i != j && L(i, j))
          p.cost[static_cast<size_t>(k) * n * n + static_cast<size_t>(i) * n + j] =
              cents(rng) / 100.0;
}

/// Dispatch problem on a radius <= 2 grid (n <= 19), K <= 4, entries <= 5.
inline DispatchProblem random_problem(std::mt19937_64& rng,
                                      const std::shared_ptr<const HexGrid>& grid,
                                      int max_k = 4, long long max_entry = 5) {
  DispatchProblem p;
  p.grid = grid;
  int n = p.cell_count();
  p.horizon = std::uniform_int_distribution<int>(1, max_k)(rng);
  std::uniform_int_distribution<long long> entry(0, max_entry);
  p.drivers.resize(n);
  for (auto& d : p.drivers) d = entry(rng);
  p.requests.assign(p.horizon, std::vector<long long>(n));
  for (auto& row : p.requests)
    for (auto& r : row) r = entry(rng);
  randomize_costs(p, rng, 300);
  return p;
}

/// Tiny instance suitable for plan enumeration: n <= 3, K <= 2, d,r <= 2.
inline DispatchProblem random_tiny_problem(std::mt19937_64& rng) {
  int cells = std::uniform_int_distribution<int>(1, 3)(rng);
  return random_problem(rng, tiny_grid(cells), /*max_k=*/2, /*max_entry=*/2);
}

}  // namespace testsupport
