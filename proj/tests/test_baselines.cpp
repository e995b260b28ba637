#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fleetflow/baselines.hpp"
#include "support/instances.hpp"

using namespace fleetflow;

TEST_CASE("proportional-to-demand sends floor(w * d) to each neighbor") {
  // Two adjacent cells: d_0 = 6, r = (0, 6) -> w_{0,1} = 6/6 = 1, all move.
  auto grid = testsupport::tiny_grid(2);
  auto x = proportional_to_demand({6, 0}, {0, 6}, *grid);
  CHECK(x[1] == 6);
  CHECK(x[0] == 0);
}

TEST_CASE("proportional-to-demand floors small flows away") {
  // Uniform demand: center cell of a radius-1 patch has 6 neighbors, each
  // weight 1/7, and floor(5/7) = 0, so all 5 stay.
  auto grid = testsupport::shared_grid(1);
  CellId c = *grid->find_cell({0, 0});
  std::vector<long long> d(7, 0), r(7, 1);
  d[c] = 5;
  auto x = proportional_to_demand(d, r, *grid);
  for (CellId j = 0; j < 7; ++j)
    CHECK(x[static_cast<size_t>(c) * 7 + j] == (j == c ? 5 : 0));
}

TEST_CASE("zero demand in the whole neighborhood keeps drivers in place") {
  auto grid = testsupport::tiny_grid(3);
  auto x = proportional_to_demand({4, 2, 1}, {0, 0, 0}, *grid);
  CHECK(x[0 * 3 + 0] == 4);
  CHECK(x[1 * 3 + 1] == 2);
  CHECK(x[2 * 3 + 2] == 1);
}

TEST_CASE("proportional split matches the printed formula") {
  // 3 mutually adjacent cells, d_0 = 7, r = (1, 4, 2): denom = 7,
  // moves floor(7*4/7) = 4 and floor(7*2/7) = 2, remainder 1 stays.
  auto grid = testsupport::tiny_grid(3);
  auto x = proportional_to_demand({7, 0, 0}, {1, 4, 2}, *grid);
  CHECK(x[1] == 4);
  CHECK(x[2] == 2);
  CHECK(x[0] == 1);
}

TEST_CASE("random-move splits evenly with remainder staying") {
  auto grid = testsupport::shared_grid(1);
  CellId c = *grid->find_cell({0, 0});
  std::vector<long long> d(7, 0);

  SECTION("d = 7, l = 6: one each, one stays") {
    d[c] = 7;
    auto x = random_move(d, *grid);
    for (CellId j : grid->neighbors(c))
      CHECK(x[static_cast<size_t>(c) * 7 + j] == 1);
  }
  SECTION("d = 3, l = 6: floor kills all movement") {
    d[c] = 3;
    auto x = random_move(d, *grid);
    CHECK(x[static_cast<size_t>(c) * 7 + c] == 3);
  }
  SECTION("corner cell, l = 3, d = 8: two each, two stay") {
    CellId corner = *grid->find_cell({1, 0});
    d[c] = 0;
    d[corner] = 8;
    auto x = random_move(d, *grid);
    for (CellId j : grid->neighbors(corner))
      CHECK(x[static_cast<size_t>(corner) * 7 + j] == 2);
  }
}

TEST_CASE("random-move equals proportional-to-demand under uniform demand") {
  auto grid = testsupport::shared_grid(1);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<long long> entry(0, 9);
  std::vector<long long> d(7), r(7, 1);
  for (auto& v : d) v = entry(rng);
  CHECK(random_move(d, *grid) == proportional_to_demand(d, r, *grid));
}

TEST_CASE("both baselines are always feasible") {
  auto grid = testsupport::shared_grid(2);
  int n = grid->size();
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<long long> entry(0, 12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<long long> d(n), r(n);
    for (auto& v : d) v = entry(rng);
    for (auto& v : r) v = entry(rng);
    for (const auto& x : {proportional_to_demand(d, r, *grid), random_move(d, *grid)}) {
      const AdjacencyMatrix& L = grid->adjacency();
      for (CellId i = 0; i < n; ++i) {
        long long row = 0;
        for (CellId j = 0; j < n; ++j) {
          long long v = x[static_cast<size_t>(i) * n + j];
          CHECK(v >= 0);
          if (v > 0) CHECK(L(i, j) == 1);
          row += v;
        }
        CHECK(row == d[i]);  // stays booked on the diagonal
      }
    }
  }
}

TEST_CASE("size mismatches are rejected") {
  auto grid = testsupport::tiny_grid(2);
  CHECK_THROWS_AS(proportional_to_demand({1}, {1, 1}, *grid), std::invalid_argument);
  CHECK_THROWS_AS(random_move({1}, *grid), std::invalid_argument);
}
