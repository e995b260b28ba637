#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "fleetflow/simulator.hpp"
#include "support/instances.hpp"

using namespace fleetflow;

namespace {

Scenario base_scenario(int cells, int steps) {
  Scenario sc;
  sc.grid = testsupport::tiny_grid(cells);
  sc.steps_per_day = steps;
  sc.initial_drivers.assign(cells, 0);
  sc.cost_kappa = 0.5;
  return sc;
}

DispatchPolicy stay_policy(int n) {
  return [n](const std::vector<long long>&, const std::vector<long long>&, int) {
    return std::vector<long long>(static_cast<size_t>(n) * n, 0);
  };
}

}  // namespace

TEST_CASE("relative metrics conventions") {
  auto [profit, income] = relative_metrics(8.0, 2.0, 10.0);
  CHECK(profit == Catch::Approx(0.6));
  CHECK(income == Catch::Approx(0.8));
  // Empty day: both 1.0 by convention.
  auto [p0, i0] = relative_metrics(0.0, 0.0, 0.0);
  CHECK(p0 == 1.0);
  CHECK(i0 == 1.0);
}

TEST_CASE("driver multiplier floors per cell") {
  Scenario sc = base_scenario(2, 4);
  sc.initial_drivers = {5, 3};
  Scenario scaled = apply_driver_multiplier(sc, 0.5);
  CHECK(scaled.initial_drivers == std::vector<long long>{2, 1});
  CHECK(scaled.driver_multiplier == 0.5);
  CHECK_THROWS_AS(apply_driver_multiplier(sc, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_driver_multiplier(sc, 1.5), std::invalid_argument);
}

TEST_CASE("matching picks the most expensive requests") {
  std::vector<RideRequest> reqs = {{0, 0, 0, 0, 1.0},
                                   {0, 0, 0, 0, 9.0},
                                   {0, 0, 0, 0, 5.0},
                                   {0, 0, 0, 0, 7.0}};
  std::mt19937_64 rng(3);
  auto picked = match_requests(2, reqs, rng);
  REQUIRE(picked.size() == 2);
  double sum = reqs[picked[0]].price + reqs[picked[1]].price;
  CHECK(sum == Catch::Approx(16.0));  // 9 + 7, the top-2 subset
  // More idle drivers than requests: everything is served.
  std::mt19937_64 rng2(3);
  CHECK(match_requests(10, reqs, rng2).size() == 4);
}

TEST_CASE("step stage 1 validates the movement matrix") {
  Scenario sc = base_scenario(2, 2);
  sc.initial_drivers = {1, 0};
  sc.validate();
  std::vector<std::vector<size_t>> no_requests(2);

  SimState state;
  state.idle = sc.initial_drivers;
  state.in_transit.assign(3, std::vector<long long>(2, 0));

  SECTION("negative entry") {
    CHECK_THROWS_AS(step(state, sc, {0, -1, 0, 0}, no_requests), std::invalid_argument);
  }
  SECTION("moving more than idle") {
    CHECK_THROWS_AS(step(state, sc, {0, 2, 0, 0}, no_requests), std::invalid_argument);
  }
  SECTION("legal move accrues kappa-scaled cost") {
    StepReport rep = step(state, sc, {0, 1, 0, 0}, no_requests);
    CHECK(rep.reposition_cost == Catch::Approx(0.5));
    CHECK(state.idle == std::vector<long long>{0, 1});
  }
}

TEST_CASE("non-adjacent moves are rejected") {
  // Radius-1 grid: (1,0) and (-1,0) are 2 hops apart.
  Scenario sc;
  sc.grid = testsupport::shared_grid(1);
  sc.steps_per_day = 1;
  int n = sc.cell_count();
  sc.initial_drivers.assign(n, 1);
  CellId a = *sc.grid->find_cell({1, 0});
  CellId b = *sc.grid->find_cell({-1, 0});
  std::vector<long long> x(static_cast<size_t>(n) * n, 0);
  x[static_cast<size_t>(a) * n + b] = 1;
  SimState state;
  state.idle = sc.initial_drivers;
  state.in_transit.assign(2, std::vector<long long>(n, 0));
  std::vector<std::vector<size_t>> no_requests(n);
  CHECK_THROWS_AS(step(state, sc, x, no_requests), std::invalid_argument);
}

TEST_CASE("a same-step ride returns the driver next step") {
  Scenario sc = base_scenario(1, 3);
  sc.initial_drivers = {1};
  sc.requests = {{0, 0, 0, 0, 4.0}, {0, 0, 1, 1, 6.0}};
  sc.validate();
  Metrics m = run_day(sc, stay_policy(1), 0);
  // One driver serves at step 0, is back at step max(0, 1) = 1, serves again.
  CHECK(m.served_count == 2);
  CHECK(m.gmv == Catch::Approx(10.0));
}

TEST_CASE("a ride ending after the day removes the driver") {
  Scenario sc = base_scenario(1, 3);
  sc.initial_drivers = {1};
  sc.requests = {{0, 0, 0, 99, 4.0}, {0, 0, 1, 1, 6.0}};
  Metrics m = run_day(sc, stay_policy(1), 0);
  CHECK(m.served_count == 1);
  CHECK(m.gmv == Catch::Approx(4.0));
  CHECK(m.max_gmv == Catch::Approx(10.0));
  CHECK(m.relative_income == Catch::Approx(0.4));
}

TEST_CASE("unserved requests expire at the end of their start step") {
  Scenario sc = base_scenario(1, 3);
  sc.initial_drivers = {0};  // nobody to serve
  sc.requests = {{0, 0, 0, 0, 4.0}};
  Metrics m = run_day(sc, stay_policy(1), 0);
  CHECK(m.served_count == 0);
  CHECK(m.gmv == 0.0);
}

TEST_CASE("driver events apply at the start of their step, offline clamps at 0") {
  Scenario sc = base_scenario(1, 3);
  sc.initial_drivers = {0};
  sc.allow_online_offline = true;
  sc.online_events.assign(3, {0});
  sc.offline_events.assign(3, {0});
  sc.online_events[0][0] = 1;   // folded in before the day starts
  sc.offline_events[1][0] = 5;  // clamps to zero, not negative
  sc.online_events[2][0] = 2;
  sc.requests = {{0, 0, 0, 0, 1.0}, {0, 0, 1, 1, 1.0}, {0, 0, 2, 2, 1.0}};
  Metrics m = run_day(sc, stay_policy(1), 0);
  // Step 0: the online driver serves; back at step 1 but the offline event
  // removes it; step 2: two fresh drivers, one request.
  CHECK(m.per_step[0].served == 1);
  CHECK(m.per_step[1].served == 0);
  CHECK(m.per_step[2].served == 1);
}

TEST_CASE("events are ignored when allow_online_offline is false") {
  Scenario sc = base_scenario(1, 2);
  sc.initial_drivers = {0};
  sc.online_events.assign(2, {3});
  sc.offline_events.assign(2, {0});
  sc.requests = {{0, 0, 0, 0, 1.0}};
  Metrics m = run_day(sc, stay_policy(1), 0);
  CHECK(m.served_count == 0);
}

TEST_CASE("fleet conservation with a fixed fleet") {
  std::mt19937_64 seed_rng(123);
  Scenario sc = base_scenario(3, 6);
  sc.initial_drivers = {2, 1, 1};
  sc.requests = {{0, 1, 0, 1, 3.0}, {1, 2, 1, 2, 2.0}, {2, 0, 3, 4, 5.0}};
  sc.validate();
  long long fleet = 4;

  int n = 3;
  std::vector<std::vector<std::vector<size_t>>> by_step(6,
                                                        std::vector<std::vector<size_t>>(n));
  for (size_t id = 0; id < sc.requests.size(); ++id)
    by_step[sc.requests[id].start][sc.requests[id].dep].push_back(id);

  SimState state;
  state.idle = sc.initial_drivers;
  state.in_transit.assign(7, std::vector<long long>(n, 0));
  state.rng.seed(1);
  for (int t = 0; t < 6; ++t) {
    step(state, sc, std::vector<long long>(9, 0), by_step[t]);
    long long idle = std::accumulate(state.idle.begin(), state.idle.end(), 0LL);
    CHECK(idle + state.in_transit_total() == fleet);
  }
}

TEST_CASE("identical seeds reproduce metrics bit for bit") {
  Scenario sc = base_scenario(2, 4);
  sc.initial_drivers = {1, 1};
  // Price ties make the shuffle matter.
  sc.requests = {{0, 1, 0, 1, 2.0}, {0, 0, 0, 0, 2.0}, {1, 0, 1, 2, 3.0},
                 {0, 1, 2, 3, 2.0}, {1, 1, 2, 2, 2.0}};
  auto pol = stay_policy(2);
  Metrics a = run_day(sc, pol, 42);
  Metrics b = run_day(sc, pol, 42);
  CHECK(a.gmv == b.gmv);
  CHECK(a.reposition_cost == b.reposition_cost);
  CHECK(a.served_count == b.served_count);
  REQUIRE(a.per_step.size() == b.per_step.size());
  for (size_t t = 0; t < a.per_step.size(); ++t)
    CHECK(a.per_step[t].matched_request_ids == b.per_step[t].matched_request_ids);
}

TEST_CASE("policy exceptions are wrapped with the step index") {
  Scenario sc = base_scenario(1, 2);
  sc.initial_drivers = {1};
  DispatchPolicy bad = [](const std::vector<long long>&, const std::vector<long long>&,
                          int) -> std::vector<long long> {
    throw std::runtime_error("boom");
  };
  CHECK_THROWS_WITH(run_day(sc, bad, 0), Catch::Matchers::ContainsSubstring("step 0"));
}

TEST_CASE("scenario validation catches malformed input") {
  Scenario sc = base_scenario(2, 2);
  sc.initial_drivers = {0};  // wrong size
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.initial_drivers = {0, 0};
  sc.requests = {{0, 5, 0, 0, 1.0}};  // unknown cell
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.requests = {{0, 1, 1, 0, 1.0}};  // ends before start
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.requests = {{0, 1, 5, 5, 1.0}};  // start out of range
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}
