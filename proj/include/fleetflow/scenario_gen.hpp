#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "fleetflow/grid.hpp"
#include "fleetflow/simulator.hpp"

namespace fleetflow {

/// Knobs for synthetic day generation. Demand is Poisson per (cell, step)
/// with a rate shaped by a time-of-day profile and a center-heavy spatial
/// falloff; prices grow linearly in trip distance.
struct ScenarioGenSpec {
  int grid_radius = 3;
  std::vector<AxialCoord> blocked;
  int steps_per_day = 144;

  double demand_rate = 0.2;        // mean requests per cell per step, before shaping
  double center_bias = 0.5;        // in [0,1]; 0 = uniform, 1 = strongly central
  bool rush_hours = true;          // morning/evening demand peaks

  double price_base = 2.0;         // flag fall
  double price_per_hop = 1.5;      // times trip hex distance
  int max_trip_distance = 0;       // 0 = up to the grid diameter

  long long total_drivers = 60;
  double cost_kappa = 0.5;         // reposition cost per hex hop

  double online_rate = 0.0;        // mean drivers going online per cell per step
  double offline_rate = 0.0;
};

namespace detail {

/// Two-peak day profile in [0.25, 1]; flat 1.0 when disabled.
inline double day_profile(int t, int T, bool rush_hours) {
  if (!rush_hours) return 1.0;
  double h = 24.0 * t / T;
  auto peak = [](double h, double center) {
    double d = h - center;
    return std::exp(-d * d / 8.0);
  };
  return 0.25 + 0.75 * std::min(1.0, peak(h, 8.5) + peak(h, 17.5));
}

}  // namespace detail

/// Builds a full synthetic day, deterministic in (spec, seed).
inline Scenario generate_scenario(const ScenarioGenSpec& spec, uint64_t seed) {
  if (spec.demand_rate < 0 || spec.online_rate < 0 || spec.offline_rate < 0)
    throw std::invalid_argument("rates must be nonnegative");
  if (spec.total_drivers < 0) throw std::invalid_argument("negative driver count");
  if (spec.center_bias < 0 || spec.center_bias > 1)
    throw std::invalid_argument("center_bias must lie in [0, 1]");

  Scenario sc;
  sc.grid = std::make_shared<HexGrid>(build_hex_grid(
      spec.grid_radius, {spec.blocked.begin(), spec.blocked.end()}));
  sc.steps_per_day = spec.steps_per_day;
  sc.cost_kappa = spec.cost_kappa;
  int n = sc.cell_count();
  int T = sc.steps_per_day;
  std::mt19937_64 rng(seed);

  // Spatial demand weight: cells near the origin attract more trips.
  AxialCoord center{0, 0};
  std::vector<double> weight(n);
  for (CellId i = 0; i < n; ++i) {
    double dist = hex_distance(sc.grid->coord(i), center);
    weight[i] = 1.0 - spec.center_bias * dist / std::max(1, spec.grid_radius + 1);
  }

  int max_dist = spec.max_trip_distance > 0 ? spec.max_trip_distance
                                            : sc.grid->graph_diameter();

  // Destination choice: same center-weighted distribution, any cell.
  std::discrete_distribution<int> dest_pick(weight.begin(), weight.end());

  for (int t = 0; t < T; ++t) {
    double shape = detail::day_profile(t, T, spec.rush_hours);
    for (CellId i = 0; i < n; ++i) {
      std::poisson_distribution<int> count(spec.demand_rate * shape * weight[i]);
      int m = count(rng);
      for (int a = 0; a < m; ++a) {
        RideRequest r;
        r.dep = i;
        r.start = t;
        r.dest = static_cast<CellId>(dest_pick(rng));
        int dist = std::min(max_dist,
                            sc.grid->bfs_distance(r.dep, r.dest));
        int duration = std::max(1, dist);
        r.end = t + duration;
        r.price = spec.price_base + spec.price_per_hop * dist;
        sc.requests.push_back(r);
      }
    }
  }

  // Drivers start spread by the same spatial weight.
  sc.initial_drivers.assign(n, 0);
  std::discrete_distribution<int> driver_pick(weight.begin(), weight.end());
  for (long long d = 0; d < spec.total_drivers; ++d)
    sc.initial_drivers[driver_pick(rng)] += 1;

  if (spec.online_rate > 0 || spec.offline_rate > 0) {
    sc.allow_online_offline = true;
    sc.online_events.assign(T, std::vector<long long>(n, 0));
    sc.offline_events.assign(T, std::vector<long long>(n, 0));
    std::poisson_distribution<int> on(spec.online_rate);
    std::poisson_distribution<int> off(spec.offline_rate);
    for (int t = 0; t < T; ++t)
      for (CellId i = 0; i < n; ++i) {
        if (spec.online_rate > 0) sc.online_events[t][i] = on(rng);
        if (spec.offline_rate > 0) sc.offline_events[t][i] = off(rng);
      }
  }

  sc.validate();
  return sc;
}

}  // namespace fleetflow
