#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "deltasim/rollout.hpp"
#include "deltasim/scenario.hpp"

namespace deltasim {

enum class Metric {
  speed = 0,
  accel,
  ang_speed,
  ang_accel,
  dist_nearest,
  collision,
  ttc,
  dist_road_edge,
  offroad,
};

inline constexpr int kMetricCount = 9;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::speed,        Metric::accel,    Metric::ang_speed,
    Metric::ang_accel,    Metric::dist_nearest, Metric::collision,
    Metric::ttc,          Metric::dist_road_edge, Metric::offroad,
};

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);
inline bool metric_is_boolean(Metric m) {
  return m == Metric::collision || m == Metric::offroad;
}

struct MetricParams {
  double d_cap = 40.0;           // nearest-object distance cap (m)
  double ttc_max = 5.0;          // time-to-collision cap (s)
  double ttc_min_closing = 0.1;  // closing speeds below this give ttc_max (m/s)
  double collision_tol = 1e-6;   // penetration below this is non-colliding (m)
};

// Per-agent per-timestep values with a matching validity mask.
struct SeriesGrid {
  int agents = 0;
  int steps = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  SeriesGrid() = default;
  SeriesGrid(int a, int t)
      : agents(a), steps(t),
        values(static_cast<std::size_t>(a) * t, 0.0),
        valid(static_cast<std::size_t>(a) * t, 0) {}

  std::size_t idx(int a, int t) const {
    return static_cast<std::size_t>(a) * steps + t;
  }
  double value(int a, int t) const { return values[idx(a, t)]; }
  bool is_valid(int a, int t) const { return valid[idx(a, t)] != 0; }
  void set(int a, int t, double v, bool ok) {
    values[idx(a, t)] = v;
    valid[idx(a, t)] = ok ? 1 : 0;
  }
};

struct ComponentSeries {
  Metric metric = Metric::speed;
  SeriesGrid grid;
};

struct SeriesSet {
  std::array<SeriesGrid, kMetricCount> grids;

  const SeriesGrid& of(Metric m) const { return grids[static_cast<int>(m)]; }
  SeriesGrid& of(Metric m) { return grids[static_cast<int>(m)]; }
};

// Timestep-major snapshot of every agent's future states.
struct StateGrid {
  int steps = 0;
  int agents = 0;
  std::vector<AgentState> states;  // [t][agent]

  const AgentState& at(int t, int a) const {
    return states[static_cast<std::size_t>(t) * agents + a];
  }
};

StateGrid gt_future_grid(const Scenario& s);
StateGrid rollout_grid(const RolloutSet& r, int k);

struct KinematicSeries {
  std::vector<double> speed, accel, ang_speed, ang_accel;
  std::vector<std::uint8_t> speed_valid, accel_valid, ang_speed_valid,
      ang_accel_valid;
};

// Finite-difference kinematics from positions and headings. Forward
// differences, backward at the final step; entries touching an invalid state
// are invalid.
KinematicSeries kinematic_series(std::span<const AgentState> track, double dt);

// Minimum oriented-box separation from the subject to any other valid agent,
// capped at d_cap. Subject must be valid at this snapshot.
double nearest_object_distance(std::span<const AgentState> states,
                               std::span<const AgentMeta> metas,
                               std::size_t subject,
                               const MetricParams& params = {});

// Forward-corridor time to collision, clamped to [0, ttc_max].
double time_to_collision(std::span<const AgentState> states,
                         std::span<const AgentMeta> metas, std::size_t subject,
                         const MetricParams& params = {});

// Signed distance to the nearest road edge: negative on the drivable (left of
// traversal) side. Throws Error when the map has no road edges.
double road_edge_distance(Vec2 position, const MapData& map);

OrientedBox agent_box(const AgentState& state, const AgentMeta& meta);

// All nine component series over one set of future tracks.
SeriesSet compute_series(const StateGrid& grid, std::span<const AgentMeta> metas,
                         const MapData& map, double dt,
                         const MetricParams& params = {});

// Mean over domain agents of the minimum-over-rollouts average displacement
// error against GT, measured on GT-valid future steps.
double min_ade(const RolloutSet& rollouts, const Scenario& scenario,
               std::span<const std::int64_t> domain);

// .metrics.csv rows: scenario_id, rollout_k, agent_id, t, metric, value, valid.
void write_metrics_csv_header(std::ostream& os);
void write_metrics_csv(std::ostream& os, const std::string& scenario_id,
                       int rollout_k, std::span<const AgentMeta> metas,
                       const SeriesSet& series);

}  // namespace deltasim
