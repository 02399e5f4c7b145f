#include "deltasim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deltasim/errors.hpp"
#include "deltasim/format.hpp"

namespace deltasim {

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::speed: return "speed";
    case Metric::accel: return "accel";
    case Metric::ang_speed: return "ang_speed";
    case Metric::ang_accel: return "ang_accel";
    case Metric::dist_nearest: return "dist_nearest";
    case Metric::collision: return "collision";
    case Metric::ttc: return "ttc";
    case Metric::dist_road_edge: return "dist_road_edge";
    case Metric::offroad: return "offroad";
  }
  return "speed";
}

Metric metric_from_name(const std::string& name) {
  for (Metric m : kAllMetrics) {
    if (name == metric_name(m)) return m;
  }
  throw ParseError("unknown metric: " + name);
}

StateGrid gt_future_grid(const Scenario& s) {
  StateGrid g;
  g.steps = s.future_len;
  g.agents = static_cast<int>(s.agents.size());
  g.states.reserve(static_cast<std::size_t>(g.steps) * g.agents);
  for (int t = 0; t < g.steps; ++t) {
    for (int a = 0; a < g.agents; ++a) {
      g.states.push_back(s.agents[a].track[s.history_len + t]);
    }
  }
  return g;
}

StateGrid rollout_grid(const RolloutSet& r, int k) {
  StateGrid g;
  g.steps = r.future_len;
  g.agents = r.agent_count;
  g.states.reserve(static_cast<std::size_t>(g.steps) * g.agents);
  for (int t = 0; t < g.steps; ++t) {
    for (int a = 0; a < g.agents; ++a) g.states.push_back(r.at(k, t, a));
  }
  return g;
}

KinematicSeries kinematic_series(std::span<const AgentState> track, double dt) {
  const int n = static_cast<int>(track.size());
  KinematicSeries out;
  out.speed.assign(n, 0.0);
  out.ang_speed.assign(n, 0.0);
  out.accel.assign(n, 0.0);
  out.ang_accel.assign(n, 0.0);
  out.speed_valid.assign(n, 0);
  out.ang_speed_valid.assign(n, 0);
  out.accel_valid.assign(n, 0);
  out.ang_accel_valid.assign(n, 0);
  if (n < 2) return out;

  // Quantization floor: finite differences of near-identical trajectories
  // carry +-1e-14 rounding residue, and exact-zero kinematics sit on
  // histogram bin edges, so the residue must not leak a sign.
  auto snap = [](double v) { return std::abs(v) < 1e-9 ? 0.0 : v; };
  auto pair_for = [&](int t) {
    // Forward difference; the last step reuses the final pair backward.
    return t + 1 < n ? std::pair<int, int>{t, t + 1} : std::pair<int, int>{t - 1, t};
  };
  for (int t = 0; t < n; ++t) {
    const auto [i, j] = pair_for(t);
    if (!track[i].valid || !track[j].valid) continue;
    out.speed[t] = snap((track[j].position - track[i].position).norm() / dt);
    out.speed_valid[t] = 1;
    out.ang_speed[t] = snap(wrap_angle(track[j].heading - track[i].heading) / dt);
    out.ang_speed_valid[t] = 1;
  }
  for (int t = 0; t < n; ++t) {
    const auto [i, j] = pair_for(t);
    if (!out.speed_valid[i] || !out.speed_valid[j]) continue;
    out.accel[t] = snap((out.speed[j] - out.speed[i]) / dt);
    out.accel_valid[t] = 1;
    out.ang_accel[t] = snap((out.ang_speed[j] - out.ang_speed[i]) / dt);
    out.ang_accel_valid[t] = 1;
  }
  return out;
}

OrientedBox agent_box(const AgentState& state, const AgentMeta& meta) {
  return {state.position, state.heading, meta.length, meta.width};
}

double nearest_object_distance(std::span<const AgentState> states,
                               std::span<const AgentMeta> metas,
                               std::size_t subject, const MetricParams& params) {
  const OrientedBox box = agent_box(states[subject], metas[subject]);
  double best = params.d_cap;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i == subject || !states[i].valid) continue;
    best = std::min(best, box_distance(box, agent_box(states[i], metas[i])));
  }
  return best;
}

double time_to_collision(std::span<const AgentState> states,
                         std::span<const AgentMeta> metas, std::size_t subject,
                         const MetricParams& params) {
  const AgentState& subj = states[subject];
  const Vec2 dir = heading_dir(subj.heading);
  const Vec2 lat = dir.left();
  double best = params.ttc_max;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i == subject || !states[i].valid) continue;
    const Vec2 rel = states[i].position - subj.position;
    const double dx = rel.dot(dir);
    if (dx <= 0.0) continue;
    const double dy = rel.dot(lat);
    if (std::abs(dy) >= 0.5 * (metas[subject].width + metas[i].width)) continue;
    const Vec2 other_dir = heading_dir(states[i].heading);
    const double other_half =
        0.5 * metas[i].length * std::abs(dir.dot(other_dir)) +
        0.5 * metas[i].width * std::abs(dir.dot(other_dir.left()));
    const double gap = std::max(0.0, dx - 0.5 * metas[subject].length - other_half);
    const double closing = (subj.velocity - states[i].velocity).dot(dir);
    if (closing <= params.ttc_min_closing) continue;
    best = std::min(best, gap / closing);
  }
  return std::clamp(best, 0.0, params.ttc_max);
}

double road_edge_distance(Vec2 position, const MapData& map) {
  if (map.road_edges.empty()) throw Error("no road edges");
  return nearest_on_polylines(position, map.road_edges).signed_distance;
}

SeriesSet compute_series(const StateGrid& grid, std::span<const AgentMeta> metas,
                         const MapData& map, double dt,
                         const MetricParams& params) {
  const int A = grid.agents;
  const int T = grid.steps;
  SeriesSet out;
  for (SeriesGrid& g : out.grids) g = SeriesGrid(A, T);

  std::vector<AgentState> column(T);
  for (int a = 0; a < A; ++a) {
    for (int t = 0; t < T; ++t) column[t] = grid.at(t, a);
    const KinematicSeries kin = kinematic_series(column, dt);
    for (int t = 0; t < T; ++t) {
      out.of(Metric::speed).set(a, t, kin.speed[t], kin.speed_valid[t]);
      out.of(Metric::accel).set(a, t, kin.accel[t], kin.accel_valid[t]);
      out.of(Metric::ang_speed).set(a, t, kin.ang_speed[t], kin.ang_speed_valid[t]);
      out.of(Metric::ang_accel).set(a, t, kin.ang_accel[t], kin.ang_accel_valid[t]);
    }
  }

  const bool have_edges = !map.road_edges.empty();
  for (int t = 0; t < T; ++t) {
    const std::span<const AgentState> snapshot(&grid.at(t, 0),
                                               static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a) {
      if (!snapshot[a].valid) continue;
      out.of(Metric::dist_nearest)
          .set(a, t, nearest_object_distance(snapshot, metas, a, params), true);
      const OrientedBox box = agent_box(snapshot[a], metas[a]);
      bool hit = false;
      for (int b = 0; b < A && !hit; ++b) {
        if (b == a || !snapshot[b].valid) continue;
        hit = boxes_collide(box, agent_box(snapshot[b], metas[b]),
                            params.collision_tol);
      }
      out.of(Metric::collision).set(a, t, hit ? 1.0 : 0.0, true);
      out.of(Metric::ttc).set(a, t, time_to_collision(snapshot, metas, a, params),
                              true);
      if (have_edges) {
        const double signed_d = road_edge_distance(snapshot[a].position, map);
        out.of(Metric::dist_road_edge).set(a, t, signed_d, true);
        out.of(Metric::offroad).set(a, t, signed_d > 0.0 ? 1.0 : 0.0, true);
      }
    }
  }
  return out;
}

double min_ade(const RolloutSet& rollouts, const Scenario& scenario,
               std::span<const std::int64_t> domain) {
  if (domain.empty()) throw ValidationError("empty minADE domain");
  if (rollouts.scenario_id != scenario.id ||
      rollouts.agent_count != static_cast<int>(scenario.agents.size())) {
    throw ValidationError("rollouts do not match scenario");
  }
  double total = 0.0;
  int counted = 0;
  for (const std::int64_t id : domain) {
    const auto idx = scenario.agent_index(id);
    if (!idx) throw ValidationError("domain agent missing from rollouts");
    const int a = static_cast<int>(*idx);
    double best = std::numeric_limits<double>::infinity();
    bool any_steps = false;
    for (int k = 0; k < rollouts.K; ++k) {
      double sum = 0.0;
      int n = 0;
      for (int t = 0; t < rollouts.future_len; ++t) {
        const AgentState& gt = scenario.agents[a].track[scenario.history_len + t];
        if (!gt.valid) continue;
        sum += (rollouts.at(k, t, a).position - gt.position).norm();
        ++n;
      }
      if (n == 0) continue;
      any_steps = true;
      best = std::min(best, sum / n);
    }
    if (!any_steps) continue;  // no GT-valid future steps for this agent
    total += best;
    ++counted;
  }
  return counted > 0 ? total / counted : 0.0;
}

void write_metrics_csv_header(std::ostream& os) {
  os << "scenario_id,rollout_k,agent_id,t,metric,value,valid\n";
}

void write_metrics_csv(std::ostream& os, const std::string& scenario_id,
                       int rollout_k, std::span<const AgentMeta> metas,
                       const SeriesSet& series) {
  for (Metric m : kAllMetrics) {
    const SeriesGrid& g = series.of(m);
    for (int a = 0; a < g.agents; ++a) {
      for (int t = 0; t < g.steps; ++t) {
        os << scenario_id << ',' << rollout_k << ',' << metas[a].id << ',' << t
           << ',' << metric_name(m) << ',' << fmt_double(g.value(a, t)) << ','
           << (g.is_valid(a, t) ? 1 : 0) << '\n';
      }
    }
  }
}

}  // namespace deltasim
