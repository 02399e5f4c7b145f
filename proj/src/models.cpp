#include "deltasim/models.hpp"

#include <algorithm>
#include <cmath>

#include "deltasim/errors.hpp"
#include "deltasim/toy_model.hpp"

namespace deltasim {

std::optional<Action> reconstruct_gt_action(const Scenario& scenario,
                                            std::size_t agent_idx,
                                            int current_abs_step,
                                            const AgentState& current) {
  const int next = current_abs_step + 1;
  if (next >= scenario.total_len()) return std::nullopt;
  const AgentState& target = scenario.agents[agent_idx].track[next];
  if (!target.valid) return std::nullopt;
  Action a;
  a.acceleration = (target.speed() - current.speed()) / scenario.dt;
  a.yaw_rate = wrap_angle(target.heading - current.heading) / scenario.dt;
  // Deadband: rounding residue from speed/heading round trips would
  // otherwise jitter the sign of exact-zero GT actions.
  if (std::abs(a.acceleration) < 1e-9) a.acceleration = 0.0;
  if (std::abs(a.yaw_rate) < 1e-9) a.yaw_rate = 0.0;
  return clamp_action(a);
}

std::optional<Action> gt_action_label(const Scenario& scenario,
                                      std::size_t agent_idx, int abs_step) {
  if (abs_step + 1 >= scenario.total_len()) return std::nullopt;
  const AgentState& cur = scenario.agents[agent_idx].track[abs_step];
  if (!cur.valid) return std::nullopt;
  return reconstruct_gt_action(scenario, agent_idx, abs_step, cur);
}

Action GtActionModel::act(const Observation& obs, std::int64_t agent_id,
                          RandomStream&) const {
  const auto idx = obs.index_of(agent_id);
  if (!idx) return {};
  const auto action =
      reconstruct_gt_action(*scenario_, *idx, obs.step(), obs.state(*idx));
  return action.value_or(Action{});
}

CorridorLead corridor_lead(const Observation& obs, std::size_t subject_idx,
                           double gap_cap) {
  CorridorLead lead;
  lead.gap = gap_cap;
  const AgentState& self = obs.state(subject_idx);
  const Vec2 dir = heading_dir(self.heading);
  const Vec2 lat = dir.left();
  for (std::size_t i = 0; i < obs.agent_count(); ++i) {
    if (i == subject_idx || !obs.state(i).valid) continue;
    const AgentState& other = obs.state(i);
    const Vec2 rel = other.position - self.position;
    const double dx = rel.dot(dir);
    if (dx <= 0.0) continue;
    const double dy = rel.dot(lat);
    if (std::abs(dy) >= 0.5 * (obs.meta(subject_idx).width + obs.meta(i).width)) {
      continue;
    }
    const Vec2 other_dir = heading_dir(other.heading);
    const double other_half =
        0.5 * obs.meta(i).length * std::abs(dir.dot(other_dir)) +
        0.5 * obs.meta(i).width * std::abs(dir.dot(other_dir.left()));
    const double gap = std::clamp(dx - 0.5 * obs.meta(subject_idx).length - other_half,
                                  0.0, gap_cap);
    if (gap < lead.gap || !lead.found) {
      lead.gap = gap;
      lead.closing = (self.velocity - other.velocity).dot(dir);
      lead.found = true;
    }
  }
  return lead;
}

AggressiveFollowerModel::AggressiveFollowerModel(const Scenario& scenario) {
  target_speed_.reserve(scenario.agents.size());
  for (const Agent& a : scenario.agents) {
    target_speed_.push_back(1.4 * a.track[scenario.current_index()].speed());
  }
}

Action AggressiveFollowerModel::act(const Observation& obs,
                                    std::int64_t agent_id, RandomStream& rng) const {
  const auto idx = obs.index_of(agent_id);
  if (!idx) return {};
  const AgentState& state = obs.state(*idx);
  Action a;
  a.acceleration =
      1.5 * (target_speed_[*idx] - state.speed()) + 0.3 * rng.next_normal();
  const LaneFrame lane = lane_frame(obs.map(), state.position, state.heading);
  if (lane.found) {
    a.yaw_rate = -0.2 * lane.lateral_offset - 1.0 * lane.heading_error +
                 0.01 * rng.next_normal();
  }
  // Tailgates up to a panic distance; braking from there is enough to hang
  // just off a moving lead and far too late behind a stopped one. The panic
  // also holds while boxes overlap so a rear-ended lead pins it in place.
  const CorridorLead lead = corridor_lead(obs, *idx);
  bool panic = lead.found && lead.gap < 3.0;
  if (!panic) {
    const OrientedBox own{state.position, state.heading, obs.meta(*idx).length,
                          obs.meta(*idx).width};
    for (std::size_t i = 0; i < obs.agent_count() && !panic; ++i) {
      if (i == *idx || !obs.state(i).valid) continue;
      panic = boxes_collide(own, {obs.state(i).position, obs.state(i).heading,
                                  obs.meta(i).length, obs.meta(i).width});
    }
  }
  if (panic) a.acceleration = -8.0;
  return clamp_action(a);
}

LaneFrame lane_frame(const MapData& map, Vec2 position, double heading) {
  LaneFrame out;
  if (map.lane_centers.empty()) return out;
  const PolylineHit hit = nearest_on_polylines(position, map.lane_centers);
  const Polyline& line = map.lane_centers[hit.polyline];
  const Vec2 a = line[hit.segment];
  const Vec2 b = line[hit.segment + 1];
  const Vec2 dir = b - a;
  // Left of the lane's traversal direction is positive.
  out.lateral_offset = -hit.signed_distance;
  out.heading_error = wrap_angle(heading - std::atan2(dir.y, dir.x));
  out.found = true;
  return out;
}

namespace {

class ReplayFactory : public ModelFactory {
 public:
  std::unique_ptr<WorldModel> create(const Scenario&) const override {
    return std::make_unique<GtReplayModel>();
  }
  std::string name() const override { return "replay"; }
};

class GtActionFactory : public ModelFactory {
 public:
  std::unique_ptr<WorldModel> create(const Scenario& s) const override {
    return std::make_unique<GtActionModel>(s);
  }
  std::string name() const override { return "open_loop"; }
};

class AggressiveFactory : public ModelFactory {
 public:
  std::unique_ptr<WorldModel> create(const Scenario& s) const override {
    return std::make_unique<AggressiveFollowerModel>(s);
  }
  std::string name() const override { return "aggressive_follower"; }
};

}  // namespace

std::unique_ptr<ModelFactory> make_model_factory(const std::string& spec) {
  if (spec == "replay") return std::make_unique<ReplayFactory>();
  if (spec == "open_loop") return std::make_unique<GtActionFactory>();
  if (spec == "aggressive_follower") return std::make_unique<AggressiveFactory>();
  return std::make_unique<ToyModelFactory>(load_params_file(spec));
}

}  // namespace deltasim
