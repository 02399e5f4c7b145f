#include "deltasim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "deltasim/errors.hpp"
#include "deltasim/rng.hpp"
#include "deltasim/rollout.hpp"

namespace deltasim {

const char* template_kind_name(TemplateKind t) {
  switch (t) {
    case TemplateKind::leader_follower_signal: return "leader_follower_signal";
    case TemplateKind::crossing_intersection: return "crossing_intersection";
    case TemplateKind::lane_merge: return "lane_merge";
    case TemplateKind::mixed: return "mixed";
  }
  return "mixed";
}

TemplateKind template_kind_from_name(const std::string& name) {
  if (name == "leader_follower_signal") return TemplateKind::leader_follower_signal;
  if (name == "crossing_intersection") return TemplateKind::crossing_intersection;
  if (name == "lane_merge") return TemplateKind::lane_merge;
  if (name == "mixed") return TemplateKind::mixed;
  throw ConfigError("unknown scenario template: " + name);
}

namespace {

AgentState make_state(double x, double y, double heading, double speed) {
  AgentState s;
  s.position = {x, y};
  s.heading = heading;
  s.velocity = heading_dir(heading) * speed;
  s.valid = true;
  return s;
}

AgentMeta vehicle_meta(std::int64_t id, RandomStream& rng, bool ego, bool eval,
                       bool causal) {
  AgentMeta m;
  m.id = id;
  m.kind = AgentKind::vehicle;
  m.length = rng.next_uniform(4.2, 5.0);
  m.width = rng.next_uniform(1.8, 2.1);
  m.is_ego = ego;
  m.in_eval_set = eval;
  m.is_causal = causal;
  return m;
}

// Constant-deceleration stop at target_x for an agent heading along +x.
double stop_accel(double x, double speed, double target_x, double dt) {
  if (speed <= 1e-9) return 0.0;
  const double rem = target_x - x;
  if (rem <= std::max(0.05, 1.5 * speed * dt)) {
    return -std::min(8.0, speed / dt);
  }
  return -std::min(8.0, speed * speed / (2.0 * rem));
}

// Integrates a straight-lane track with a per-step acceleration decision.
template <typename AccelFn>
std::vector<AgentState> integrate_straight(AgentState start, int total, double dt,
                                           AccelFn accel_of) {
  std::vector<AgentState> track;
  track.reserve(total);
  track.push_back(start);
  for (int s = 0; s + 1 < total; ++s) {
    track.push_back(advance_state(track.back(), {accel_of(s, track.back()), 0.0}, dt));
  }
  return track;
}

std::vector<SignalState> signal_phases(int total, int yellow_at, int yellow_len) {
  std::vector<SignalState> states(total, SignalState::green);
  for (int s = yellow_at; s < total; ++s) {
    states[s] = s < yellow_at + yellow_len ? SignalState::yellow : SignalState::red;
  }
  return states;
}

// Ego brakes for a mid-scenario yellow light; a causal follower stops behind
// it with a positive margin; an oncoming eval-set vehicle cruises past.
// Half the scenes are yellow-light dilemmas where the ego is close enough to
// run the light instead; nothing observable to a model separates the two
// cases, so stop-or-go is learnable only as an average.
Scenario leader_follower_signal(RandomStream& rng, const GeneratorConfig& cfg) {
  Scenario scn;
  scn.dt = cfg.dt;
  scn.history_len = cfg.history_len;
  scn.future_len = cfg.future_len;
  const int total = scn.total_len();
  const double dt = cfg.dt;

  AgentMeta ego_meta = vehicle_meta(1, rng, true, true, false);
  AgentMeta fol_meta = vehicle_meta(2, rng, false, false, true);
  AgentMeta bys_meta = vehicle_meta(3, rng, false, true, false);

  const double v_ego = rng.next_uniform(8.0, 12.0);
  const double a_brake = rng.next_uniform(2.0, 3.5);
  const bool runs_light = rng.next_bernoulli(0.5);
  const double stop_line_x = 0.0;
  const double ego_stop_x = stop_line_x - 0.5 - 0.5 * ego_meta.length;
  const double brake_dist = v_ego * v_ego / (2.0 * a_brake);
  // Stop case: the yellow fires exactly one comfortable braking distance
  // out. Go case: it fires when the ego is nearly at the line.
  const double dist_at_yellow =
      runs_light ? rng.next_uniform(3.0, 8.0) : brake_dist;
  const int yellow_at = scn.history_len + static_cast<int>(rng.next_int(4, 14));
  const double ego_x0 = ego_stop_x - dist_at_yellow - v_ego * dt * yellow_at;

  auto ego_accel = [&](int s, const AgentState& st) {
    if (runs_light || s < yellow_at) return 0.0;
    return stop_accel(st.position.x, st.speed(), ego_stop_x, dt);
  };
  const std::vector<AgentState> ego_track =
      integrate_straight(make_state(ego_x0, 0.0, 0.0, v_ego), total, dt, ego_accel);
  const double ego_final_x = ego_track.back().position.x;

  // The follower queues well outside the signal's influence radius, so its
  // GT braking behind a stopping ego is explainable only by the lead
  // vehicle, not the light.
  double v_fol = v_ego + rng.next_uniform(-1.0, 1.0);
  const double gap0 = rng.next_uniform(24.0, 40.0);
  int delay = static_cast<int>(rng.next_int(1, 3));
  const double margin = rng.next_uniform(4.5, 7.0);
  const double fol_x0 =
      ego_x0 - (0.5 * ego_meta.length + 0.5 * fol_meta.length + gap0);

  std::vector<AgentState> fol_track;
  const double sep = 0.5 * (ego_meta.length + fol_meta.length);
  if (runs_light) {
    // The ego beats the red; the follower cannot and queues at the line.
    const double a_fol = rng.next_uniform(2.0, 3.5);
    const double fol_stop_x = stop_line_x - 0.5 - 0.5 * fol_meta.length;
    bool latched = false;
    auto fol_accel = [&](int s, const AgentState& st) {
      const double rem = fol_stop_x - st.position.x;
      const double v = st.speed();
      if (!latched) {
        if (s < yellow_at || rem > v * v / (2.0 * a_fol)) return 0.0;
        latched = true;
      }
      return stop_accel(st.position.x, v, fol_stop_x, dt);
    };
    fol_track = integrate_straight(make_state(fol_x0, 0.0, 0.0, v_fol), total, dt,
                                   fol_accel);
  } else {
    for (int attempt = 0; attempt < 24; ++attempt) {
      const double fol_stop_x = ego_final_x - sep - margin;
      const int brake_at = yellow_at + delay;
      const double x_at_brake = fol_x0 + v_fol * dt * brake_at;
      const double dist = fol_stop_x - x_at_brake;
      if (dist <= 1.0 || v_fol * v_fol / (2.0 * dist) > 6.0) {
        if (delay > 0) {
          --delay;
        } else {
          v_fol *= 0.92;
        }
        continue;
      }
      auto fol_accel = [&](int s, const AgentState& st) {
        if (s < brake_at) return 0.0;
        return stop_accel(st.position.x, st.speed(), fol_stop_x, dt);
      };
      fol_track = integrate_straight(make_state(fol_x0, 0.0, 0.0, v_fol), total,
                                     dt, fol_accel);
      double min_gap = std::numeric_limits<double>::infinity();
      for (int s = 0; s < total; ++s) {
        min_gap = std::min(min_gap,
                           ego_track[s].position.x - fol_track[s].position.x - sep);
      }
      if (min_gap > 0.3) break;
      fol_track.clear();
      if (delay > 0) {
        --delay;
      } else {
        v_fol *= 0.92;
      }
    }
    if (fol_track.empty()) {
      throw Error("leader_follower_signal: no safe follower plan");
    }
  }

  const double v_bys = rng.next_uniform(7.0, 10.0);
  const double bys_x0 = rng.next_uniform(25.0, 60.0);
  const double wobble = rng.next_uniform(0.0, 0.3);
  const double phase = rng.next_uniform(0.0, 2.0 * kPi);
  auto bys_accel = [&](int s, const AgentState&) {
    return wobble * std::sin(2.0 * kPi * s / 40.0 + phase);
  };
  const std::vector<AgentState> bys_track = integrate_straight(
      make_state(bys_x0, 4.0, kPi, v_bys), total, dt, bys_accel);

  double x_min = std::min({ego_x0, fol_x0, bys_track.back().position.x});
  double x_max = std::max({100.0, bys_x0});
  x_min -= 60.0;
  x_max += 60.0;
  scn.map.road_edges = {{{x_min, -2.3}, {x_max, -2.3}},
                        {{x_max, 6.3}, {x_min, 6.3}}};
  scn.map.lane_centers = {{{x_min, 0.0}, {x_max, 0.0}},
                          {{x_max, 4.0}, {x_min, 4.0}}};
  scn.signals.push_back(
      {{stop_line_x, 0.0}, 0, signal_phases(total, yellow_at, 30)});

  scn.agents.push_back({ego_meta, ego_track});
  scn.agents.push_back({fol_meta, fol_track});
  scn.agents.push_back({bys_meta, bys_track});
  return scn;
}

// Two perpendicular roads; ego and a causal crossing vehicle pass the same
// conflict point with a safe time offset; a trailing vehicle follows the ego.
Scenario crossing_intersection(RandomStream& rng, const GeneratorConfig& cfg) {
  Scenario scn;
  scn.dt = cfg.dt;
  scn.history_len = cfg.history_len;
  scn.future_len = cfg.future_len;
  const int total = scn.total_len();
  const double dt = cfg.dt;

  AgentMeta ego_meta = vehicle_meta(1, rng, true, true, false);
  AgentMeta cross_meta = vehicle_meta(2, rng, false, true, true);
  AgentMeta trail_meta = vehicle_meta(3, rng, false, true, false);

  const double v_ego = rng.next_uniform(8.0, 12.0);
  const int ego_cross_step = scn.history_len + static_cast<int>(rng.next_int(30, 50));
  const double ego_x0 = -v_ego * dt * ego_cross_step;
  const double wobble = rng.next_uniform(0.0, 0.3);
  const double phase = rng.next_uniform(0.0, 2.0 * kPi);
  auto ego_accel = [&](int s, const AgentState&) {
    return wobble * std::sin(2.0 * kPi * s / 40.0 + phase);
  };
  const std::vector<AgentState> ego_track =
      integrate_straight(make_state(ego_x0, 0.0, 0.0, v_ego), total, dt, ego_accel);

  const double v_cross = rng.next_uniform(7.0, 11.0);
  const int offset = static_cast<int>(rng.next_int(15, 30));
  const int cross_step =
      rng.next_bernoulli(0.5) ? ego_cross_step - offset : ego_cross_step + offset;
  const double cross_y0 = -v_cross * dt * cross_step;
  const std::vector<AgentState> cross_track = integrate_straight(
      make_state(0.0, cross_y0, 0.5 * kPi, v_cross), total, dt,
      [](int, const AgentState&) { return 0.0; });

  const double v_trail = v_ego + rng.next_uniform(-0.5, 0.5);
  const double trail_x0 = ego_x0 - 0.5 * (ego_meta.length + trail_meta.length) -
                          rng.next_uniform(15.0, 30.0);
  const std::vector<AgentState> trail_track = integrate_straight(
      make_state(trail_x0, 0.0, 0.0, v_trail), total, dt,
      [](int, const AgentState&) { return 0.0; });

  const double ext = 160.0;
  // Road edges break at the intersection box so corner regions stay onroad.
  scn.map.road_edges = {
      {{-ext, -2.3}, {-2.3, -2.3}},
      {{6.3, -2.3}, {ext, -2.3}},
      {{ext, 6.3}, {6.3, 6.3}},
      {{-2.3, 6.3}, {-ext, 6.3}},
      {{-2.3, ext}, {-2.3, 6.3}},
      {{-2.3, -2.3}, {-2.3, -ext}},
      {{6.3, -ext}, {6.3, -2.3}},
      {{6.3, 6.3}, {6.3, ext}},
  };
  scn.map.lane_centers = {
      {{-ext, 0.0}, {ext, 0.0}},
      {{ext, 4.0}, {-ext, 4.0}},
      {{0.0, -ext}, {0.0, ext}},
      {{4.0, ext}, {4.0, -ext}},
  };
  scn.signals.push_back({{-2.3, 0.0}, 0, std::vector<SignalState>(total, SignalState::green)});
  scn.signals.push_back({{0.0, -2.3}, 2, std::vector<SignalState>(total, SignalState::green)});

  scn.agents.push_back({ego_meta, ego_track});
  scn.agents.push_back({cross_meta, cross_track});
  scn.agents.push_back({trail_meta, trail_track});
  return scn;
}

// A causal vehicle merges from the adjacent lane ahead of the ego, which
// opens the gap; a far lead vehicle leaves perception range near the end.
Scenario lane_merge(RandomStream& rng, const GeneratorConfig& cfg) {
  Scenario scn;
  scn.dt = cfg.dt;
  scn.history_len = cfg.history_len;
  scn.future_len = cfg.future_len;
  const int total = scn.total_len();
  const double dt = cfg.dt;

  AgentMeta ego_meta = vehicle_meta(1, rng, true, true, false);
  AgentMeta merge_meta = vehicle_meta(2, rng, false, true, true);
  AgentMeta lead_meta = vehicle_meta(3, rng, false, true, false);

  const double v_ego = rng.next_uniform(8.0, 12.0);
  const double v_merge = rng.next_uniform(8.0, 12.0);
  const int merge_at = scn.history_len + static_cast<int>(rng.next_int(10, 30));
  const int merge_len = static_cast<int>(rng.next_int(20, 30));
  const double ego_x0 = 0.0;
  const double merge_x0 = ego_x0 + 0.5 * (ego_meta.length + merge_meta.length) +
                          rng.next_uniform(8.0, 15.0);

  // Calibrate the yaw amplitude so the S-curve drops exactly one lane.
  auto lateral_drop = [&](double amp) {
    AgentState st = make_state(merge_x0, 4.0, 0.0, v_merge);
    for (int s = 0; s < merge_len; ++s) {
      const double yaw = -amp * std::sin(2.0 * kPi * s / merge_len);
      st = advance_state(st, {0.0, yaw}, dt);
    }
    return st.position.y - 4.0;
  };
  double lo = 0.0, hi = 1.8;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lateral_drop(mid) > -4.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double amp = 0.5 * (lo + hi);

  std::vector<AgentState> merge_track;
  merge_track.reserve(total);
  merge_track.push_back(make_state(merge_x0, 4.0, 0.0, v_merge));
  for (int s = 0; s + 1 < total; ++s) {
    double yaw = 0.0;
    if (s >= merge_at && s < merge_at + merge_len) {
      yaw = -amp * std::sin(2.0 * kPi * (s - merge_at) / merge_len);
    }
    merge_track.push_back(advance_state(merge_track.back(), {0.0, yaw}, dt));
  }

  const int react_at = merge_at + merge_len / 2;
  const double a_react = rng.next_uniform(0.5, 1.5);
  auto ego_accel = [&](int s, const AgentState&) {
    return s >= react_at && s < react_at + 15 ? -a_react : 0.0;
  };
  const std::vector<AgentState> ego_track =
      integrate_straight(make_state(ego_x0, 0.0, 0.0, v_ego), total, dt, ego_accel);

  const double v_lead = rng.next_uniform(9.0, 12.0);
  const double lead_x0 = ego_x0 + rng.next_uniform(60.0, 90.0);
  std::vector<AgentState> lead_track = integrate_straight(
      make_state(lead_x0, 0.0, 0.0, v_lead), total, dt,
      [](int, const AgentState&) { return 0.0; });
  const int vanish = static_cast<int>(rng.next_int(0, 20));
  for (int s = total - vanish; s < total; ++s) lead_track[s].valid = false;

  const double x_min = std::min(ego_x0, merge_x0) - 80.0;
  const double x_max = std::max({lead_track.back().position.x,
                                 merge_track.back().position.x}) + 80.0;
  scn.map.road_edges = {{{x_min, -2.3}, {x_max, -2.3}},
                        {{x_max, 6.3}, {x_min, 6.3}}};
  scn.map.lane_centers = {{{x_min, 0.0}, {x_max, 0.0}},
                          {{x_min, 4.0}, {x_max, 4.0}}};

  scn.agents.push_back({ego_meta, ego_track});
  scn.agents.push_back({merge_meta, merge_track});
  scn.agents.push_back({lead_meta, lead_track});
  return scn;
}

}  // namespace

std::vector<Scenario> generate_corpus(const GeneratorConfig& config,
                                      std::uint64_t seed) {
  if (config.count < 1) throw ValidationError("generator config requests no scenarios");
  if (!(config.dt > 0.0)) throw ValidationError("non-positive dt");
  if (config.history_len < 2) throw ValidationError("history_len < 2");
  if (config.future_len < 1) throw ValidationError("future_len < 1");

  constexpr TemplateKind kCycle[3] = {TemplateKind::leader_follower_signal,
                                      TemplateKind::crossing_intersection,
                                      TemplateKind::lane_merge};
  std::vector<Scenario> corpus;
  corpus.reserve(config.count);
  for (int i = 0; i < config.count; ++i) {
    RandomStream rng(mix_key(seed, static_cast<std::uint64_t>(i)));
    const TemplateKind kind =
        config.tmpl == TemplateKind::mixed ? kCycle[i % 3] : config.tmpl;
    Scenario scn;
    switch (kind) {
      case TemplateKind::leader_follower_signal:
        scn = leader_follower_signal(rng, config);
        break;
      case TemplateKind::crossing_intersection:
        scn = crossing_intersection(rng, config);
        break;
      case TemplateKind::lane_merge:
        scn = lane_merge(rng, config);
        break;
      case TemplateKind::mixed:
        throw Error("unreachable");
    }
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "%06d", i);
    scn.id = std::string(template_kind_name(kind)) + "-s" + std::to_string(seed) +
             "-" + suffix;
    const double angle = rng.next_uniform(-kPi, kPi);
    const Vec2 shift{rng.next_uniform(-300.0, 300.0), rng.next_uniform(-300.0, 300.0)};
    scn = apply_rigid_transform(scn, angle, shift);
    validate_scenario(scn);
    corpus.push_back(std::move(scn));
  }
  return corpus;
}

}  // namespace deltasim
