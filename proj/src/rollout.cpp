#include "deltasim/rollout.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "deltasim/errors.hpp"

namespace deltasim {

Action clamp_action(Action a) {
  a.acceleration = std::clamp(a.acceleration, -kMaxAcceleration, kMaxAcceleration);
  a.yaw_rate = std::clamp(a.yaw_rate, -kMaxYawRate, kMaxYawRate);
  return a;
}

AgentState advance_state(const AgentState& s, Action a, double dt) {
  const double speed = s.speed();
  const Vec2 dir = heading_dir(s.heading);
  AgentState out;
  out.position = s.position + dir * (speed * dt);
  out.heading = wrap_angle(s.heading + a.yaw_rate * dt);
  const double next_speed = std::max(0.0, speed + a.acceleration * dt);
  out.velocity = heading_dir(out.heading) * next_speed;
  out.valid = true;
  return out;
}

ControlMask full_control_mask(const Scenario& s) {
  ControlMask m;
  for (const Agent& a : s.agents) {
    m.agent_ids.push_back(a.meta.id);
    m.controlled.push_back(1);
  }
  return m;
}

ControlMask ego_replay_mask(const Scenario& s) {
  ControlMask m = full_control_mask(s);
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    if (s.agents[i].meta.is_ego) m.controlled[i] = 0;
  }
  return m;
}

ControlMask sample_dropout_mask(const Scenario& s, double p_drop, RandomStream& rng,
                                EgoDropout ego_mode) {
  if (p_drop < 0.0 || p_drop > 1.0) throw ValidationError("p_drop outside [0, 1]");
  ControlMask m;
  for (const Agent& a : s.agents) {
    const bool dropped = rng.next_uniform() < p_drop;
    bool controlled = !dropped;
    if (a.meta.is_ego && ego_mode == EgoDropout::never) controlled = true;
    m.agent_ids.push_back(a.meta.id);
    m.controlled.push_back(controlled ? 1 : 0);
  }
  return m;
}

void validate_mask(const Scenario& s, const ControlMask& mask) {
  if (mask.agent_ids.size() != s.agents.size() ||
      mask.controlled.size() != s.agents.size()) {
    throw ValidationError("control mask does not cover scenario agents");
  }
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    if (mask.agent_ids[i] != s.agents[i].meta.id) {
      throw ValidationError("control mask does not cover scenario agents");
    }
  }
}

RolloutSet rollout(const Scenario& scenario, const WorldModel& model,
                   const ControlMask& mask, int K, std::uint64_t seed,
                   RolloutObserver* observer) {
  validate_mask(scenario, mask);
  if (K < 1) throw ValidationError("rollout count K < 1");

  const int T = scenario.future_len;
  const int H = scenario.history_len;
  const int A = static_cast<int>(scenario.agents.size());

  RolloutSet out;
  out.scenario_id = scenario.id;
  out.mask = mask;
  out.K = K;
  out.future_len = T;
  out.agent_count = A;
  out.seed = seed;
  out.states.resize(static_cast<std::size_t>(K) * T * A);

  if (model.replays_ground_truth()) {
    for (int k = 0; k < K; ++k) {
      for (int t = 0; t < T; ++t) {
        for (int a = 0; a < A; ++a) {
          out.at(k, t, a) = scenario.agents[a].track[H + t];
        }
      }
    }
    return out;
  }

  // A controlled agent with no valid state to start from replays GT instead.
  std::vector<std::uint8_t> effective(mask.controlled);
  for (int a = 0; a < A; ++a) {
    if (!scenario.agents[a].track[scenario.current_index()].valid) effective[a] = 0;
  }

  std::vector<AgentState> cur(A), next(A);
  for (int k = 0; k < K; ++k) {
    for (int a = 0; a < A; ++a) {
      cur[a] = scenario.agents[a].track[scenario.current_index()];
    }
    for (int t = 0; t < T; ++t) {
      const int abs_step = H + t;
      const Observation obs(scenario, cur, abs_step - 1);
      if (observer != nullptr) observer->on_step(obs, k, t);
      for (int a = 0; a < A; ++a) {
        if (effective[a]) {
          const std::int64_t id = scenario.agents[a].meta.id;
          RandomStream stream(mix_key(seed, static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(t),
                                      static_cast<std::uint64_t>(id)));
          const Action action = model.act(obs, id, stream);
          if (!std::isfinite(action.acceleration) || !std::isfinite(action.yaw_rate)) {
            throw ModelContractError("non-finite action for agent " +
                                     std::to_string(id) + " at rollout step " +
                                     std::to_string(t));
          }
          next[a] = advance_state(cur[a], clamp_action(action), scenario.dt);
        } else {
          next[a] = scenario.agents[a].track[abs_step];
        }
      }
      for (int a = 0; a < A; ++a) out.at(k, t, a) = next[a];
      cur.swap(next);
    }
  }
  return out;
}

std::string save_rollouts(const RolloutSet& r) {
  nlohmann::ordered_json j;
  j["scenario_id"] = r.scenario_id;
  j["seed"] = r.seed;
  j["k"] = r.K;
  j["future_len"] = r.future_len;
  j["agent_ids"] = r.mask.agent_ids;
  nlohmann::ordered_json controlled = nlohmann::ordered_json::array();
  for (std::uint8_t c : r.mask.controlled) controlled.push_back(c != 0);
  j["controlled"] = std::move(controlled);
  nlohmann::ordered_json states = nlohmann::ordered_json::array();
  for (const AgentState& st : r.states) {
    states.push_back(st.position.x);
    states.push_back(st.position.y);
    states.push_back(st.heading);
    states.push_back(st.velocity.x);
    states.push_back(st.velocity.y);
    states.push_back(st.valid ? 1 : 0);
  }
  j["states"] = std::move(states);
  return j.dump() + "\n";
}

RolloutSet load_rollouts(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rollout parse error: ") + e.what());
  }
  RolloutSet r;
  try {
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.K = j.at("k").get<int>();
    r.future_len = j.at("future_len").get<int>();
    r.mask.agent_ids = j.at("agent_ids").get<std::vector<std::int64_t>>();
    for (const auto& c : j.at("controlled")) {
      r.mask.controlled.push_back(c.get<bool>() ? 1 : 0);
    }
    r.agent_count = static_cast<int>(r.mask.agent_ids.size());
    const auto& states = j.at("states");
    if (states.size() % 6 != 0) throw ParseError("rollout state array truncated");
    for (std::size_t i = 0; i < states.size(); i += 6) {
      AgentState st;
      st.position = {states.at(i).get<double>(), states.at(i + 1).get<double>()};
      st.heading = states.at(i + 2).get<double>();
      st.velocity = {states.at(i + 3).get<double>(), states.at(i + 4).get<double>()};
      st.valid = states.at(i + 5).get<int>() != 0;
      r.states.push_back(st);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("rollout parse error: ") + e.what());
  }
  const std::size_t expected =
      static_cast<std::size_t>(r.K) * r.future_len * r.agent_count;
  if (r.states.size() != expected) throw ParseError("rollout state count mismatch");
  return r;
}

}  // namespace deltasim
