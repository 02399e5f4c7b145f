#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "deltasim/rng.hpp"
#include "deltasim/scenario.hpp"

namespace deltasim {

struct Action {
  double acceleration = 0.0;  // m/s^2 along heading
  double yaw_rate = 0.0;      // rad/s
};

inline constexpr double kMaxAcceleration = 10.0;
inline constexpr double kMaxYawRate = 2.0;

Action clamp_action(Action a);

// One unicycle step: position advances with the pre-step speed and heading,
// then heading and speed update. Velocity stays speed-aligned with heading
// and speed clamps non-negative.
AgentState advance_state(const AgentState& s, Action a, double dt);

// Which agents the world model controls; uncontrolled agents replay GT.
struct ControlMask {
  std::vector<std::int64_t> agent_ids;  // scenario agent order
  std::vector<std::uint8_t> controlled;

  bool is_controlled(std::size_t agent_idx) const {
    return controlled[agent_idx] != 0;
  }
};

ControlMask full_control_mask(const Scenario& s);
// Ego replays GT, every other agent is model-controlled.
ControlMask ego_replay_mask(const Scenario& s);

enum class EgoDropout { eligible, never };

// Each agent independently uncontrolled with probability p_drop; the ego is
// eligible like any other agent unless ego_mode says otherwise.
ControlMask sample_dropout_mask(const Scenario& s, double p_drop, RandomStream& rng,
                                EgoDropout ego_mode = EgoDropout::eligible);

// Throws ValidationError unless the mask covers exactly the scenario's agents.
void validate_mask(const Scenario& s, const ControlMask& mask);

// What a world model is allowed to see when planning one step: the map,
// signal phases up to the current step, agent metadata and current states.
// Ground-truth future states are not reachable through this view.
class Observation {
 public:
  Observation(const Scenario& scenario, std::span<const AgentState> current,
              int current_abs_step)
      : scenario_(&scenario), current_(current), step_(current_abs_step) {}

  double dt() const { return scenario_->dt; }
  int step() const { return step_; }
  const MapData& map() const { return scenario_->map; }

  std::size_t agent_count() const { return current_.size(); }
  const AgentMeta& meta(std::size_t idx) const { return scenario_->agents[idx].meta; }
  const AgentState& state(std::size_t idx) const { return current_[idx]; }
  std::optional<std::size_t> index_of(std::int64_t id) const {
    return scenario_->agent_index(id);
  }

  std::size_t signal_count() const { return scenario_->signals.size(); }
  Vec2 signal_position(std::size_t idx) const {
    return scenario_->signals[idx].position;
  }
  int signal_lane(std::size_t idx) const {
    return scenario_->signals[idx].controlled_lane;
  }
  SignalState signal_state(std::size_t idx) const {
    return scenario_->signals[idx].states[static_cast<std::size_t>(step_)];
  }

 private:
  const Scenario* scenario_;
  std::span<const AgentState> current_;
  int step_;
};

class WorldModel {
 public:
  virtual ~WorldModel() = default;

  // Action for one controlled agent. Must be deterministic given (obs, agent,
  // rng) and must not consult GT futures; the engine hands each (rollout,
  // timestep, agent) its own derived stream so call order cannot matter.
  virtual Action act(const Observation& obs, std::int64_t agent_id,
                     RandomStream& rng) const = 0;

  // The designated GT-policy model: the engine copies GT states verbatim for
  // its controlled agents instead of integrating actions.
  virtual bool replays_ground_truth() const { return false; }
};

// Optional per-step hook; sees the same pre-step observation the model saw.
class RolloutObserver {
 public:
  virtual ~RolloutObserver() = default;
  virtual void on_step(const Observation& obs, int k, int t) = 0;
};

struct RolloutSet {
  std::string scenario_id;
  ControlMask mask;
  int K = 0;
  int future_len = 0;
  int agent_count = 0;
  std::uint64_t seed = 0;
  std::vector<AgentState> states;  // [k][t][agent] flattened

  const AgentState& at(int k, int t, int agent) const {
    return states[(static_cast<std::size_t>(k) * future_len + t) * agent_count + agent];
  }
  AgentState& at(int k, int t, int agent) {
    return states[(static_cast<std::size_t>(k) * future_len + t) * agent_count + agent];
  }
};

// K closed-loop futures under the mask. Uncontrolled agents replay GT
// bit-exactly; controlled agents integrate model actions with per
// (seed, rollout, timestep, agent) random substreams.
RolloutSet rollout(const Scenario& scenario, const WorldModel& model,
                   const ControlMask& mask, int K, std::uint64_t seed,
                   RolloutObserver* observer = nullptr);

// .rollouts.json dump for offline metric recomputation.
std::string save_rollouts(const RolloutSet& r);
RolloutSet load_rollouts(const std::string& bytes);

// Per-scenario model construction; evaluation creates one instance per
// scenario task, so instances never have to be shared across threads.
class ModelFactory {
 public:
  virtual ~ModelFactory() = default;
  virtual std::unique_ptr<WorldModel> create(const Scenario& scenario) const = 0;
  virtual std::string name() const = 0;
};

}  // namespace deltasim
