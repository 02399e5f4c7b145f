#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deltasim/rollout.hpp"

namespace deltasim {

// Inverse unicycle step: the action that drives the current state onto the
// agent's GT state one step ahead. Defined wherever that GT state is valid;
// the result is clamped to actuator bounds.
std::optional<Action> reconstruct_gt_action(const Scenario& scenario,
                                            std::size_t agent_idx,
                                            int current_abs_step,
                                            const AgentState& current);

// The GT track's own action over [abs_step, abs_step + 1], by inverse
// unicycle finite differences. Independent of where a rollout currently is,
// so it stays a bounded regression label at off-distribution states.
std::optional<Action> gt_action_label(const Scenario& scenario,
                                      std::size_t agent_idx, int abs_step);

// The GT policy: the engine copies GT states verbatim for controlled agents.
class GtReplayModel : public WorldModel {
 public:
  Action act(const Observation&, std::int64_t, RandomStream&) const override {
    return {};
  }
  bool replays_ground_truth() const override { return true; }
};

// Open-loop tracker: reconstructs each agent's GT action from its own track
// and current state, ignoring every other agent. Stays within ~1e-6 m of GT
// when unperturbed and is insensitive to what the rest of the scene does.
class GtActionModel : public WorldModel {
 public:
  explicit GtActionModel(const Scenario& scenario) : scenario_(&scenario) {}
  Action act(const Observation& obs, std::int64_t agent_id,
             RandomStream& rng) const override;

 private:
  const Scenario* scenario_;
};

// Forward-corridor lead probe shared by the scripted and toy models.
struct CorridorLead {
  double gap = 0.0;      // longitudinal box gap to the nearest corridor agent
  double closing = 0.0;  // positive when approaching it
  bool found = false;
};
CorridorLead corridor_lead(const Observation& obs, std::size_t subject_idx,
                           double gap_cap = 40.0);

// Sensitivity positive control: lane-keeping cruise at each agent's initial
// speed, blind to signals and blind to other agents until they are a panic
// distance away. Under ego replay it rear-ends a stopping ego and stays in
// contact instead of reacting in time.
class AggressiveFollowerModel : public WorldModel {
 public:
  explicit AggressiveFollowerModel(const Scenario& scenario);
  Action act(const Observation& obs, std::int64_t agent_id,
             RandomStream& rng) const override;

 private:
  std::vector<double> target_speed_;  // by scenario agent index
};

// Lane geometry probe shared by the scripted and toy models.
struct LaneFrame {
  double lateral_offset = 0.0;  // positive when the agent is left of center
  double heading_error = 0.0;   // wrapped agent heading minus lane direction
  bool found = false;
};
LaneFrame lane_frame(const MapData& map, Vec2 position, double heading);

// "replay", "open_loop", "aggressive_follower", or a params.json path.
std::unique_ptr<ModelFactory> make_model_factory(const std::string& spec);

}  // namespace deltasim
