#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltasim/geometry.hpp"

namespace deltasim {

enum class AgentKind { vehicle, pedestrian, cyclist };

const char* agent_kind_name(AgentKind kind);
AgentKind agent_kind_from_name(const std::string& name);

struct AgentState {
  Vec2 position;
  double heading = 0.0;  // radians in (-pi, pi]
  Vec2 velocity;
  bool valid = false;

  double speed() const { return velocity.norm(); }
};

struct AgentMeta {
  std::int64_t id = 0;
  AgentKind kind = AgentKind::vehicle;
  double length = 0.0;
  double width = 0.0;
  bool is_ego = false;
  bool in_eval_set = false;
  bool is_causal = false;
};

struct MapData {
  // Drivable region lies on the left of each road edge's traversal direction.
  std::vector<Polyline> road_edges;
  std::vector<Polyline> lane_centers;
};

enum class SignalState { green, yellow, red, unknown };

char signal_state_code(SignalState s);
SignalState signal_state_from_code(char c);

struct SignalTrack {
  Vec2 position;
  int controlled_lane = 0;  // index into MapData::lane_centers
  std::vector<SignalState> states;  // one per scenario timestep
};

struct Agent {
  AgentMeta meta;
  std::vector<AgentState> track;  // length history_len + future_len
};

struct Scenario {
  std::string id;
  double dt = 0.1;
  int history_len = 11;  // H + 1 states up to and including the current one
  int future_len = 80;
  MapData map;
  std::vector<SignalTrack> signals;
  std::vector<Agent> agents;

  int total_len() const { return history_len + future_len; }
  // Index of the last history state, the state rollouts start from.
  int current_index() const { return history_len - 1; }
  std::size_t ego_index() const;
  std::optional<std::size_t> agent_index(std::int64_t id) const;
};

// Throws ValidationError naming the first violated invariant.
void validate_scenario(const Scenario& s);

// Canonical serialization: fixed field order, shortest round-trip floats.
// save_scenario(load_scenario(bytes)) is byte-identical for canonical input.
Scenario load_scenario(const std::string& bytes);
std::string save_scenario(const Scenario& s);
Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& s, const std::string& path);

enum class DomainBase { EvalSet, Causal, Union };

const char* domain_base_name(DomainBase base);
DomainBase domain_base_from_name(const std::string& name);

struct DomainSelector {
  DomainBase base = DomainBase::Union;
  bool include_ego = true;
};

// Deterministic subset of agent ids, sorted ascending.
std::vector<std::int64_t> select_domain(const Scenario& s, DomainSelector sel);

struct CausalLabel {
  std::string scenario_id;
  std::int64_t agent_id = 0;
};

std::vector<CausalLabel> load_causal_labels(const std::string& bytes);
std::vector<CausalLabel> load_causal_labels_file(const std::string& path);

// Import hook: sets is_causal on agents matching (scenario id, agent id).
// Labels for other scenarios are ignored; a label naming the ego throws.
void apply_causal_labels(Scenario& s, std::span<const CausalLabel> labels);

// Rigid motion of the whole scene (map, signals, states). Headings rewrap.
Scenario apply_rigid_transform(const Scenario& s, double angle, Vec2 translation);

}  // namespace deltasim
