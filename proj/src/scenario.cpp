#include "deltasim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "deltasim/errors.hpp"

namespace deltasim {

using ordered_json = nlohmann::ordered_json;

const char* agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::vehicle: return "vehicle";
    case AgentKind::pedestrian: return "pedestrian";
    case AgentKind::cyclist: return "cyclist";
  }
  return "vehicle";
}

AgentKind agent_kind_from_name(const std::string& name) {
  if (name == "vehicle") return AgentKind::vehicle;
  if (name == "pedestrian") return AgentKind::pedestrian;
  if (name == "cyclist") return AgentKind::cyclist;
  throw ParseError("unknown agent kind: " + name);
}

char signal_state_code(SignalState s) {
  switch (s) {
    case SignalState::green: return 'G';
    case SignalState::yellow: return 'Y';
    case SignalState::red: return 'R';
    case SignalState::unknown: return 'U';
  }
  return 'U';
}

SignalState signal_state_from_code(char c) {
  switch (c) {
    case 'G': return SignalState::green;
    case 'Y': return SignalState::yellow;
    case 'R': return SignalState::red;
    case 'U': return SignalState::unknown;
  }
  throw ParseError(std::string("unknown signal state code: ") + c);
}

std::size_t Scenario::ego_index() const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].meta.is_ego) return i;
  }
  throw ValidationError("no ego agent");
}

std::optional<std::size_t> Scenario::agent_index(std::int64_t id) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].meta.id == id) return i;
  }
  return std::nullopt;
}

namespace {

bool heading_in_range(double h) { return h > -kPi && h <= kPi; }

void validate_polylines(const std::vector<Polyline>& lines, const char* what) {
  for (const Polyline& line : lines) {
    if (line.size() < 2) {
      throw ValidationError(std::string("degenerate polyline in ") + what);
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (!line[i].finite()) {
        throw ValidationError(std::string("non-finite point in ") + what);
      }
      if (i + 1 < line.size() && line[i] == line[i + 1]) {
        throw ValidationError(std::string("zero-length segment in ") + what);
      }
    }
  }
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.id.empty()) throw ValidationError("empty scenario id");
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
    throw ValidationError("non-positive dt");
  }
  if (s.history_len < 1) throw ValidationError("history_len < 1");
  if (s.future_len < 1) throw ValidationError("future_len < 1");
  if (s.agents.empty()) throw ValidationError("scenario has no agents");

  validate_polylines(s.map.road_edges, "road_edges");
  validate_polylines(s.map.lane_centers, "lane_centers");

  for (const SignalTrack& sig : s.signals) {
    if (!sig.position.finite()) throw ValidationError("non-finite signal position");
    if (sig.controlled_lane < 0 ||
        static_cast<std::size_t>(sig.controlled_lane) >= s.map.lane_centers.size()) {
      throw ValidationError("signal lane index out of range");
    }
    if (sig.states.size() != static_cast<std::size_t>(s.total_len())) {
      throw ValidationError("signal track length mismatch");
    }
  }

  int ego_count = 0;
  std::set<std::int64_t> ids;
  for (const Agent& a : s.agents) {
    if (!ids.insert(a.meta.id).second) throw ValidationError("duplicate agent id");
    if (a.meta.is_ego) ++ego_count;
    if (a.meta.is_ego && a.meta.is_causal) throw ValidationError("ego flagged causal");
    if (!(a.meta.length > 0.0) || !(a.meta.width > 0.0)) {
      throw ValidationError("non-positive agent extent");
    }
    if (a.track.size() != static_cast<std::size_t>(s.total_len())) {
      throw ValidationError("track length mismatch");
    }
    for (const AgentState& st : a.track) {
      if (!st.valid) continue;
      if (!st.position.finite() || !st.velocity.finite() ||
          !std::isfinite(st.heading)) {
        throw ValidationError("non-finite state");
      }
      if (!heading_in_range(st.heading)) throw ValidationError("heading out of range");
    }
    if (a.meta.is_ego) {
      for (const AgentState& st : a.track) {
        if (!st.valid) throw ValidationError("ego track has invalid states");
      }
    }
  }
  if (ego_count == 0) throw ValidationError("no ego agent");
  if (ego_count > 1) throw ValidationError("multiple ego agents");
}

namespace {

ordered_json polyline_to_json(const Polyline& line) {
  ordered_json arr = ordered_json::array();
  for (const Vec2& p : line) arr.push_back(ordered_json::array({p.x, p.y}));
  return arr;
}

Polyline polyline_from_json(const nlohmann::json& j) {
  Polyline line;
  for (const auto& p : j) line.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return line;
}

}  // namespace

std::string save_scenario(const Scenario& s) {
  ordered_json j;
  j["id"] = s.id;
  j["dt"] = s.dt;
  j["history_len"] = s.history_len;
  j["future_len"] = s.future_len;
  ordered_json map;
  ordered_json edges = ordered_json::array();
  for (const Polyline& line : s.map.road_edges) edges.push_back(polyline_to_json(line));
  ordered_json lanes = ordered_json::array();
  for (const Polyline& line : s.map.lane_centers) lanes.push_back(polyline_to_json(line));
  map["road_edges"] = std::move(edges);
  map["lane_centers"] = std::move(lanes);
  j["map"] = std::move(map);
  ordered_json signals = ordered_json::array();
  for (const SignalTrack& sig : s.signals) {
    ordered_json js;
    js["position"] = ordered_json::array({sig.position.x, sig.position.y});
    js["controlled_lane"] = sig.controlled_lane;
    std::string codes;
    codes.reserve(sig.states.size());
    for (SignalState st : sig.states) codes.push_back(signal_state_code(st));
    js["states"] = std::move(codes);
    signals.push_back(std::move(js));
  }
  j["signals"] = std::move(signals);
  ordered_json agents = ordered_json::array();
  for (const Agent& a : s.agents) {
    ordered_json ja;
    ordered_json meta;
    meta["id"] = a.meta.id;
    meta["kind"] = agent_kind_name(a.meta.kind);
    meta["length"] = a.meta.length;
    meta["width"] = a.meta.width;
    meta["is_ego"] = a.meta.is_ego;
    meta["in_eval_set"] = a.meta.in_eval_set;
    meta["is_causal"] = a.meta.is_causal;
    ja["meta"] = std::move(meta);
    ordered_json track = ordered_json::array();
    for (const AgentState& st : a.track) {
      track.push_back(ordered_json::array({st.position.x, st.position.y, st.heading,
                                           st.velocity.x, st.velocity.y,
                                           st.valid ? 1 : 0}));
    }
    ja["track"] = std::move(track);
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  return j.dump() + "\n";
}

Scenario load_scenario(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what());
  }
  Scenario s;
  try {
    s.id = j.at("id").get<std::string>();
    s.dt = j.at("dt").get<double>();
    s.history_len = j.at("history_len").get<int>();
    s.future_len = j.at("future_len").get<int>();
    const auto& map = j.at("map");
    for (const auto& line : map.at("road_edges")) {
      s.map.road_edges.push_back(polyline_from_json(line));
    }
    for (const auto& line : map.at("lane_centers")) {
      s.map.lane_centers.push_back(polyline_from_json(line));
    }
    for (const auto& js : j.at("signals")) {
      SignalTrack sig;
      sig.position = {js.at("position").at(0).get<double>(),
                      js.at("position").at(1).get<double>()};
      sig.controlled_lane = js.at("controlled_lane").get<int>();
      for (char c : js.at("states").get<std::string>()) {
        sig.states.push_back(signal_state_from_code(c));
      }
      s.signals.push_back(std::move(sig));
    }
    for (const auto& ja : j.at("agents")) {
      Agent a;
      const auto& meta = ja.at("meta");
      a.meta.id = meta.at("id").get<std::int64_t>();
      a.meta.kind = agent_kind_from_name(meta.at("kind").get<std::string>());
      a.meta.length = meta.at("length").get<double>();
      a.meta.width = meta.at("width").get<double>();
      a.meta.is_ego = meta.at("is_ego").get<bool>();
      a.meta.in_eval_set = meta.at("in_eval_set").get<bool>();
      a.meta.is_causal = meta.at("is_causal").get<bool>();
      for (const auto& st : ja.at("track")) {
        AgentState state;
        state.position = {st.at(0).get<double>(), st.at(1).get<double>()};
        state.heading = st.at(2).get<double>();
        state.velocity = {st.at(3).get<double>(), st.at(4).get<double>()};
        state.valid = st.at(5).get<int>() != 0;
        a.track.push_back(state);
      }
      s.agents.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what());
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

void save_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scenario file: " + path);
  out << save_scenario(s);
}

const char* domain_base_name(DomainBase base) {
  switch (base) {
    case DomainBase::EvalSet: return "eval";
    case DomainBase::Causal: return "causal";
    case DomainBase::Union: return "union";
  }
  return "union";
}

DomainBase domain_base_from_name(const std::string& name) {
  if (name == "eval") return DomainBase::EvalSet;
  if (name == "causal") return DomainBase::Causal;
  if (name == "union") return DomainBase::Union;
  throw ConfigError("unknown domain: " + name);
}

std::vector<std::int64_t> select_domain(const Scenario& s, DomainSelector sel) {
  std::vector<std::int64_t> ids;
  for (const Agent& a : s.agents) {
    const bool in_eval = a.meta.in_eval_set;
    const bool causal = a.meta.is_causal;
    bool pick = false;
    switch (sel.base) {
      case DomainBase::EvalSet: pick = in_eval; break;
      case DomainBase::Causal: pick = causal; break;
      case DomainBase::Union: pick = in_eval || causal; break;
    }
    if (pick && !sel.include_ego && a.meta.is_ego) pick = false;
    if (pick) ids.push_back(a.meta.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<CausalLabel> load_causal_labels(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("causal label parse error: ") + e.what());
  }
  std::vector<CausalLabel> labels;
  try {
    for (const auto& item : j) {
      labels.push_back({item.at("scenario_id").get<std::string>(),
                        item.at("agent_id").get<std::int64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("causal label parse error: ") + e.what());
  }
  return labels;
}

std::vector<CausalLabel> load_causal_labels_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open causal label file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_causal_labels(buf.str());
}

void apply_causal_labels(Scenario& s, std::span<const CausalLabel> labels) {
  for (const CausalLabel& label : labels) {
    if (label.scenario_id != s.id) continue;
    const auto idx = s.agent_index(label.agent_id);
    if (!idx) continue;
    if (s.agents[*idx].meta.is_ego) throw ValidationError("ego flagged causal");
    s.agents[*idx].meta.is_causal = true;
  }
}

Scenario apply_rigid_transform(const Scenario& s, double angle, Vec2 translation) {
  Scenario out = s;
  auto xform_point = [&](Vec2 p) { return p.rotated(angle) + translation; };
  for (Polyline& line : out.map.road_edges) {
    for (Vec2& p : line) p = xform_point(p);
  }
  for (Polyline& line : out.map.lane_centers) {
    for (Vec2& p : line) p = xform_point(p);
  }
  for (SignalTrack& sig : out.signals) sig.position = xform_point(sig.position);
  for (Agent& a : out.agents) {
    for (AgentState& st : a.track) {
      st.position = xform_point(st.position);
      st.velocity = st.velocity.rotated(angle);
      st.heading = wrap_angle(st.heading + angle);
    }
  }
  return out;
}

}  // namespace deltasim
