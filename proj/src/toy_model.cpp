#include "deltasim/toy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deltasim/errors.hpp"
#include "deltasim/models.hpp"

namespace deltasim {

namespace {

double dot(const std::array<double, kFeatureCount>& w, const FeatureVector& f) {
  double s = 0.0;
  for (int i = 0; i < kFeatureCount; ++i) s += w[i] * f.v[i];
  return s;
}

}  // namespace

std::string save_params(const PolicyParams& p, const std::string& config_echo_json) {
  nlohmann::ordered_json j;
  j["accel_weights"] = p.accel_w;
  j["yaw_weights"] = p.yaw_w;
  j["sigma_accel"] = p.sigma_accel;
  j["sigma_yaw"] = p.sigma_yaw;
  if (!config_echo_json.empty()) {
    j["train_config"] = nlohmann::json::parse(config_echo_json);
  }
  return j.dump(2) + "\n";
}

PolicyParams load_params(const std::string& bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params parse error: ") + e.what());
  }
  PolicyParams p;
  try {
    const auto aw = j.at("accel_weights").get<std::vector<double>>();
    const auto yw = j.at("yaw_weights").get<std::vector<double>>();
    if (aw.size() != kFeatureCount || yw.size() != kFeatureCount) {
      throw ParseError("params weight vectors must have 7 entries");
    }
    std::copy(aw.begin(), aw.end(), p.accel_w.begin());
    std::copy(yw.begin(), yw.end(), p.yaw_w.begin());
    p.sigma_accel = j.at("sigma_accel").get<double>();
    p.sigma_yaw = j.at("sigma_yaw").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params parse error: ") + e.what());
  }
  if (p.sigma_accel < 0.0 || p.sigma_yaw < 0.0) {
    throw ValidationError("negative noise scale");
  }
  return p;
}

PolicyParams load_params_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open params file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_params(buf.str());
}

FeatureVector extract_features(const Observation& obs, std::int64_t agent_id) {
  FeatureVector f;
  const auto idx_opt = obs.index_of(agent_id);
  if (!idx_opt) return f;
  const std::size_t idx = *idx_opt;
  const AgentState& self = obs.state(idx);
  const Vec2 dir = heading_dir(self.heading);
  const Vec2 lat = dir.left();

  f.v[kFeatSpeed] = self.speed();
  f.v[kFeatBias] = 1.0;

  const CorridorLead lead = corridor_lead(obs, idx, kFeatureGapCap);
  f.v[kFeatGap] = lead.gap;
  f.v[kFeatClosing] = lead.found ? lead.closing : 0.0;

  for (std::size_t s = 0; s < obs.signal_count(); ++s) {
    const SignalState phase = obs.signal_state(s);
    if (phase != SignalState::yellow && phase != SignalState::red) continue;
    const Vec2 rel = obs.signal_position(s) - self.position;
    const double dx = rel.dot(dir);
    if (dx <= 0.0 || dx > kStopSignalRange) continue;
    if (std::abs(rel.dot(lat)) > kStopSignalHalfWidth) continue;
    f.v[kFeatStopSignal] = 1.0;
    break;
  }

  const LaneFrame lane = lane_frame(obs.map(), self.position, self.heading);
  if (lane.found) {
    f.v[kFeatLatOffset] = lane.lateral_offset;
    f.v[kFeatHeadingErr] = lane.heading_error;
  }
  return f;
}

Action toy_act(const PolicyParams& params, const FeatureVector& f,
               RandomStream& rng) {
  Action a;
  a.acceleration = dot(params.accel_w, f) + params.sigma_accel * rng.next_normal();
  a.yaw_rate = dot(params.yaw_w, f) + params.sigma_yaw * rng.next_normal();
  return clamp_action(a);
}

double toy_loss(const PolicyParams& params, const FeatureVector& f,
                const Action& target) {
  const double ea = dot(params.accel_w, f) - target.acceleration;
  const double ey = dot(params.yaw_w, f) - target.yaw_rate;
  return ea * ea + ey * ey;
}

void toy_loss_gradient(const PolicyParams& params, const FeatureVector& f,
                       const Action& target,
                       std::array<double, kFeatureCount>& grad_accel,
                       std::array<double, kFeatureCount>& grad_yaw) {
  const double ea = dot(params.accel_w, f) - target.acceleration;
  const double ey = dot(params.yaw_w, f) - target.yaw_rate;
  for (int i = 0; i < kFeatureCount; ++i) {
    grad_accel[i] = 2.0 * ea * f.v[i];
    grad_yaw[i] = 2.0 * ey * f.v[i];
  }
}

namespace {

// Accumulates the one-step regression over every agent with a valid context
// state and a reconstructible GT target. The rollout state is a fixed input:
// no gradient flows through time.
class RegressionObserver : public RolloutObserver {
 public:
  RegressionObserver(const Scenario& scenario, const PolicyParams& params)
      : scenario_(&scenario), params_(&params) {}

  void on_step(const Observation& obs, int, int) override {
    std::array<double, kFeatureCount> ga{}, gy{};
    for (std::size_t a = 0; a < obs.agent_count(); ++a) {
      const AgentState& current = obs.state(a);
      if (!current.valid) continue;
      // Trust region: the time-aligned GT action is only a meaningful label
      // while the rollout is still near the GT state it was recorded at.
      const AgentState& anchor = scenario_->agents[a].track[obs.step()];
      if (!anchor.valid) continue;
      if ((current.position - anchor.position).norm() > 4.0 ||
          std::abs(current.speed() - anchor.speed()) > 3.0) {
        continue;
      }
      const auto target = gt_action_label(*scenario_, a, obs.step());
      if (!target) continue;
      const FeatureVector f = extract_features(obs, obs.meta(a).id);
      loss_sum_ += toy_loss(*params_, f, *target);
      toy_loss_gradient(*params_, f, *target, ga, gy);
      for (int i = 0; i < kFeatureCount; ++i) {
        grad_accel_[i] += ga[i];
        grad_yaw_[i] += gy[i];
      }
      ++samples_;
    }
  }

  bool apply(PolicyParams& params, double lr) const {
    if (samples_ == 0) return false;
    // Diagonal preconditioning by nominal feature magnitudes; the raw
    // feature scales (gap up to 40 m vs a unit flag) would otherwise give
    // the regression a hopeless condition number.
    static constexpr std::array<double, kFeatureCount> kFeatureScale = {
        10.0, 40.0, 5.0, 1.0, 2.0, 0.5, 1.0};
    const double scale = lr / static_cast<double>(samples_);
    for (int i = 0; i < kFeatureCount; ++i) {
      const double pre = scale / (kFeatureScale[i] * kFeatureScale[i]);
      params.accel_w[i] -= pre * grad_accel_[i];
      params.yaw_w[i] -= pre * grad_yaw_[i];
    }
    return true;
  }

  double mean_loss() const {
    return samples_ > 0 ? loss_sum_ / static_cast<double>(samples_) : 0.0;
  }
  std::int64_t samples() const { return samples_; }

 private:
  const Scenario* scenario_;
  const PolicyParams* params_;
  std::array<double, kFeatureCount> grad_accel_{};
  std::array<double, kFeatureCount> grad_yaw_{};
  double loss_sum_ = 0.0;
  std::int64_t samples_ = 0;
};

constexpr std::uint64_t kMaskTag = 0x6d61736b;  // stream domain separators
constexpr std::uint64_t kRolloutTag = 0x726f6c6c;

}  // namespace

TrainResult train(std::span<const Scenario> corpus, const TrainConfig& config) {
  if (corpus.empty()) throw ValidationError("empty training corpus");
  if (config.p_drop < 0.0 || config.p_drop > 1.0) {
    throw ValidationError("p_drop outside [0, 1]");
  }
  if (config.epochs < 0) throw ValidationError("negative epoch count");
  if (!(config.lr > 0.0)) throw ValidationError("non-positive learning rate");
  if (config.k_train < 1) throw ValidationError("k_train < 1");

  TrainResult result;
  result.params.sigma_accel = config.sigma_accel;
  result.params.sigma_yaw = config.sigma_yaw;

  // Divergence guard state. Epoch losses are stochastic (dropout masks and
  // exploration noise resample per epoch), so the guard watches a smoothed
  // loss against its best value rather than raw epoch-to-epoch noise.
  double smoothed = 0.0, best_smoothed = 0.0;
  int rising = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::int64_t epoch_scenarios = 0;
    for (std::size_t si = 0; si < corpus.size(); ++si) {
      const Scenario& scenario = corpus[si];
      const std::uint64_t mask_key =
          config.mask_resample == MaskResample::per_scenario_epoch
              ? mix_key(config.seed, kMaskTag, static_cast<std::uint64_t>(epoch),
                        static_cast<std::uint64_t>(si))
              : mix_key(config.seed, kMaskTag, static_cast<std::uint64_t>(epoch));
      RandomStream mask_stream(mask_key);
      const ControlMask mask = sample_dropout_mask(scenario, config.p_drop,
                                                   mask_stream, config.ego_dropout);

      const ToyWorldModel model(result.params);
      RegressionObserver observer(scenario, result.params);
      rollout(scenario, model, mask, config.k_train,
              mix_key(config.seed, kRolloutTag, static_cast<std::uint64_t>(epoch),
                      static_cast<std::uint64_t>(si)),
              &observer);
      if (observer.apply(result.params, config.lr)) {
        epoch_loss += observer.mean_loss();
        ++epoch_scenarios;
      }
    }
    const double mean_loss =
        epoch_scenarios > 0 ? epoch_loss / static_cast<double>(epoch_scenarios) : 0.0;
    result.epoch_losses.push_back(mean_loss);

    smoothed = epoch == 0 ? mean_loss : 0.7 * smoothed + 0.3 * mean_loss;
    best_smoothed = epoch == 0 ? smoothed : std::min(best_smoothed, smoothed);
    if (epoch > 0 && smoothed > 1.15 * best_smoothed) {
      if (++rising >= 3) {
        throw TrainingDivergenceError(
            "training diverged: smoothed loss rose for 3 consecutive epochs "
            "(epoch " + std::to_string(epoch) + ", loss " +
            std::to_string(mean_loss) + ")");
      }
    } else {
      rising = 0;
    }
  }
  return result;
}

}  // namespace deltasim
