#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltasim/rollout.hpp"

namespace deltasim {

// Feature layout of the linear-Gaussian toy policy.
enum Feature : int {
  kFeatSpeed = 0,      // current speed (m/s)
  kFeatGap,            // longitudinal box gap to the corridor lead, capped (m)
  kFeatClosing,        // closing speed towards the lead (m/s)
  kFeatStopSignal,     // 1 when a yellow/red signal sits within 30 m ahead
  kFeatLatOffset,      // signed offset to the nearest lane center (m)
  kFeatHeadingErr,     // heading error to the lane direction (rad)
  kFeatBias,
  kFeatureCount,
};

struct FeatureVector {
  std::array<double, kFeatureCount> v{};
};

inline constexpr double kFeatureGapCap = 40.0;
inline constexpr double kStopSignalRange = 30.0;
inline constexpr double kStopSignalHalfWidth = 3.0;

struct PolicyParams {
  std::array<double, kFeatureCount> accel_w{};
  std::array<double, kFeatureCount> yaw_w{};
  double sigma_accel = 0.5;
  double sigma_yaw = 0.05;
};

std::string save_params(const PolicyParams& p, const std::string& config_echo_json);
PolicyParams load_params(const std::string& bytes);
PolicyParams load_params_file(const std::string& path);

// Deterministic features from the observation only; the agent must be valid
// at the current step. A missing lead reads as gap = cap, closing = 0.
FeatureVector extract_features(const Observation& obs, std::int64_t agent_id);

// accel = wa.f + N(0, sigma_a); yaw = wy.f + N(0, sigma_y); clamped.
// Always consumes exactly two normal draws.
Action toy_act(const PolicyParams& params, const FeatureVector& f,
               RandomStream& rng);

class ToyWorldModel : public WorldModel {
 public:
  explicit ToyWorldModel(PolicyParams params) : params_(params) {}
  Action act(const Observation& obs, std::int64_t agent_id,
             RandomStream& rng) const override {
    return toy_act(params_, extract_features(obs, agent_id), rng);
  }
  const PolicyParams& params() const { return params_; }

 private:
  PolicyParams params_;
};

class ToyModelFactory : public ModelFactory {
 public:
  explicit ToyModelFactory(PolicyParams params) : params_(params) {}
  std::unique_ptr<WorldModel> create(const Scenario&) const override {
    return std::make_unique<ToyWorldModel>(params_);
  }
  std::string name() const override { return "toy"; }

 private:
  PolicyParams params_;
};

enum class MaskResample { per_scenario_epoch, per_epoch };

struct TrainConfig {
  double p_drop = 0.1;
  int epochs = 30;
  double lr = 0.1;
  int k_train = 1;  // rollouts per scenario per epoch
  std::uint64_t seed = 1;
  double sigma_accel = 0.5;
  double sigma_yaw = 0.02;
  EgoDropout ego_dropout = EgoDropout::eligible;
  MaskResample mask_resample = MaskResample::per_scenario_epoch;
};

// Squared error between the mean model action and the target.
double toy_loss(const PolicyParams& params, const FeatureVector& f,
                const Action& target);

// Analytic gradient of toy_loss with respect to both weight vectors.
void toy_loss_gradient(const PolicyParams& params, const FeatureVector& f,
                       const Action& target,
                       std::array<double, kFeatureCount>& grad_accel,
                       std::array<double, kFeatureCount>& grad_yaw);

struct TrainResult {
  PolicyParams params;
  std::vector<double> epoch_losses;
};

// Closed-loop one-step action matching with control dropout. Per epoch and
// scenario: sample a dropout mask, run k_train noisy rollouts with the
// current weights, regress every agent's mean action onto the GT
// reconstruction at the visited states, and apply one batch gradient step.
// Deterministic in (corpus, config). Throws TrainingDivergenceError after
// three consecutive epoch-loss increases.
TrainResult train(std::span<const Scenario> corpus, const TrainConfig& config);

}  // namespace deltasim
