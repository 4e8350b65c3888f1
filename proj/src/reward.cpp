#include "trajmatch/reward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trajmatch {

void validate_reward_config(const RewardConfig& cfg) {
  const auto nonneg = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string(name) +
                                  " must be finite and >= 0");
    }
  };
  nonneg(cfg.omega_baseline, "omega_baseline");
  nonneg(cfg.omega_imitation, "omega_imitation");
  nonneg(cfg.omega_distance, "omega_distance");
  nonneg(cfg.sapu_weight, "sapu_weight");
  nonneg(cfg.success_bonus, "success_bonus");
  if (!(cfg.success_threshold > 0.0) || !std::isfinite(cfg.success_threshold)) {
    throw std::invalid_argument("success_threshold must be finite and > 0");
  }
  if (!(cfg.goal_distance_scale > 0.0) ||
      !std::isfinite(cfg.goal_distance_scale)) {
    throw std::invalid_argument("goal_distance_scale must be finite and > 0");
  }
  if (cfg.signature_level < 1 || cfg.signature_level > 12) {
    throw std::invalid_argument("signature_level must be in [1, 12]");
  }
}

std::pair<double, std::size_t> imitation_reward_max(
    std::span<const double> per_demo_rewards) {
  if (per_demo_rewards.empty()) {
    throw std::invalid_argument(
        "imitation_reward_max requires at least one reward");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < per_demo_rewards.size(); ++i) {
    if (per_demo_rewards[i] > per_demo_rewards[best]) best = i;
  }
  return {per_demo_rewards[best], best};
}

double total_step_reward(double baseline_reward, double imitation_reward,
                         const RewardConfig& cfg) {
  return cfg.omega_baseline * baseline_reward +
         cfg.omega_imitation * imitation_reward;
}

double distance_to_goal_reward(const Vec3& pos, const Vec3& goal,
                               double scale) {
  return one_minus_tanh(scale * distance(pos, goal));
}

std::vector<double> per_demo_state_rewards(const Vec3& pos,
                                           const DemoSet& demos) {
  std::vector<double> out(demos.size());
  for (std::size_t i = 0; i < demos.size(); ++i) {
    const Path& p = demos.path(i);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& q : p.points) {
      best = std::min(best, squared_distance(pos, q));
    }
    out[i] = one_minus_tanh(std::sqrt(best));
  }
  return out;
}

double state_based_reward(const Vec3& pos, const DemoSet& demos) {
  if (demos.empty()) {
    throw std::invalid_argument("state_based_reward requires at least one demo");
  }
  return imitation_reward_max(per_demo_state_rewards(pos, demos)).first;
}

BatchReward batch_state_reward(const Vec3& pos, const DemoSet& demos) {
  if (demos.empty()) {
    throw std::invalid_argument("batch_state_reward requires at least one demo");
  }
  const auto [r, i] = imitation_reward_max(per_demo_state_rewards(pos, demos));
  return {r, i};
}

double success_bonus(std::span<const double> goal_distances,
                     const RewardConfig& cfg) {
  for (double d : goal_distances) {
    if (d < cfg.success_threshold) return cfg.success_bonus;
  }
  return 0.0;
}

double horizon_return(std::span<const StepRecord> steps,
                      double curriculum_weight, const RewardConfig& cfg) {
  if (!std::isfinite(curriculum_weight) || curriculum_weight < 0.0) {
    throw std::invalid_argument("curriculum_weight must be finite and >= 0");
  }
  double shaped = 0.0;
  bool reached = false;
  for (const StepRecord& s : steps) {
    shaped += cfg.sapu_weight * (cfg.omega_distance * s.distance_reward +
                                 cfg.omega_imitation * s.imitation_reward);
    reached = reached || s.goal_distance < cfg.success_threshold;
  }
  // The success bonus sits outside the curriculum weighting on purpose:
  // reaching the goal pays the same at every stage.
  return curriculum_weight * shaped + (reached ? cfg.success_bonus : 0.0);
}

}  // namespace trajmatch
