#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "trajmatch/demos.hpp"
#include "trajmatch/dtw.hpp"
#include "trajmatch/geometry.hpp"

namespace trajmatch {

// Weights and thresholds for composing per-step rewards and episode returns.
// All weights must be finite and >= 0; success_threshold > 0; tanh scales
// > 0; signature_level >= 1.
struct RewardConfig {
  double omega_baseline = 1.0;    // weight on the task (baseline) term
  double omega_imitation = 1.0;   // weight on the imitation term
  double omega_distance = 1.0;    // weight on the goal-distance part of the baseline
  double sapu_weight = 1.0;       // interpenetration attenuation; 1 = no penalty
  double success_bonus = 10.0;    // added once per episode on success
  double success_threshold = 0.002;  // metres to goal that count as success
  double goal_distance_scale = 10.0; // 1/m inside the goal-distance tanh
  int signature_level = 3;
};

void validate_reward_config(const RewardConfig& cfg);

// Largest per-demo reward and its index; exact ties resolve to the smallest
// index. Requires a non-empty span.
std::pair<double, std::size_t> imitation_reward_max(
    std::span<const double> per_demo_rewards);

// Per-step reward: omega_baseline * baseline + omega_imitation * imitation.
double total_step_reward(double baseline_reward, double imitation_reward,
                         const RewardConfig& cfg);

// Dense goal-approach term in (0, 1]: 1 - tanh(scale * ||pos - goal||).
double distance_to_goal_reward(const Vec3& pos, const Vec3& goal,
                               double scale = 10.0);

// Pointwise imitation baseline: 1 - tanh(distance from pos to the nearest
// point of any demo). Requires a non-empty demo set.
double state_based_reward(const Vec3& pos, const DemoSet& demos);

// Same, split per demo for max/argmax composition.
std::vector<double> per_demo_state_rewards(const Vec3& pos,
                                           const DemoSet& demos);
BatchReward batch_state_reward(const Vec3& pos, const DemoSet& demos);

// Episode-level success bonus: cfg.success_bonus when the distance to goal
// dropped below cfg.success_threshold at any step, else 0.
double success_bonus(std::span<const double> goal_distances,
                     const RewardConfig& cfg);

// One step's contributions, as recorded while an episode runs.
struct StepRecord {
  double distance_reward = 0.0;   // distance_to_goal_reward at the new pose
  double imitation_reward = 0.0;  // best per-demo imitation reward, 0 if unused
  double goal_distance = 0.0;     // metres to the true goal at the new pose
};

// Episode return:
//   curriculum_weight * sum_t sapu * (omega_distance * r_dist + omega_imitation * r_imit)
//   + success bonus.
// The bonus is awarded outside the curriculum weighting, so reaching the goal
// pays the same at every curriculum stage.
double horizon_return(std::span<const StepRecord> steps,
                      double curriculum_weight, const RewardConfig& cfg);

}  // namespace trajmatch
