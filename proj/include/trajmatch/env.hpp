#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajmatch/curriculum.hpp"
#include "trajmatch/demos.hpp"
#include "trajmatch/geometry.hpp"
#include "trajmatch/reward.hpp"
#include "trajmatch/rng.hpp"
#include "trajmatch/signature.hpp"

namespace trajmatch {

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Desk-scale insertion world. The socket is a solid block sitting on the
// table at the sampled socket position, with a square vertical channel sunk
// into its top face; the goal is the channel bottom centre. The plug is a
// point (its radius is already folded into the channel half width, which is
// the radial clearance left for the plug centre). Everything outside the
// block and above the table is free space.
struct EnvConfig {
  double channel_half_width = 0.0005;   // metres of lateral slack at the centre
  double channel_depth = 0.02;
  double plug_radius = 0.0025;
  double block_half_extent = 0.05;      // half of the block's square footprint
  std::array<AxisRange, 3> socket_position_ranges{
      AxisRange{0.40, 0.60}, AxisRange{-0.10, 0.10}, AxisRange{0.16, 0.18}};
  // Plug spawn offset from the channel mouth centre; z is height above the
  // mouth, not above the goal.
  std::array<AxisRange, 3> plug_offset_ranges{
      AxisRange{-0.01, 0.01}, AxisRange{-0.01, 0.01}, AxisRange{0.010, 0.020}};
  std::array<AxisRange, 3> observation_noise_ranges{
      AxisRange{-0.002, 0.002}, AxisRange{-0.002, 0.002},
      AxisRange{-0.002, 0.002}};
  // Rotation misreading, surfaced as the lateral goal error a tilted
  // insertion axis of channel_depth would produce.
  double observation_rotation_noise_deg = 5.0;
  std::size_t max_steps = 200;
  double action_step = 0.002;           // metres per control step, upper bound
  double success_tolerance = 0.002;
  // Demo generation: free-space pose sampled after retraction.
  double demo_lateral_range = 0.02;
  double demo_height_min = 0.010;
  double demo_height_max = 0.030;
  double mouth_clearance = 0.005;       // retraction overshoot above the mouth
  // Drift profile of the scripted disassembly. Zero moves straight from the
  // retraction point to the sampled pose; positive values slide outward first,
  // climbing this many metres per lateral metre, and finish with a vertical
  // lift, staying low over the block the way a minimal-lift extraction would.
  double drift_climb_slope = 0.0;
  // Spacing between recorded demo waypoints. Zero derives it from the action
  // step (95% of it, so replayed per-waypoint actions never hit the clamp);
  // an explicit value is capped at that same limit for the same reason.
  double demo_waypoint_spacing = 0.0;
};

void validate_env_config(const EnvConfig& cfg);

struct EnvState {
  EnvConfig config;
  Vec3 plug_position;
  Vec3 socket_position;   // channel bottom centre, the true goal
  Vec3 observed_goal;     // goal as the noisy observation reports it
  std::size_t step_count = 0;
  Path trace;             // every pose visited, spawn first
  bool done = false;
  bool success = false;
};

// Sample a fresh episode. Socket pose, plug offset and observation noise all
// come from `rng`; `initial_height` (curriculum) overrides the sampled spawn
// height above the mouth when present. Draw order is fixed (socket xyz, plug
// offset xy, spawn height unless overridden, position noise xyz, rotation
// noise per lateral axis) so equal seeds give equal episodes.
EnvState make_env(const EnvConfig& cfg, Rng& rng,
                  std::optional<double> initial_height = std::nullopt);

// Deterministic episode at explicit poses, no observation noise. Used for
// demo replay and tests.
EnvState make_env_at(const EnvConfig& cfg, const Vec3& socket_position,
                     const Vec3& plug_position);

// Apply one translation command. The action is clamped to length
// config.action_step; motion that would enter the block or the table is
// resolved by sliding along the obstructing faces, never by teleporting.
// Marks done on success (within success_tolerance of the goal) or when
// max_steps is exhausted.
void step(EnvState& env, const Vec3& action);

// True when p is inside the solid part of the world (block minus channel, or
// below the table).
bool in_collision(const EnvConfig& cfg, const Vec3& socket, const Vec3& p);

struct EpisodeResult {
  bool success = false;
  std::size_t steps_taken = 0;
  double episode_return = 0.0;
  Path trace;
};

// Reversed-disassembly demonstrations: start each from a solved pose, back
// the plug out of the channel, drift to a sampled free pose, then reverse so
// the result runs from free space down to exactly the goal. Demos live in
// the socket frame (goal at the origin, mouth at z = channel_depth); episode
// code places them at the sampled socket via demos_in_world. Waypoints are
// spaced under action_step so replaying the point-to-point actions through
// step() reproduces the path.
DemoSet generate_disassembly_demos(const EnvConfig& cfg, std::size_t count,
                                   Rng& rng);

// Translate every demo point by `socket_position` (socket frame to world).
DemoSet demos_in_world(const DemoSet& socket_frame,
                       const Vec3& socket_position);

// Drive an episode by replaying a socket-frame demo open loop: spawn at its
// first point, feed the consecutive waypoint differences through step().
EpisodeResult replay_demo(const EnvConfig& cfg, const Path& socket_frame_demo,
                          const Vec3& socket_position);

enum class Scheme { none, state, dtw, signature };

std::string scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

// Per-episode caches for the imitation terms: demo prefix signatures, the
// running signature of the trace, and the per-step window anchor per demo.
// One instance serves one episode of one scheme; `demos` are world-frame and
// must outlive the evaluator. Rewards are bit-identical to the uncached
// batch_dtw_reward / batch_signature_reward / batch_state_reward on the
// extended trace.
class ImitationEvaluator {
 public:
  static constexpr std::size_t kWindowLength = 10;

  ImitationEvaluator(const DemoSet& demos, Scheme scheme,
                     const RewardConfig& reward);

  void on_episode_start(const Vec3& spawn);
  // Call after the env committed a step to position p.
  void on_step_committed(const Vec3& p);
  // Prepare per-step shared work (window anchors) for the current trace.
  void begin_step(const Path& trace);
  // Imitation reward (max over demos, ties to the first) for extending the
  // trace by one hypothetical position. begin_step must have seen the
  // current trace. Scheme none always scores zero against demo 0.
  BatchReward candidate_reward(const Path& trace, const Vec3& hypothetical);

 private:
  const DemoSet& demos_;
  Scheme scheme_;
  int level_;
  std::vector<std::vector<Signature>> demo_prefix_sigs_;
  SignatureAccumulator trace_sig_;
  SignatureAccumulator candidate_sig_;
  std::vector<std::size_t> window_anchor_;  // per demo, set by begin_step
  std::vector<Vec3> window_buf_;
  std::vector<double> dtw_scratch_;
};

// One control decision: strongest of 28 candidate moves (the 3x3x3 direction
// grid including staying put, plus the ray toward the observed goal), each
// scaled to action_step and nudged by 10% uniform magnitude jitter, scored
// with the composed step reward at the resolved hypothetical position. The
// baseline term aims at the noisy observed goal; only success detection uses
// the true goal. `demos` here are world-frame (already placed).
Vec3 greedy_controller(const EnvState& env, const DemoSet& demos,
                       Scheme scheme, const RewardConfig& reward, Rng& rng);

// Run one episode under the greedy controller. `demos` are socket-frame and
// get placed at the episode's sampled socket. The curriculum state, when
// given, sets the spawn height range and the return weighting; it is not
// advanced here.
EpisodeResult run_episode(const EnvConfig& cfg, const DemoSet& demos,
                          Scheme scheme, const RewardConfig& reward, Rng& rng,
                          const CurriculumState* curriculum = nullptr);

struct SchemeReport {
  Scheme scheme = Scheme::none;
  std::size_t episodes = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double mean_return = 0.0;
  double wall_ms = 0.0;
};

// Run every scheme over the same episode seed stream (episode i always draws
// from Rng::for_episode(root_seed, i)), against the same socket-frame demos,
// at the same fixed curriculum state. Episodes may be spread over worker
// threads; everything except wall_ms is identical for any thread count.
std::vector<SchemeReport> compare_schemes(
    const EnvConfig& cfg, const DemoSet& demos, const RewardConfig& reward,
    const std::vector<Scheme>& schemes, std::size_t episodes_per_scheme,
    std::uint64_t root_seed, const CurriculumState* curriculum = nullptr,
    unsigned threads = 0);

}  // namespace trajmatch
