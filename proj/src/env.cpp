#include "trajmatch/env.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "trajmatch/parallel.hpp"

namespace trajmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_range(const AxisRange& r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw std::invalid_argument(std::string(name) +
                                " must be a finite range with lo <= hi");
  }
}

double sample(const AxisRange& r, Rng& rng) { return rng.uniform(r.lo, r.hi); }

// Resolve one commanded move from a collision-free position: clamp the
// action, then resolve it against the socket geometry: a descending move
// presses onto the block's top face and slides along it, dropping into the
// channel the moment the slide carries the plug over the opening, and motion
// that starts inside the channel is confined by the walls and the floor.
// Committed positions never penetrate solid.

// Fraction-of-motion interval during which a linearly moving coordinate
// stays within half_width of centre. Returns false when it never does;
// when delta is zero the window is the whole move or nothing.
bool crossing_window(double start, double delta, double centre,
                     double half_width, double& lo, double& hi) {
  const double offset = start - centre;
  if (std::abs(delta) < 1e-15) {
    lo = 0.0;
    hi = 1.0;
    return std::abs(offset) <= half_width;
  }
  const double t1 = (-half_width - offset) / delta;
  const double t2 = (half_width - offset) / delta;
  lo = std::min(t1, t2);
  hi = std::max(t1, t2);
  return true;
}

// Motion of a plug already inside the channel: the walls clamp lateral
// motion to their faces, the floor stops descent, and a move that clears
// the rim leaves the channel into free space.
Vec3 confined_move(const EnvConfig& cfg, const Vec3& socket, const Vec3& from,
                   const Vec3& action) {
  const double rim = socket.z + cfg.channel_depth;
  if (from.z + action.z >= rim) {
    return from + action;
  }
  const double hw = cfg.channel_half_width;
  return {std::clamp(from.x + action.x, socket.x - hw, socket.x + hw),
          std::clamp(from.y + action.y, socket.y - hw, socket.y + hw),
          std::max(from.z + action.z, socket.z)};
}

Vec3 resolve_move(const EnvConfig& cfg, const Vec3& socket, const Vec3& from,
                  Vec3 action) {
  const double len = norm(action);
  if (len > cfg.action_step && len > 0.0) {
    action = action * (cfg.action_step / len);
  }
  const double rim = socket.z + cfg.channel_depth;
  if (from.z < rim) {
    return confined_move(cfg, socket, from, action);
  }
  if (action.z < 0.0) {
    const double t_rim = (from.z - rim) / -action.z;
    if (t_rim <= 1.0) {
      const double hw = cfg.channel_half_width;
      double xlo, xhi, ylo, yhi;
      const bool over_x =
          crossing_window(from.x, action.x, socket.x, hw, xlo, xhi);
      const bool over_y =
          crossing_window(from.y, action.y, socket.y, hw, ylo, yhi);
      if (over_x && over_y) {
        const double entry = std::max({t_rim, xlo, ylo});
        if (entry <= 1.0 && entry <= std::min(xhi, yhi)) {
          const Vec3 at_mouth{from.x + entry * action.x,
                              from.y + entry * action.y, rim};
          return confined_move(cfg, socket, at_mouth, action * (1.0 - entry));
        }
      }
      const Vec3 q = from + action;
      if (in_collision(cfg, socket, q)) {
        return {q.x, q.y, rim};
      }
      return q;
    }
  }
  return from + action;
}

}  // namespace

void validate_env_config(const EnvConfig& cfg) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be > 0");
    }
  };
  positive(cfg.channel_half_width, "channel_half_width");
  positive(cfg.channel_depth, "channel_depth");
  positive(cfg.plug_radius, "plug_radius");
  positive(cfg.block_half_extent, "block_half_extent");
  positive(cfg.action_step, "action_step");
  positive(cfg.success_tolerance, "success_tolerance");
  positive(cfg.demo_lateral_range, "demo_lateral_range");
  positive(cfg.mouth_clearance, "mouth_clearance");
  if (cfg.block_half_extent <= cfg.channel_half_width) {
    throw std::invalid_argument(
        "block_half_extent must exceed channel_half_width");
  }
  check_range(cfg.socket_position_ranges[0], "socket_position_ranges[x]");
  check_range(cfg.socket_position_ranges[1], "socket_position_ranges[y]");
  check_range(cfg.socket_position_ranges[2], "socket_position_ranges[z]");
  check_range(cfg.plug_offset_ranges[0], "plug_offset_ranges[x]");
  check_range(cfg.plug_offset_ranges[1], "plug_offset_ranges[y]");
  check_range(cfg.plug_offset_ranges[2], "plug_offset_ranges[z]");
  check_range(cfg.observation_noise_ranges[0], "observation_noise_ranges[x]");
  check_range(cfg.observation_noise_ranges[1], "observation_noise_ranges[y]");
  check_range(cfg.observation_noise_ranges[2], "observation_noise_ranges[z]");
  if (cfg.plug_offset_ranges[2].lo <= 0.0) {
    throw std::invalid_argument("plug spawn height must start above the mouth");
  }
  if (!std::isfinite(cfg.observation_rotation_noise_deg) ||
      cfg.observation_rotation_noise_deg < 0.0 ||
      cfg.observation_rotation_noise_deg >= 90.0) {
    throw std::invalid_argument(
        "observation_rotation_noise_deg must be in [0, 90)");
  }
  if (cfg.max_steps == 0) {
    throw std::invalid_argument("max_steps must be >= 1");
  }
  if (!(cfg.demo_height_min > 0.0) ||
      cfg.demo_height_max < cfg.demo_height_min) {
    throw std::invalid_argument(
        "demo height range must be positive with min <= max");
  }
  if (!std::isfinite(cfg.drift_climb_slope) || cfg.drift_climb_slope < 0.0) {
    throw std::invalid_argument("drift_climb_slope must be >= 0");
  }
  if (!std::isfinite(cfg.demo_waypoint_spacing) ||
      cfg.demo_waypoint_spacing < 0.0) {
    throw std::invalid_argument("demo_waypoint_spacing must be >= 0");
  }
}

bool in_collision(const EnvConfig& cfg, const Vec3& socket, const Vec3& p) {
  if (p.z < socket.z) return true;  // below the table surface
  const double dx = std::abs(p.x - socket.x);
  const double dy = std::abs(p.y - socket.y);
  const bool in_footprint =
      dx < cfg.block_half_extent && dy < cfg.block_half_extent;
  if (!in_footprint) return false;
  if (p.z >= socket.z + cfg.channel_depth) return false;  // above the rim
  const bool in_channel =
      dx <= cfg.channel_half_width && dy <= cfg.channel_half_width;
  return !in_channel;
}

EnvState make_env(const EnvConfig& cfg, Rng& rng,
                  std::optional<double> initial_height) {
  validate_env_config(cfg);
  EnvState env;
  env.config = cfg;
  env.socket_position = {sample(cfg.socket_position_ranges[0], rng),
                         sample(cfg.socket_position_ranges[1], rng),
                         sample(cfg.socket_position_ranges[2], rng)};
  const double ox = sample(cfg.plug_offset_ranges[0], rng);
  const double oy = sample(cfg.plug_offset_ranges[1], rng);
  const double h =
      initial_height ? *initial_height : sample(cfg.plug_offset_ranges[2], rng);
  if (!(h > 0.0)) {
    throw std::invalid_argument("initial height must be above the mouth");
  }
  const double rim = env.socket_position.z + cfg.channel_depth;
  env.plug_position = {env.socket_position.x + ox, env.socket_position.y + oy,
                       rim + h};
  Vec3 noise = {sample(cfg.observation_noise_ranges[0], rng),
                sample(cfg.observation_noise_ranges[1], rng),
                sample(cfg.observation_noise_ranges[2], rng)};
  // A rotation misreading of the insertion axis shows up at the goal as a
  // lateral miss of depth * tan(angle) per axis.
  const double max_rad = cfg.observation_rotation_noise_deg *
                         std::numbers::pi / 180.0;
  const double tilt_x = rng.uniform(-max_rad, max_rad);
  const double tilt_y = rng.uniform(-max_rad, max_rad);
  noise.x += cfg.channel_depth * std::tan(tilt_x);
  noise.y += cfg.channel_depth * std::tan(tilt_y);
  env.observed_goal = env.socket_position + noise;
  env.trace.points.push_back(env.plug_position);
  return env;
}

EnvState make_env_at(const EnvConfig& cfg, const Vec3& socket_position,
                     const Vec3& plug_position) {
  validate_env_config(cfg);
  if (in_collision(cfg, socket_position, plug_position)) {
    throw std::invalid_argument("plug spawn position is inside solid");
  }
  EnvState env;
  env.config = cfg;
  env.socket_position = socket_position;
  env.observed_goal = socket_position;
  env.plug_position = plug_position;
  env.trace.points.push_back(plug_position);
  return env;
}

void step(EnvState& env, const Vec3& action) {
  if (env.done) {
    throw std::logic_error("step called on a finished episode");
  }
  if (!std::isfinite(action.x) || !std::isfinite(action.y) ||
      !std::isfinite(action.z)) {
    throw std::invalid_argument("action has a non-finite component");
  }
  env.plug_position =
      resolve_move(env.config, env.socket_position, env.plug_position, action);
  env.trace.points.push_back(env.plug_position);
  ++env.step_count;
  if (distance(env.plug_position, env.socket_position) <
      env.config.success_tolerance) {
    env.success = true;
    env.done = true;
  } else if (env.step_count >= env.config.max_steps) {
    env.done = true;
  }
}

DemoSet generate_disassembly_demos(const EnvConfig& cfg, std::size_t count,
                                   Rng& rng) {
  validate_env_config(cfg);
  DemoSet set;
  set.assembly_id = "square-channel-plug";
  set.demos.reserve(count);
  // Waypoints at most 95% of the action step apart: replaying the
  // differences through step() never triggers the clamp, so the path
  // reproduces exactly.
  const double limit = 0.95 * cfg.action_step;
  const double spacing = cfg.demo_waypoint_spacing > 0.0
                             ? std::min(cfg.demo_waypoint_spacing, limit)
                             : limit;
  for (std::size_t d = 0; d < count; ++d) {
    const std::uint64_t seed = rng.next_u64();
    Rng demo_rng(seed);
    Path out;  // disassembly order: goal first
    out.points.push_back({0.0, 0.0, 0.0});
    const double clear_z = cfg.channel_depth + cfg.mouth_clearance;
    double z = 0.0;
    while (z < clear_z) {
      z = std::min(clear_z, z + spacing);
      out.points.push_back({0.0, 0.0, z});
    }
    const Vec3 free_pose = {
        demo_rng.uniform(-cfg.demo_lateral_range, cfg.demo_lateral_range),
        demo_rng.uniform(-cfg.demo_lateral_range, cfg.demo_lateral_range),
        cfg.channel_depth +
            demo_rng.uniform(cfg.demo_height_min, cfg.demo_height_max)};
    const double lat = std::hypot(free_pose.x, free_pose.y);
    const double apex = clear_z + cfg.drift_climb_slope * lat;
    const auto straight_to = [&](const Vec3& target) {
      const Vec3 from = out.points.back();
      const double len = distance(from, target);
      const std::size_t steps = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(len / spacing)));
      for (std::size_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        out.points.push_back(from + (target - from) * t);
      }
    };
    if (cfg.drift_climb_slope > 0.0 && apex < free_pose.z && lat > 0.0) {
      // Slide outward low over the block, climbing gently, then lift.
      straight_to({free_pose.x, free_pose.y, apex});
      straight_to(free_pose);
    } else {
      straight_to(free_pose);
    }
    Demo demo;
    demo.demo_id = "demo-" + std::to_string(d);
    demo.source = DemoSource::generated;
    demo.seed = seed;
    demo.path = reverse_path(out);
    set.demos.push_back(std::move(demo));
  }
  return set;
}

DemoSet demos_in_world(const DemoSet& socket_frame,
                       const Vec3& socket_position) {
  DemoSet out = socket_frame;
  for (Demo& d : out.demos) {
    for (Vec3& p : d.path.points) p = p + socket_position;
  }
  return out;
}

EpisodeResult replay_demo(const EnvConfig& cfg, const Path& socket_frame_demo,
                          const Vec3& socket_position) {
  validate_path(socket_frame_demo);
  EnvState env = make_env_at(cfg, socket_position,
                             socket_frame_demo.front() + socket_position);
  for (std::size_t k = 1; k < socket_frame_demo.size() && !env.done; ++k) {
    step(env, socket_frame_demo[k] - socket_frame_demo[k - 1]);
  }
  EpisodeResult res;
  res.success = env.success;
  res.steps_taken = env.step_count;
  res.trace = env.trace;
  return res;
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::none:
      return "none";
    case Scheme::state:
      return "state";
    case Scheme::dtw:
      return "dtw";
    case Scheme::signature:
      return "signature";
  }
  return "none";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  if (name == "none") return Scheme::none;
  if (name == "state") return Scheme::state;
  if (name == "dtw") return Scheme::dtw;
  if (name == "signature") return Scheme::signature;
  return std::nullopt;
}

ImitationEvaluator::ImitationEvaluator(const DemoSet& demos, Scheme scheme,
                                       const RewardConfig& reward)
    : demos_(demos),
      scheme_(scheme),
      level_(reward.signature_level),
      trace_sig_(reward.signature_level),
      candidate_sig_(reward.signature_level) {
  if (scheme_ != Scheme::none && demos_.empty()) {
    throw std::invalid_argument("imitation schemes require at least one demo");
  }
  if (scheme_ == Scheme::signature) {
    demo_prefix_sigs_.reserve(demos_.size());
    for (std::size_t d = 0; d < demos_.size(); ++d) {
      demo_prefix_sigs_.push_back(prefix_signatures(demos_.path(d), level_));
    }
  }
  if (scheme_ == Scheme::dtw) {
    window_anchor_.assign(demos_.size(), 0);
    std::size_t longest = 1;
    for (const Demo& d : demos_.demos) {
      longest = std::max(longest, d.path.size());
    }
    window_buf_.reserve(kWindowLength);
    dtw_scratch_.assign(2 * (longest + 1), 0.0);
  }
}

void ImitationEvaluator::on_episode_start(const Vec3& spawn) {
  if (scheme_ == Scheme::signature) trace_sig_.start(spawn);
}

void ImitationEvaluator::on_step_committed(const Vec3& p) {
  if (scheme_ == Scheme::signature) trace_sig_.extend(p);
}

void ImitationEvaluator::begin_step(const Path& trace) {
  if (scheme_ != Scheme::dtw) return;
  // First point of every candidate window: the extended path has length
  // trace.size() + 1, so the window starts that many points back.
  const std::size_t ext_len = trace.size() + 1;
  const std::size_t first =
      ext_len > kWindowLength ? ext_len - kWindowLength : 0;
  const Vec3& anchor_point = trace[first];
  for (std::size_t d = 0; d < demos_.size(); ++d) {
    window_anchor_[d] = closest_point_index(demos_.path(d), anchor_point, 0);
  }
}

BatchReward ImitationEvaluator::candidate_reward(const Path& trace,
                                                 const Vec3& hypothetical) {
  if (scheme_ == Scheme::none) return {0.0, 0};
  BatchReward best{-kInf, 0};
  const auto consider = [&best](double r, std::size_t d) {
    if (r > best.reward) {
      best.reward = r;
      best.best_demo = d;
    }
  };
  switch (scheme_) {
    case Scheme::state: {
      for (std::size_t d = 0; d < demos_.size(); ++d) {
        double nearest = kInf;
        for (const Vec3& q : demos_.path(d).points) {
          nearest = std::min(nearest, squared_distance(hypothetical, q));
        }
        consider(one_minus_tanh(std::sqrt(nearest)), d);
      }
      break;
    }
    case Scheme::dtw: {
      const std::size_t ext_len = trace.size() + 1;
      const std::size_t first =
          ext_len > kWindowLength ? ext_len - kWindowLength : 0;
      window_buf_.assign(trace.points.begin() + first, trace.points.end());
      window_buf_.push_back(hypothetical);
      for (std::size_t d = 0; d < demos_.size(); ++d) {
        const Path& demo = demos_.path(d);
        const std::size_t i0 = window_anchor_[d];
        const std::size_t i1 = closest_point_index(demo, hypothetical, i0);
        const std::span<const Vec3> segment(demo.points.data() + i0,
                                            i1 - i0 + 1);
        const double cost = dtw_cost_span(window_buf_, segment, dtw_scratch_);
        consider(one_minus_tanh(cost), d);
      }
      break;
    }
    case Scheme::signature: {
      candidate_sig_ = trace_sig_;
      candidate_sig_.extend(hypothetical);
      for (std::size_t d = 0; d < demos_.size(); ++d) {
        const std::size_t j =
            closest_point_index(demos_.path(d), hypothetical, 0);
        const double dist =
            signature_distance(candidate_sig_.value(), demo_prefix_sigs_[d][j]);
        consider(one_minus_tanh(dist), d);
      }
      break;
    }
    case Scheme::none:
      break;
  }
  return best;
}

namespace {

struct ControllerChoice {
  Vec3 action;
  double imitation = 0.0;
};

// Shared by greedy_controller and run_episode; one jitter draw per candidate
// in a fixed order keeps the rng stream identical between the two entry
// points and across schemes.
ControllerChoice choose_action(const EnvState& env, ImitationEvaluator& eval,
                               const RewardConfig& reward, Rng& rng) {
  const EnvConfig& cfg = env.config;
  ControllerChoice chosen;
  double best_score = -kInf;
  double best_imitation = 0.0;
  Vec3 best_action{0.0, 0.0, 0.0};
  bool have_best = false;
  const auto try_candidate = [&](Vec3 direction, double jitter) {
    const double len = norm(direction);
    Vec3 action{0.0, 0.0, 0.0};
    if (len > 0.0) {
      action = direction * (cfg.action_step * (1.0 + jitter) / len);
    }
    const Vec3 hyp =
        resolve_move(cfg, env.socket_position, env.plug_position, action);
    const BatchReward imit = eval.candidate_reward(env.trace, hyp);
    const double baseline = distance_to_goal_reward(hyp, env.observed_goal,
                                                    reward.goal_distance_scale);
    const double score =
        total_step_reward(baseline, imit.reward, reward);
    if (!have_best || score > best_score) {
      have_best = true;
      best_score = score;
      best_imitation = imit.reward;
      best_action = action;
    }
  };
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dz = -1; dz <= 1; ++dz) {
        const double jitter = rng.uniform(-0.1, 0.1);
        try_candidate({static_cast<double>(dx), static_cast<double>(dy),
                       static_cast<double>(dz)},
                      jitter);
      }
    }
  }
  const double jitter = rng.uniform(-0.1, 0.1);
  try_candidate(env.observed_goal - env.plug_position, jitter);
  chosen.action = best_action;
  chosen.imitation = best_imitation;
  return chosen;
}

}  // namespace

Vec3 greedy_controller(const EnvState& env, const DemoSet& demos,
                       Scheme scheme, const RewardConfig& reward, Rng& rng) {
  validate_reward_config(reward);
  ImitationEvaluator eval(demos, scheme, reward);
  if (scheme == Scheme::signature) {
    // Rebuild the running signature from the trace so a standalone call
    // scores candidates exactly as the episode loop would.
    eval.on_episode_start(env.trace[0]);
    for (std::size_t k = 1; k < env.trace.size(); ++k) {
      eval.on_step_committed(env.trace[k]);
    }
  }
  eval.begin_step(env.trace);
  return choose_action(env, eval, reward, rng).action;
}

EpisodeResult run_episode(const EnvConfig& cfg, const DemoSet& demos,
                          Scheme scheme, const RewardConfig& reward, Rng& rng,
                          const CurriculumState* curriculum) {
  validate_reward_config(reward);
  std::optional<double> height;
  if (curriculum) height = sample_initial_height(*curriculum, rng);
  EnvState env = make_env(cfg, rng, height);
  const DemoSet world = demos_in_world(demos, env.socket_position);
  ImitationEvaluator eval(world, scheme, reward);
  eval.on_episode_start(env.plug_position);
  std::vector<StepRecord> records;
  records.reserve(cfg.max_steps);
  while (!env.done) {
    eval.begin_step(env.trace);
    const ControllerChoice choice = choose_action(env, eval, reward, rng);
    step(env, choice.action);
    eval.on_step_committed(env.plug_position);
    StepRecord rec;
    rec.goal_distance = distance(env.plug_position, env.socket_position);
    rec.distance_reward = distance_to_goal_reward(
        env.plug_position, env.socket_position, reward.goal_distance_scale);
    rec.imitation_reward = choice.imitation;
    records.push_back(rec);
  }
  EpisodeResult res;
  res.success = env.success;
  res.steps_taken = env.step_count;
  res.episode_return = horizon_return(
      records, curriculum ? curriculum_weight(*curriculum) : 1.0, reward);
  res.trace = std::move(env.trace);
  return res;
}

std::vector<SchemeReport> compare_schemes(
    const EnvConfig& cfg, const DemoSet& demos, const RewardConfig& reward,
    const std::vector<Scheme>& schemes, std::size_t episodes_per_scheme,
    std::uint64_t root_seed, const CurriculumState* curriculum,
    unsigned threads) {
  validate_env_config(cfg);
  validate_reward_config(reward);
  if (episodes_per_scheme == 0) {
    throw std::invalid_argument("episodes_per_scheme must be >= 1");
  }
  std::vector<SchemeReport> reports;
  reports.reserve(schemes.size());
  for (Scheme scheme : schemes) {
    struct Outcome {
      bool success;
      std::size_t steps;
      double ret;
    };
    std::vector<Outcome> outcomes(episodes_per_scheme);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(episodes_per_scheme, threads, [&](std::size_t i) {
      Rng rng = Rng::for_episode(root_seed, i);
      const EpisodeResult r =
          run_episode(cfg, demos, scheme, reward, rng, curriculum);
      outcomes[i] = {r.success, r.steps_taken, r.episode_return};
    });
    const auto t1 = std::chrono::steady_clock::now();
    SchemeReport rep;
    rep.scheme = scheme;
    rep.episodes = episodes_per_scheme;
    for (const Outcome& o : outcomes) {
      rep.successes += o.success ? 1 : 0;
      rep.mean_steps += static_cast<double>(o.steps);
      rep.mean_return += o.ret;
    }
    const double n = static_cast<double>(episodes_per_scheme);
    rep.success_rate = static_cast<double>(rep.successes) / n;
    rep.mean_steps /= n;
    rep.mean_return /= n;
    rep.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace trajmatch
