#include "trajmatch/env.hpp"

#include <stdexcept>
#include <cmath>

#include "doctest.h"

using namespace trajmatch;

namespace {

EnvConfig small_config() {
  EnvConfig cfg;
  cfg.max_steps = 60;
  return cfg;
}

}  // namespace

TEST_CASE("collision geometry: table, block, channel, rim") {
  EnvConfig cfg;
  const Vec3 s{0.5, 0.0, 0.17};
  const double rim = s.z + cfg.channel_depth;
  // Free space above the rim and outside the footprint.
  CHECK_FALSE(in_collision(cfg, s, {0.5, 0.0, rim + 0.001}));
  CHECK_FALSE(in_collision(cfg, s, {0.5 + 0.2, 0.0, s.z + 0.001}));
  // Below the table is solid everywhere.
  CHECK(in_collision(cfg, s, {0.9, 0.4, s.z - 1e-9}));
  // Inside the block body but outside the channel.
  CHECK(in_collision(cfg, s, {0.51, 0.0, rim - 0.001}));
  CHECK(in_collision(cfg, s, {0.5 + 0.001, 0.0, rim - 0.001}));
  // Down the channel, walls included.
  CHECK_FALSE(in_collision(cfg, s, {0.5, 0.0, s.z + 0.001}));
  CHECK_FALSE(
      in_collision(cfg, s, {0.5 + cfg.channel_half_width, 0.0, s.z + 0.01}));
  // Just past the channel wall.
  CHECK(in_collision(
      cfg, s, {0.5 + cfg.channel_half_width + 1e-6, 0.0, rim - 0.001}));
  // Resting exactly on the rim surface is contact, not penetration.
  CHECK_FALSE(in_collision(cfg, s, {0.51, 0.0, rim}));
}

TEST_CASE("make_env spawns above the mouth with bounded offsets") {
  EnvConfig cfg;
  Rng rng(900);
  for (int i = 0; i < 50; ++i) {
    const EnvState env = make_env(cfg, rng);
    const Vec3& s = env.socket_position;
    CHECK(s.x >= 0.40);
    CHECK(s.x <= 0.60);
    CHECK(s.y >= -0.10);
    CHECK(s.y <= 0.10);
    CHECK(s.z >= 0.16);
    CHECK(s.z <= 0.18);
    const double rim = s.z + cfg.channel_depth;
    CHECK(env.plug_position.z >= rim + 0.010);
    CHECK(env.plug_position.z <= rim + 0.020);
    CHECK(std::abs(env.plug_position.x - s.x) <= 0.010);
    CHECK(std::abs(env.plug_position.y - s.y) <= 0.010);
    CHECK_FALSE(in_collision(cfg, s, env.plug_position));
    CHECK(env.trace.size() == 1);
    CHECK_FALSE(env.done);
    // Observed goal carries position noise plus the planar tilt term.
    const double tilt =
        cfg.channel_depth *
        std::tan(cfg.observation_rotation_noise_deg * 3.14159265358979 / 180.0);
    CHECK(std::abs(env.observed_goal.x - s.x) <= 0.002 + tilt + 1e-9);
    CHECK(std::abs(env.observed_goal.y - s.y) <= 0.002 + tilt + 1e-9);
    CHECK(std::abs(env.observed_goal.z - s.z) <= 0.002 + 1e-12);
  }
}

TEST_CASE("equal seeds reproduce the episode exactly") {
  EnvConfig cfg;
  Rng r1(1234);
  Rng r2(1234);
  const EnvState a = make_env(cfg, r1);
  const EnvState b = make_env(cfg, r2);
  CHECK(a.plug_position == b.plug_position);
  CHECK(a.socket_position == b.socket_position);
  CHECK(a.observed_goal == b.observed_goal);
}

TEST_CASE("curriculum override pins the spawn height") {
  EnvConfig cfg;
  Rng rng(55);
  const EnvState env = make_env(cfg, rng, 0.015);
  const double rim = env.socket_position.z + cfg.channel_depth;
  CHECK(env.plug_position.z == doctest::Approx(rim + 0.015).epsilon(1e-12));
  CHECK_THROWS_AS(make_env(cfg, rng, -0.01), std::invalid_argument);
}

TEST_CASE("step clamps the action and slides instead of penetrating") {
  EnvConfig cfg = small_config();
  const Vec3 s{0.5, 0.0, 0.17};
  const double rim = s.z + cfg.channel_depth;

  SUBCASE("clamped to action_step") {
    EnvState env = make_env_at(cfg, s, {0.5, 0.0, rim + 0.015});
    step(env, {0.0, 0.0, 1.0});  // metre-long command
    CHECK(distance(env.plug_position, {0.5, 0.0, rim + 0.015}) <=
          cfg.action_step + 1e-12);
  }

  SUBCASE("descent onto the rim face is blocked, lateral motion survives") {
    EnvState env = make_env_at(cfg, s, {0.52, 0.0, rim + 0.0005});
    step(env, {0.001, 0.0, -0.0015});
    CHECK(env.plug_position.x == doctest::Approx(0.521));
    CHECK(env.plug_position.z == doctest::Approx(rim + 0.0005));
  }

  SUBCASE("inside the channel lateral motion is blocked, descent survives") {
    EnvState env = make_env_at(cfg, s, {0.5, 0.0, rim - 0.005});
    step(env, {0.001, 0.0, -0.001});
    CHECK(env.plug_position.x == doctest::Approx(0.5));
    CHECK(env.plug_position.z == doctest::Approx(rim - 0.006));
  }

  SUBCASE("trace and counters update") {
    EnvState env = make_env_at(cfg, s, {0.5, 0.0, rim + 0.01});
    step(env, {0.0, 0.0, -0.001});
    CHECK(env.step_count == 1);
    CHECK(env.trace.size() == 2);
    CHECK(env.trace.back() == env.plug_position);
  }

  SUBCASE("success inside the tolerance ends the episode") {
    EnvState env = make_env_at(cfg, s, {0.5, 0.0, s.z + 0.0025});
    step(env, {0.0, 0.0, -0.001});
    CHECK(env.success);
    CHECK(env.done);
    CHECK_THROWS_AS(step(env, {0, 0, 0}), std::logic_error);
  }

  SUBCASE("running out of steps ends without success") {
    cfg.max_steps = 3;
    EnvState env = make_env_at(cfg, s, {0.5, 0.0, rim + 0.015});
    for (int i = 0; i < 3; ++i) step(env, {0.0, 0.0, 0.0001});
    CHECK(env.done);
    CHECK_FALSE(env.success);
  }
}

TEST_CASE("no committed position ever penetrates solid") {
  EnvConfig cfg = small_config();
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    EnvState env = make_env(cfg, rng);
    while (!env.done) {
      step(env, {rng.uniform(-0.003, 0.003), rng.uniform(-0.003, 0.003),
                 rng.uniform(-0.003, 0.003)});
    }
    for (const Vec3& p : env.trace.points) {
      CHECK_FALSE(in_collision(cfg, env.socket_position, p));
    }
  }
}

TEST_CASE("demos retract, drift, reverse, and end exactly at the goal") {
  EnvConfig cfg;
  Rng rng(31);
  const DemoSet demos = generate_disassembly_demos(cfg, 20, rng);
  REQUIRE(demos.size() == 20);
  for (const Demo& d : demos.demos) {
    const Path& p = d.path;
    REQUIRE(p.size() >= 2);
    // Forward order: starts in free space, ends exactly at the goal.
    CHECK(p.back() == Vec3{0, 0, 0});
    CHECK(p.front().z >= cfg.channel_depth + cfg.demo_height_min - 1e-12);
    CHECK(std::abs(p.front().x) <= cfg.demo_lateral_range);
    CHECK(std::abs(p.front().y) <= cfg.demo_lateral_range);
    // Spacing below the action step so replay never clamps.
    for (std::size_t k = 1; k < p.size(); ++k) {
      CHECK(distance(p[k], p[k - 1]) <= cfg.action_step + 1e-12);
    }
    // Socket-frame collision-free throughout.
    for (const Vec3& q : p.points) {
      CHECK_FALSE(in_collision(cfg, {0, 0, 0}, q));
    }
    CHECK(d.source == DemoSource::generated);
  }
  // Seeds differ, so free poses differ.
  CHECK(demos.path(0).front().x != demos.path(1).front().x);
}

TEST_CASE("demo start poses cover the episode spawn range") {
  EnvConfig cfg;
  Rng rng(37);
  const DemoSet demos = generate_disassembly_demos(cfg, 200, rng);
  double zlo = 1e9;
  double zhi = -1e9;
  double xlo = 1e9;
  double xhi = -1e9;
  for (const Demo& d : demos.demos) {
    const Vec3& f = d.path.front();
    zlo = std::min(zlo, f.z - cfg.channel_depth);
    zhi = std::max(zhi, f.z - cfg.channel_depth);
    xlo = std::min(xlo, f.x);
    xhi = std::max(xhi, f.x);
  }
  // Episode spawns draw heights from [0.010, 0.020] and lateral offsets from
  // [-0.01, 0.01]; demo starts must reach past both ends.
  CHECK(zlo <= 0.011);
  CHECK(zhi >= 0.019);
  CHECK(xlo <= -0.009);
  CHECK(xhi >= 0.009);
}

TEST_CASE("replaying a demo through the env reaches the goal") {
  EnvConfig cfg;
  Rng rng(41);
  const DemoSet demos = generate_disassembly_demos(cfg, 10, rng);
  for (const Demo& d : demos.demos) {
    const EpisodeResult r = replay_demo(cfg, d.path, {0.52, -0.03, 0.165});
    CHECK(r.success);
  }
}

TEST_CASE("demos_in_world translates every point") {
  EnvConfig cfg;
  Rng rng(43);
  const DemoSet demos = generate_disassembly_demos(cfg, 3, rng);
  const Vec3 s{0.5, -0.02, 0.17};
  const DemoSet world = demos_in_world(demos, s);
  for (std::size_t d = 0; d < demos.size(); ++d) {
    REQUIRE(world.path(d).size() == demos.path(d).size());
    for (std::size_t k = 0; k < demos.path(d).size(); ++k) {
      CHECK(world.path(d)[k] == demos.path(d)[k] + s);
    }
  }
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::none, Scheme::state, Scheme::dtw,
                   Scheme::signature}) {
    CHECK(scheme_from_name(scheme_name(s)) == s);
  }
  CHECK_FALSE(scheme_from_name("bogus").has_value());
}

TEST_CASE("evaluator rewards equal the batch recipes on the extended trace") {
  EnvConfig cfg;
  Rng rng(47);
  const DemoSet socket_frame = generate_disassembly_demos(cfg, 8, rng);
  const Vec3 socket{0.5, 0.0, 0.17};
  const DemoSet world = demos_in_world(socket_frame, socket);
  RewardConfig reward;

  // Build a short synthetic trace descending toward the mouth.
  Path trace;
  for (int k = 0; k < 14; ++k) {
    trace.points.push_back(
        {0.505 - 0.0003 * k, 0.002, 0.17 + 0.035 - 0.001 * k});
  }
  const Vec3 hyp{0.5008, 0.0018, 0.2005};

  Path extended = trace;
  extended.points.push_back(hyp);

  SUBCASE("dtw") {
    ImitationEvaluator eval(world, Scheme::dtw, reward);
    eval.begin_step(trace);
    const BatchReward got = eval.candidate_reward(trace, hyp);
    const Path w = window(extended, extended.size() - 1,
                          ImitationEvaluator::kWindowLength);
    const BatchReward expect = batch_dtw_reward(w, world, 1);
    CHECK(got.reward == expect.reward);
    CHECK(got.best_demo == expect.best_demo);
  }

  SUBCASE("signature") {
    ImitationEvaluator eval(world, Scheme::signature, reward);
    eval.on_episode_start(trace[0]);
    for (std::size_t k = 1; k < trace.size(); ++k) {
      eval.on_step_committed(trace[k]);
    }
    eval.begin_step(trace);
    const BatchReward got = eval.candidate_reward(trace, hyp);
    const BatchReward expect =
        batch_signature_reward(extended, world, reward.signature_level, 1);
    CHECK(got.reward == expect.reward);
    CHECK(got.best_demo == expect.best_demo);
  }

  SUBCASE("state") {
    ImitationEvaluator eval(world, Scheme::state, reward);
    eval.begin_step(trace);
    const BatchReward got = eval.candidate_reward(trace, hyp);
    const BatchReward expect = batch_state_reward(hyp, world);
    CHECK(got.reward == expect.reward);
    CHECK(got.best_demo == expect.best_demo);
  }

  SUBCASE("none") {
    ImitationEvaluator eval(world, Scheme::none, reward);
    eval.begin_step(trace);
    const BatchReward got = eval.candidate_reward(trace, hyp);
    CHECK(got.reward == 0.0);
  }
}

TEST_CASE("run_episode is deterministic in the seed") {
  EnvConfig cfg = small_config();
  Rng drng(51);
  const DemoSet demos = generate_disassembly_demos(cfg, 6, drng);
  RewardConfig reward;
  Rng r1 = Rng::for_episode(99, 3);
  Rng r2 = Rng::for_episode(99, 3);
  const EpisodeResult a = run_episode(cfg, demos, Scheme::dtw, reward, r1);
  const EpisodeResult b = run_episode(cfg, demos, Scheme::dtw, reward, r2);
  CHECK(a.success == b.success);
  CHECK(a.steps_taken == b.steps_taken);
  CHECK(a.episode_return == b.episode_return);
  CHECK(a.trace.points == b.trace.points);
}

TEST_CASE("run_episode trace stays collision-free and inside step bounds") {
  EnvConfig cfg = small_config();
  Rng drng(53);
  const DemoSet demos = generate_disassembly_demos(cfg, 6, drng);
  RewardConfig reward;
  for (Scheme scheme :
       {Scheme::none, Scheme::state, Scheme::dtw, Scheme::signature}) {
    Rng rng = Rng::for_episode(7, 0);
    const EpisodeResult r = run_episode(cfg, demos, scheme, reward, rng);
    CHECK(r.steps_taken >= 1);
    CHECK(r.steps_taken <= cfg.max_steps);
    CHECK(r.trace.size() == r.steps_taken + 1);
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      CHECK(distance(r.trace[k], r.trace[k - 1]) <= cfg.action_step + 1e-12);
    }
  }
}

TEST_CASE("compare_schemes reports identical numbers for any thread count") {
  EnvConfig cfg = small_config();
  cfg.max_steps = 40;
  Rng drng(57);
  const DemoSet demos = generate_disassembly_demos(cfg, 5, drng);
  RewardConfig reward;
  const std::vector<Scheme> schemes{Scheme::none, Scheme::dtw};
  const auto seq = compare_schemes(cfg, demos, reward, schemes, 6, 11, nullptr, 1);
  const auto par = compare_schemes(cfg, demos, reward, schemes, 6, 11, nullptr, 3);
  REQUIRE(seq.size() == 2);
  REQUIRE(par.size() == 2);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].scheme == par[i].scheme);
    CHECK(seq[i].successes == par[i].successes);
    CHECK(seq[i].success_rate == par[i].success_rate);
    CHECK(seq[i].mean_steps == par[i].mean_steps);
    CHECK(seq[i].mean_return == par[i].mean_return);
  }
}

TEST_CASE("greedy_controller returns an action within the step budget") {
  EnvConfig cfg;
  Rng drng(61);
  const DemoSet socket_frame = generate_disassembly_demos(cfg, 4, drng);
  Rng rng(62);
  EnvState env = make_env(cfg, rng);
  const DemoSet world = demos_in_world(socket_frame, env.socket_position);
  RewardConfig reward;
  const Vec3 a = greedy_controller(env, world, Scheme::dtw, reward, rng);
  // The jittered magnitude may exceed the step budget by at most 10%; the
  // env clamps the rest of the way.
  CHECK(norm(a) <= cfg.action_step * 1.1 + 1e-12);
}
