// Command-line front end: demo generation, per-timestep reward evaluation,
// window-to-demo matching, scheme comparison experiments and kernel
// benchmarks. Every command is deterministic given its inputs and --seed;
// wall-clock numbers are the only thing that varies between identical runs.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trajmatch/curriculum.hpp"
#include "trajmatch/dtw.hpp"
#include "trajmatch/env.hpp"
#include "trajmatch/geometry.hpp"
#include "trajmatch/io.hpp"
#include "trajmatch/reward.hpp"
#include "trajmatch/rng.hpp"
#include "trajmatch/signature.hpp"

namespace {

using namespace trajmatch;
namespace fs = std::filesystem;

Scheme parse_scheme(const std::string& name) {
  const auto s = scheme_from_name(name);
  if (!s) {
    throw std::runtime_error("unknown scheme \"" + name +
                             "\" (expected none, state, dtw or signature)");
  }
  return *s;
}

void cmd_demos_gen(const std::string& config_file, std::size_t count,
                   std::uint64_t seed, const std::string& out) {
  EnvConfig env;
  if (!config_file.empty()) {
    env = load_experiment_config(config_file).env;
  }
  Rng rng(seed);
  const DemoSet set = generate_disassembly_demos(env, count, rng);
  save_demoset(set, out);
  std::cout << "wrote " << set.size() << " demos to " << out << '\n';
}

void cmd_reward_eval(const std::string& demos_file,
                     const std::string& path_file, const std::string& scheme_s,
                     int level, const std::string& out_file) {
  const Scheme scheme = parse_scheme(scheme_s);
  if (scheme == Scheme::none) {
    throw std::runtime_error(
        "scheme none has no imitation reward to evaluate");
  }
  const DemoSet demos = load_demoset(demos_file);
  const Path query = load_path_file(path_file);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_file.empty()) {
    file.open(out_file);
    if (!file) throw std::runtime_error(out_file + ": cannot open for writing");
    os = &file;
  }

  *os << "t,reward,best_demo\n";
  char row[96];
  for (std::size_t t = 0; t < query.size(); ++t) {
    BatchReward br;
    switch (scheme) {
      case Scheme::state:
        br = batch_state_reward(query[t], demos);
        break;
      case Scheme::dtw:
        br = batch_dtw_reward(window(query, t, ImitationEvaluator::kWindowLength),
                              demos);
        break;
      case Scheme::signature:
        br = batch_signature_reward(extract_segment(query, 0, t), demos, level);
        break;
      case Scheme::none:
        break;
    }
    std::snprintf(row, sizeof(row), "%zu,%.17g,%zu\n", t, br.reward,
                  br.best_demo);
    *os << row;
  }
  if (!*os) {
    throw std::runtime_error(out_file.empty() ? "write failed"
                                              : out_file + ": write failed");
  }
}

void cmd_match(const std::string& demos_file, const std::string& window_file,
               const std::string& scheme_s) {
  const Scheme scheme = parse_scheme(scheme_s);
  if (scheme != Scheme::dtw) {
    throw std::runtime_error("match only supports --scheme dtw");
  }
  const DemoSet demos = load_demoset(demos_file);
  const Path query = load_path_file(window_file);

  // Same segment selection as the batched reward path, but keeping the full
  // alignment so it can be dumped.
  nlohmann::json best;
  double best_reward = -1.0;
  for (std::size_t d = 0; d < demos.size(); ++d) {
    const Path& demo = demos.path(d);
    const std::size_t i0 = closest_point_index(demo, query.points.front());
    const std::size_t i1 =
        closest_point_index(demo, query.points.back(), i0);
    const DtwResult res = dtw_cost(query, extract_segment(demo, i0, i1));
    const double reward = one_minus_tanh(res.cost);
    if (reward > best_reward) {
      best_reward = reward;
      nlohmann::json align = nlohmann::json::array();
      if (res.alignment) {
        for (const auto& [wi, si] : *res.alignment) {
          align.push_back(nlohmann::json::array({wi, si + i0}));
        }
      }
      best = {{"best_demo", d},
              {"demo_id", demos.demos[d].demo_id},
              {"cost", res.cost},
              {"reward", reward},
              {"segment", nlohmann::json::array({i0, i1})},
              {"alignment", std::move(align)}};
    }
  }
  std::cout << best.dump(2) << '\n';
}

// Creates <base>/run-<stamp>[-N] and refuses to reuse an existing directory,
// so every invocation owns its artifacts.
fs::path make_run_dir(const fs::path& base) {
  fs::create_directories(base);
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "run-%Y%m%d-%H%M%S", &tm);
  fs::path dir = base / stamp;
  for (int n = 2; fs::exists(dir); ++n) {
    dir = base / (std::string(stamp) + "-" + std::to_string(n));
  }
  fs::create_directory(dir);
  return dir;
}

void cmd_experiment_run(const std::string& config_file,
                        const std::string& out_dir) {
  const ExperimentConfig cfg = load_experiment_config(config_file);

  // Two independent streams derived from the one configured seed: demo
  // generation must not replay the episode seed sequence.
  Rng root(cfg.seed);
  const std::uint64_t demo_seed = root.next_u64();
  const std::uint64_t episode_seed = root.next_u64();

  Rng demo_rng(demo_seed);
  const DemoSet demos =
      generate_disassembly_demos(cfg.env, cfg.demo_count, demo_rng);
  const CurriculumState curriculum = make_curriculum(cfg.curriculum);

  const std::vector<SchemeReport> reports =
      compare_schemes(cfg.env, demos, cfg.reward, cfg.schemes,
                      cfg.episodes_per_scheme, episode_seed, &curriculum);

  const fs::path dir = make_run_dir(out_dir);
  save_experiment_config(cfg, dir / "config.json");
  save_curriculum(curriculum, dir / "curriculum.json");
  save_scheme_reports(reports, dir / "report.csv");

  for (const SchemeReport& r : reports) {
    std::printf("%-9s  %3zu/%3zu episodes  rate %.3f  mean steps %7.2f  "
                "mean return %9.4f\n",
                scheme_name(r.scheme).c_str(), r.successes, r.episodes,
                r.success_rate, r.mean_steps, r.mean_return);
  }
  std::cout << "wrote " << dir.string() << '\n';
}

void cmd_bench(const std::string& demos_file, std::size_t window_len,
               std::size_t iters, std::uint64_t seed) {
  if (window_len == 0) throw std::runtime_error("--window-len must be >= 1");
  if (iters == 0) throw std::runtime_error("--iters must be >= 1");
  const DemoSet demos = load_demoset(demos_file);

  // Deterministic query: the tail of the first demo, jittered off the demo
  // so the kernels do real work instead of hitting exact matches.
  const Path& d0 = demos.path(0);
  const std::size_t take = std::min(window_len, d0.size());
  Path query = extract_segment(d0, d0.size() - take, d0.size() - 1);
  Rng rng(seed);
  for (Vec3& p : query.points) {
    p.x += rng.uniform(-0.001, 0.001);
    p.y += rng.uniform(-0.001, 0.001);
    p.z += rng.uniform(-0.001, 0.001);
  }

  struct Kernel {
    const char* name;
    std::vector<double> (*run)(const Path&, const DemoSet&, unsigned);
  };
  const Kernel kernels[] = {
      {"dtw",
       [](const Path& q, const DemoSet& ds, unsigned threads) {
         return per_demo_dtw_rewards(q, ds, threads);
       }},
      {"signature",
       [](const Path& q, const DemoSet& ds, unsigned threads) {
         return per_demo_signature_rewards(q, ds, RewardConfig{}.signature_level,
                                           threads);
       }},
  };

  std::cout << "kernel,mode,reward_evals_per_sec\n";
  for (const Kernel& k : kernels) {
    std::vector<double> sequential;
    std::vector<double> parallel;
    double seq_rate = 0.0;
    double par_rate = 0.0;
    for (const bool par : {false, true}) {
      const unsigned threads = par ? 0 : 1;
      std::vector<double> vals;
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t i = 0; i < iters; ++i) {
        vals = k.run(query, demos, threads);
      }
      const auto t1 = std::chrono::steady_clock::now();
      const double secs = std::chrono::duration<double>(t1 - t0).count();
      const double rate =
          static_cast<double>(iters * demos.size()) / std::max(secs, 1e-12);
      (par ? parallel : sequential) = std::move(vals);
      (par ? par_rate : seq_rate) = rate;
      std::printf("%s,%s,%.1f\n", k.name, par ? "parallel" : "sequential",
                  rate);
    }
    if (sequential != parallel) {
      throw std::runtime_error(std::string(k.name) +
                               ": parallel values differ from sequential");
    }
    std::printf("%s,parallel_vs_sequential,%.3fx\n", k.name,
                par_rate / std::max(seq_rate, 1e-12));
  }
  std::cout << "equality: ok\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory matching and reward shaping toolkit"};
  app.require_subcommand(1);

  std::string config_file;
  std::string demos_file;
  std::string path_file;
  std::string out_path;
  std::string scheme = "dtw";
  std::size_t count = 100;
  std::size_t window_len = ImitationEvaluator::kWindowLength;
  std::size_t iters = 100;
  std::uint64_t seed = 1;
  int level = RewardConfig{}.signature_level;

  CLI::App* demos = app.add_subcommand("demos", "Demonstration datasets");
  demos->require_subcommand(1);
  CLI::App* gen = demos->add_subcommand(
      "gen", "Generate reversed-disassembly demos and save them");
  gen->add_option("--config", config_file,
                  "Experiment config supplying the env block");
  gen->add_option("--count", count, "Number of demos")->capture_default_str();
  gen->add_option("--seed", seed, "Root random seed")->capture_default_str();
  gen->add_option("--out", out_path, "Output JSON-lines file")
      ->default_val("demos.jsonl");
  gen->callback([&] { cmd_demos_gen(config_file, count, seed, out_path); });

  CLI::App* reward = app.add_subcommand("reward", "Reward evaluation");
  reward->require_subcommand(1);
  CLI::App* eval = reward->add_subcommand(
      "eval", "Per-timestep imitation rewards along a trajectory (CSV)");
  eval->add_option("--demos", demos_file, "Demo set (JSON lines)")->required();
  eval->add_option("--path", path_file, "Trajectory file, one [x,y,z] per line")
      ->required();
  eval->add_option("--scheme", scheme, "state, dtw or signature")
      ->capture_default_str();
  eval->add_option("--level", level, "Signature truncation level")
      ->capture_default_str();
  eval->add_option("--out", out_path, "CSV output file (default stdout)");
  eval->callback(
      [&] { cmd_reward_eval(demos_file, path_file, scheme, level, out_path); });

  CLI::App* match = app.add_subcommand(
      "match", "Best-matching demo for a query window, with alignment");
  match->add_option("--demos", demos_file, "Demo set (JSON lines)")->required();
  match->add_option("--window", path_file,
                    "Query window file, one [x,y,z] per line")
      ->required();
  match->add_option("--scheme", scheme, "Only dtw produces an alignment")
      ->capture_default_str();
  match->callback([&] { cmd_match(demos_file, path_file, scheme); });

  CLI::App* experiment = app.add_subcommand("experiment", "Scheme comparisons");
  experiment->require_subcommand(1);
  CLI::App* run = experiment->add_subcommand(
      "run", "Compare reward schemes and write report artifacts");
  run->add_option("--config", config_file, "Experiment config (JSON)")
      ->required();
  run->add_option("--out", out_path, "Directory for the timestamped run dir")
      ->required();
  run->callback([&] { cmd_experiment_run(config_file, out_path); });

  CLI::App* bench = app.add_subcommand(
      "bench", "Batched reward kernel throughput, sequential vs parallel");
  bench->add_option("--demos", demos_file, "Demo set (JSON lines)")->required();
  bench->add_option("--window-len", window_len, "Query window length")
      ->capture_default_str();
  bench->add_option("--iters", iters, "Repetitions per mode")
      ->capture_default_str();
  bench->add_option("--seed", seed, "Query jitter seed")->capture_default_str();
  bench->callback([&] { cmd_bench(demos_file, window_len, iters, seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
