#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trajmatch/curriculum.hpp"
#include "trajmatch/demos.hpp"
#include "trajmatch/env.hpp"
#include "trajmatch/reward.hpp"

namespace trajmatch {

// Demo sets travel as JSON lines: one object per demo with demo_id,
// assembly_id, source ("generated" or "imported"), seed and points (array of
// [x,y,z]). Numbers are written with enough digits to round-trip doubles
// exactly. Loading rejects malformed lines (diagnostic names the 1-based
// line number), non-finite coordinates and empty files.
void save_demoset(const DemoSet& set, const std::filesystem::path& file);
DemoSet load_demoset(const std::filesystem::path& file);

// Bare trajectories (query windows, rollout traces) travel as one [x,y,z]
// JSON array per line. Same strictness as demo sets: 1-based line numbers in
// diagnostics, finite coordinates only, empty files rejected.
void save_path_file(const Path& path, const std::filesystem::path& file);
Path load_path_file(const std::filesystem::path& file);

// Everything an experiment run needs, mirrored 1:1 from a JSON document whose
// keys match these field names. Parsing is strict: an unknown key anywhere
// fails with its dotted path, and out-of-range values fail validation.
struct ExperimentConfig {
  EnvConfig env;
  RewardConfig reward;
  CurriculumConfig curriculum;
  std::vector<Scheme> schemes{Scheme::none, Scheme::state, Scheme::dtw,
                              Scheme::signature};
  std::size_t demo_count = 100;
  std::size_t episodes_per_scheme = 500;
  std::uint64_t seed = 1;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& file);
void save_experiment_config(const ExperimentConfig& cfg,
                            const std::filesystem::path& file);
ExperimentConfig experiment_config_from_json_text(const std::string& text);
std::string experiment_config_to_json_text(const ExperimentConfig& cfg);

void save_curriculum(const CurriculumState& s,
                     const std::filesystem::path& file);
CurriculumState load_curriculum(const std::filesystem::path& file);

// CSV with header scheme,episodes,successes,success_rate,mean_steps,
// mean_return,wall_ms; one row per scheme in run order.
void save_scheme_reports(const std::vector<SchemeReport>& reports,
                         const std::filesystem::path& file);

}  // namespace trajmatch
