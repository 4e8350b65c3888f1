#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trajmatch/rng.hpp"

namespace trajmatch {

// Sampling-based curriculum over the initial height of the plug above the
// socket mouth. Every stage samples from [stage lower bound, height_max];
// the lower bound rises linearly from height_min_initial (stage 1) to
// height_min_final (stage num_stages), so later stages drop the easy short
// descents while the hardest starts stay reachable throughout.
struct CurriculumConfig {
  int num_stages = 4;
  double height_min_initial = 0.010;  // metres above the socket mouth
  double height_min_final = 0.018;
  double height_max = 0.020;
  std::size_t window = 100;           // trailing episodes per advancement check
  double advance_threshold = 0.8;     // strict: rate must exceed this
};

void validate_curriculum_config(const CurriculumConfig& cfg);

struct CurriculumState {
  CurriculumConfig config;
  int stage = 1;                      // 1-based, never decreases
  std::vector<bool> recent;           // trailing window, oldest first
};

CurriculumState make_curriculum(const CurriculumConfig& cfg);

// Lower bound of the sampling range at the current stage.
double stage_lower_bound(const CurriculumState& s);

// Draw an initial height uniformly from [stage_lower_bound, height_max].
double sample_initial_height(const CurriculumState& s, Rng& rng);

// Record one episode outcome. When the trailing window is full and its
// success rate strictly exceeds the threshold, advance one stage (capped at
// num_stages) and clear the window. Never demotes.
CurriculumState record_and_maybe_advance(CurriculumState s, bool success);

// Return weighting for the current stage: stage / num_stages. Reaches 1 at
// the final stage.
double curriculum_weight(const CurriculumState& s);

}  // namespace trajmatch
