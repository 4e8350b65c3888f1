#include "trajmatch/curriculum.hpp"

#include <cmath>
#include <stdexcept>

namespace trajmatch {

void validate_curriculum_config(const CurriculumConfig& cfg) {
  if (cfg.num_stages < 1) {
    throw std::invalid_argument("num_stages must be >= 1");
  }
  const auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be finite");
    }
  };
  finite(cfg.height_min_initial, "height_min_initial");
  finite(cfg.height_min_final, "height_min_final");
  finite(cfg.height_max, "height_max");
  if (cfg.height_min_initial > cfg.height_min_final) {
    throw std::invalid_argument(
        "height_min_initial must not exceed height_min_final");
  }
  if (cfg.height_min_final > cfg.height_max) {
    throw std::invalid_argument("height_min_final must not exceed height_max");
  }
  if (cfg.window == 0) {
    throw std::invalid_argument("window must be >= 1");
  }
  if (!(cfg.advance_threshold >= 0.0 && cfg.advance_threshold <= 1.0)) {
    throw std::invalid_argument("advance_threshold must be in [0, 1]");
  }
}

CurriculumState make_curriculum(const CurriculumConfig& cfg) {
  validate_curriculum_config(cfg);
  CurriculumState s;
  s.config = cfg;
  s.stage = 1;
  return s;
}

double stage_lower_bound(const CurriculumState& s) {
  const CurriculumConfig& c = s.config;
  if (c.num_stages == 1) return c.height_min_initial;
  const double t = static_cast<double>(s.stage - 1) /
                   static_cast<double>(c.num_stages - 1);
  return c.height_min_initial + t * (c.height_min_final - c.height_min_initial);
}

double sample_initial_height(const CurriculumState& s, Rng& rng) {
  return rng.uniform(stage_lower_bound(s), s.config.height_max);
}

CurriculumState record_and_maybe_advance(CurriculumState s, bool success) {
  s.recent.push_back(success);
  if (s.recent.size() > s.config.window) {
    s.recent.erase(s.recent.begin());
  }
  if (s.recent.size() == s.config.window && s.stage < s.config.num_stages) {
    std::size_t wins = 0;
    for (bool b : s.recent) wins += b ? 1 : 0;
    const double rate =
        static_cast<double>(wins) / static_cast<double>(s.config.window);
    if (rate > s.config.advance_threshold) {
      ++s.stage;
      s.recent.clear();
    }
  }
  return s;
}

double curriculum_weight(const CurriculumState& s) {
  return static_cast<double>(s.stage) / static_cast<double>(s.config.num_stages);
}

}  // namespace trajmatch
