#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trajmatch/geometry.hpp"

namespace trajmatch {

enum class DemoSource { generated, imported };

// One demonstration trajectory, stored goal-ward (playback order: start of
// the approach first, goal last).
struct Demo {
  std::string demo_id;
  DemoSource source = DemoSource::generated;
  std::uint64_t seed = 0;
  Path path;
};

struct DemoSet {
  std::string assembly_id;
  std::vector<Demo> demos;

  std::size_t size() const { return demos.size(); }
  bool empty() const { return demos.empty(); }
  const Path& path(std::size_t i) const { return demos[i].path; }
};

}  // namespace trajmatch
