#pragma once

#include <cstddef>
#include <vector>

#include "trajmatch/demos.hpp"
#include "trajmatch/dtw.hpp"
#include "trajmatch/geometry.hpp"

namespace trajmatch {

// Truncated discrete path signature of a 3D path. terms is the flattened
// concatenation of levels 0..level; terms[0] is always 1. Level m holds the
// 3^m entries S(i1,...,im) in lexicographic index order, so the total length
// is (3^(level+1) - 1) / 2.
//
// Level 1 is the total displacement x[N] - x[0]. Level m >= 2 accumulates,
// over each step k -> k+1, the level-(m-1) prefix term evaluated at k+1 times
// the step increment in the trailing coordinate. This is a plain iterated-sum
// truncation; it is not Chen's tensor-algebra signature and no 1/m! factors
// appear.
struct Signature {
  int level = 0;
  std::vector<double> terms;
};

// Flattened term count for a truncation level: (3^(level+1) - 1) / 2.
std::size_t signature_length(int level);

// Signature of p truncated at `level`. Requires level >= 1 and a valid path.
// A single-point path has all terms zero beyond terms[0].
Signature signature(const Path& p, int level);

// Euclidean distance between flattened term vectors. Throws
// std::invalid_argument when the truncation levels differ.
double signature_distance(const Signature& a, const Signature& b);

// Whole-history imitation reward in (0, 1]:
//   r = 1 - tanh(|| sig(ee_path) - sig(demo[0..j]) ||)
// where j is the demo point closest to the current (last) ee point.
double signature_imitation_reward(const Path& ee_path, const Path& demo,
                                  int level);

std::vector<double> per_demo_signature_rewards(const Path& ee_path,
                                               const DemoSet& demos, int level,
                                               unsigned threads = 0);

BatchReward batch_signature_reward(const Path& ee_path, const DemoSet& demos,
                                   int level, unsigned threads = 0);

// Streaming signature of a growing path. After start(p0) and a sequence of
// extend(p) calls, value() equals signature() of the same point sequence
// bit for bit: both update levels in ascending order with identical
// arithmetic. This is the cheap way to evaluate many one-point extensions of
// a long path (copy, extend, read).
class SignatureAccumulator {
 public:
  explicit SignatureAccumulator(int level);

  void start(const Vec3& p0);
  void extend(const Vec3& p);
  const Signature& value() const { return sig_; }

 private:
  Signature sig_;
  Vec3 last_{};
  bool started_ = false;
};

// Signature of every prefix p[0..j], j = 0..size-1, in one sweep. Entry j
// is bit-identical to signature(extract_segment(p, 0, j), level).
std::vector<Signature> prefix_signatures(const Path& p, int level);

}  // namespace trajmatch
