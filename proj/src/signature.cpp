#include "trajmatch/signature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trajmatch/parallel.hpp"

namespace trajmatch {

namespace {

void check_level(int level) {
  // 3^13 terms is past any sane truncation; fail fast instead of allocating.
  if (level < 1 || level > 12) {
    throw std::invalid_argument("signature level must be in [1, 12], got " +
                                std::to_string(level));
  }
}

std::size_t pow3(int m) {
  std::size_t v = 1;
  for (int i = 0; i < m; ++i) v *= 3;
  return v;
}

// Offset of level m within the flattened term vector: (3^m - 1) / 2.
std::size_t level_offset(int m) { return (pow3(m) - 1) / 2; }

// One step of the iterated-sum recurrence, in place. Levels update in
// ascending order so each level reads the already-advanced level below it;
// that ordering is what makes the single-step level2 increment the outer
// product of the fresh level1 with the step.
void advance(std::vector<double>& terms, int level, const Vec3& d) {
  const double step[3] = {d.x, d.y, d.z};
  for (int m = 1; m <= level; ++m) {
    const std::size_t prev_off = level_offset(m - 1);
    const std::size_t off = level_offset(m);
    const std::size_t prev_count = pow3(m - 1);
    for (std::size_t w = 0; w < prev_count; ++w) {
      const double base = terms[prev_off + w];
      double* cell = &terms[off + w * 3];
      cell[0] += base * step[0];
      cell[1] += base * step[1];
      cell[2] += base * step[2];
    }
  }
}

}  // namespace

std::size_t signature_length(int level) {
  check_level(level);
  return (pow3(level + 1) - 1) / 2;
}

SignatureAccumulator::SignatureAccumulator(int level) {
  check_level(level);
  sig_.level = level;
  sig_.terms.assign(signature_length(level), 0.0);
  sig_.terms[0] = 1.0;
}

void SignatureAccumulator::start(const Vec3& p0) {
  std::fill(sig_.terms.begin(), sig_.terms.end(), 0.0);
  sig_.terms[0] = 1.0;
  last_ = p0;
  started_ = true;
}

void SignatureAccumulator::extend(const Vec3& p) {
  if (!started_) {
    throw std::logic_error("SignatureAccumulator::extend before start");
  }
  advance(sig_.terms, sig_.level, p - last_);
  last_ = p;
}

Signature signature(const Path& p, int level) {
  check_level(level);
  validate_path(p);
  SignatureAccumulator acc(level);
  acc.start(p[0]);
  for (std::size_t k = 1; k < p.size(); ++k) acc.extend(p[k]);
  return acc.value();
}

std::vector<Signature> prefix_signatures(const Path& p, int level) {
  check_level(level);
  validate_path(p);
  SignatureAccumulator acc(level);
  acc.start(p[0]);
  std::vector<Signature> out;
  out.reserve(p.size());
  out.push_back(acc.value());
  for (std::size_t k = 1; k < p.size(); ++k) {
    acc.extend(p[k]);
    out.push_back(acc.value());
  }
  return out;
}

double signature_distance(const Signature& a, const Signature& b) {
  if (a.level != b.level) {
    throw std::invalid_argument(
        "signature_distance requires matching levels, got " +
        std::to_string(a.level) + " and " + std::to_string(b.level));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    const double d = a.terms[i] - b.terms[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double signature_imitation_reward(const Path& ee_path, const Path& demo,
                                  int level) {
  validate_path(ee_path);
  validate_path(demo);
  const std::size_t j = closest_point_index(demo, ee_path.back(), 0);
  const Signature demo_sig = signature(extract_segment(demo, 0, j), level);
  const Signature ee_sig = signature(ee_path, level);
  return one_minus_tanh(signature_distance(ee_sig, demo_sig));
}

std::vector<double> per_demo_signature_rewards(const Path& ee_path,
                                               const DemoSet& demos, int level,
                                               unsigned threads) {
  std::vector<double> out(demos.size());
  parallel_for(demos.size(), threads, [&](std::size_t i) {
    out[i] = signature_imitation_reward(ee_path, demos.path(i), level);
  });
  return out;
}

BatchReward batch_signature_reward(const Path& ee_path, const DemoSet& demos,
                                   int level, unsigned threads) {
  if (demos.empty()) {
    throw std::invalid_argument(
        "batch_signature_reward requires at least one demo");
  }
  const std::vector<double> rewards =
      per_demo_signature_rewards(ee_path, demos, level, threads);
  BatchReward best{rewards[0], 0};
  for (std::size_t i = 1; i < rewards.size(); ++i) {
    if (rewards[i] > best.reward) {
      best.reward = rewards[i];
      best.best_demo = i;
    }
  }
  return best;
}

}  // namespace trajmatch
