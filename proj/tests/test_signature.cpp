#include "trajmatch/signature.hpp"

#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "trajmatch/rng.hpp"

using namespace trajmatch;

namespace {

Path random_path(Rng& rng, std::size_t max_len) {
  const std::size_t len = 1 + rng.below(max_len);
  Path p;
  for (std::size_t i = 0; i < len; ++i) {
    p.points.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                        rng.uniform(-1.0, 1.0)});
  }
  return p;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

TEST_CASE("signature_length counts flattened terms") {
  CHECK(signature_length(1) == 4);
  CHECK(signature_length(2) == 13);
  CHECK(signature_length(3) == 40);
  CHECK_THROWS_AS(signature_length(0), std::invalid_argument);
  CHECK_THROWS_AS(signature_length(13), std::invalid_argument);
}

TEST_CASE("single-point path has the empty signature") {
  Path p{{{3, 4, 5}}, std::nullopt};
  const Signature s = signature(p, 3);
  REQUIRE(s.terms.size() == 40);
  CHECK(s.terms[0] == 1.0);
  for (std::size_t i = 1; i < s.terms.size(); ++i) CHECK(s.terms[i] == 0.0);
}

TEST_CASE("one-step signature is the tensor powers of the displacement") {
  Path p{{{0, 0, 0}, {1, 2, 3}}, std::nullopt};
  const Signature s = signature(p, 3);
  const double d[3] = {1, 2, 3};
  CHECK(s.terms[0] == 1.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(s.terms[1 + i] == d[i]);
    for (int j = 0; j < 3; ++j) {
      CHECK(s.terms[4 + 3 * i + j] == d[i] * d[j]);
      for (int k = 0; k < 3; ++k) {
        CHECK(s.terms[13 + 9 * i + 3 * j + k] == d[i] * d[j] * d[k]);
      }
    }
  }
}

TEST_CASE("level-two terms are order sensitive") {
  // x then y: the accumulated x displacement multiplies the y step, not the
  // other way round.
  Path p{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}, std::nullopt};
  const Signature s = signature(p, 2);
  CHECK(s.terms[1] == 1.0);  // total x displacement
  CHECK(s.terms[2] == 1.0);  // total y displacement
  CHECK(s.terms[3] == 0.0);
  CHECK(s.terms[4] == 1.0);   // xx
  CHECK(s.terms[5] == 1.0);   // xy: x was already 1 when y moved
  CHECK(s.terms[7] == 0.0);   // yx: y was 0 while x moved
  CHECK(s.terms[8] == 1.0);   // yy
}

TEST_CASE("signature matches the direct nested-sum evaluation") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const Path p = random_path(rng, 6);
    const int level = 1 + static_cast<int>(rng.below(3));
    const Signature fast = signature(p, level);
    const Signature ref = oracle::signature(p, level);
    REQUIRE(fast.terms.size() == ref.terms.size());
    for (std::size_t i = 0; i < fast.terms.size(); ++i) {
      CHECK(rel_err(fast.terms[i], ref.terms[i]) <= 1e-12);
    }
  }
}

TEST_CASE("signature is exactly invariant under dyadic translation") {
  // Coordinates and shifts on the 2^-20 grid make x + c exact in doubles,
  // so increment-based terms must not move at all.
  Rng rng(103);
  const double grid = 0x1.0p-20;
  for (int trial = 0; trial < 50; ++trial) {
    Path p;
    const std::size_t len = 2 + rng.below(6);
    for (std::size_t i = 0; i < len; ++i) {
      p.points.push_back({grid * static_cast<double>(rng.below(4096)),
                          grid * static_cast<double>(rng.below(4096)),
                          grid * static_cast<double>(rng.below(4096))});
    }
    const Vec3 shift = {grid * static_cast<double>(rng.below(1 << 16)),
                        grid * static_cast<double>(rng.below(1 << 16)),
                        grid * static_cast<double>(rng.below(1 << 16))};
    Path shifted = p;
    for (Vec3& v : shifted.points) v = v + shift;
    const Signature a = signature(p, 3);
    const Signature b = signature(shifted, 3);
    CHECK(a.terms == b.terms);
  }
}

TEST_CASE("duplicating a point leaves the signature unchanged") {
  Rng rng(107);
  for (int trial = 0; trial < 50; ++trial) {
    const Path p = random_path(rng, 6);
    Path dup;
    const std::size_t at = rng.below(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      dup.points.push_back(p[i]);
      if (i == at) dup.points.push_back(p[i]);
    }
    const Signature a = signature(p, 3);
    const Signature b = signature(dup, 3);
    REQUIRE(a.terms.size() == b.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      CHECK(std::abs(a.terms[i] - b.terms[i]) <= 1e-12);
    }
  }
}

TEST_CASE("signature_distance requires matching levels") {
  Path p{{{0, 0, 0}, {1, 0, 0}}, std::nullopt};
  const Signature s2 = signature(p, 2);
  const Signature s3 = signature(p, 3);
  CHECK_THROWS_AS(signature_distance(s2, s3), std::invalid_argument);
  CHECK(signature_distance(s2, s2) == 0.0);
}

TEST_CASE("signature_distance is the plain L2 norm of the difference") {
  Path p{{{0, 0, 0}, {1, 0, 0}}, std::nullopt};
  Path q{{{0, 0, 0}, {0, 1, 0}}, std::nullopt};
  const Signature sp = signature(p, 1);
  const Signature sq = signature(q, 1);
  // Term vectors (1, 1,0,0) and (1, 0,1,0).
  CHECK(signature_distance(sp, sq) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("accumulator equals recompute-from-scratch bit for bit") {
  Rng rng(109);
  for (int trial = 0; trial < 30; ++trial) {
    const Path p = random_path(rng, 30);
    SignatureAccumulator acc(3);
    acc.start(p[0]);
    for (std::size_t k = 1; k < p.size(); ++k) {
      acc.extend(p[k]);
      const Signature direct =
          signature(extract_segment(p, 0, k), 3);
      CHECK(acc.value().terms == direct.terms);
    }
  }
}

TEST_CASE("accumulator refuses to extend before start") {
  SignatureAccumulator acc(2);
  CHECK_THROWS_AS(acc.extend({1, 0, 0}), std::logic_error);
}

TEST_CASE("prefix_signatures matches per-prefix recomputation bit for bit") {
  Rng rng(113);
  const Path p = random_path(rng, 25);
  const auto prefixes = prefix_signatures(p, 3);
  REQUIRE(prefixes.size() == p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const Signature direct = signature(extract_segment(p, 0, j), 3);
    CHECK(prefixes[j].terms == direct.terms);
  }
}

TEST_CASE("signature_imitation_reward follows the prefix recipe") {
  Path demo{{{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}}, std::nullopt};
  Path ee{{{0, 0, 0.1}, {0, 0, 1.9}}, std::nullopt};
  // The last ee point is nearest demo index 2, so the target is the prefix
  // demo[0..2].
  const Signature target = signature(extract_segment(demo, 0, 2), 3);
  const Signature got = signature(ee, 3);
  const double expect = one_minus_tanh(signature_distance(got, target));
  CHECK(signature_imitation_reward(ee, demo, 3) == expect);
  CHECK(expect > 0.0);
  CHECK(expect <= 1.0);
  // Tracing the demo exactly scores the maximum.
  CHECK(signature_imitation_reward(extract_segment(demo, 0, 2), demo, 3) ==
        1.0);
}

TEST_CASE("batch_signature_reward picks the best demo across thread counts") {
  Rng rng(127);
  DemoSet demos;
  for (int d = 0; d < 10; ++d) {
    Demo demo;
    demo.demo_id = "d" + std::to_string(d);
    demo.path = random_path(rng, 15);
    demos.demos.push_back(demo);
  }
  const Path ee = random_path(rng, 8);
  const auto seq = per_demo_signature_rewards(ee, demos, 3, 1);
  const auto par = per_demo_signature_rewards(ee, demos, 3, 4);
  CHECK(seq == par);
  const BatchReward best = batch_signature_reward(ee, demos, 3);
  std::size_t expect = 0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] > seq[expect]) expect = i;
  }
  CHECK(best.best_demo == expect);
  CHECK(best.reward == seq[expect]);
}
