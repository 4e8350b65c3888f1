#include "trajmatch/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trajmatch/parallel.hpp"

namespace trajmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Admissibility of 1-based cell (i,j) under a diagonal band.
bool in_band(std::size_t i, std::size_t j, std::size_t p, std::size_t q,
             std::size_t band) {
  const double diag = static_cast<double>(i) * static_cast<double>(q) /
                      static_cast<double>(p);
  return std::abs(diag - static_cast<double>(j)) <=
         static_cast<double>(band);
}

std::vector<std::pair<std::size_t, std::size_t>> backtrace(
    const std::vector<double>& m, std::size_t p, std::size_t q) {
  // m is the (p+1) x (q+1) table, row-major. Walk from (p,q) to (1,1)
  // choosing the cheapest predecessor, diagonal first on ties.
  const auto at = [&](std::size_t i, std::size_t j) {
    return m[i * (q + 1) + j];
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t i = p;
  std::size_t j = q;
  while (true) {
    pairs.emplace_back(i - 1, j - 1);
    if (i == 1 && j == 1) break;
    const double diag = at(i - 1, j - 1);
    const double up = at(i - 1, j);
    const double left = at(i, j - 1);
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(pairs.begin(), pairs.end());
  return pairs;
}

DtwResult dtw_full(const Path& a, const Path& b,
                   std::optional<std::size_t> band) {
  validate_path(a);
  validate_path(b);
  const std::size_t p = a.size();
  const std::size_t q = b.size();
  std::vector<double> m((p + 1) * (q + 1), kInf);
  m[0] = 0.0;
  for (std::size_t i = 1; i <= p; ++i) {
    for (std::size_t j = 1; j <= q; ++j) {
      if (band && !in_band(i, j, p, q, *band)) continue;
      const double best =
          std::min({m[(i - 1) * (q + 1) + j - 1], m[(i - 1) * (q + 1) + j],
                    m[i * (q + 1) + j - 1]});
      if (best == kInf) continue;
      m[i * (q + 1) + j] = distance(a[i - 1], b[j - 1]) + best;
    }
  }
  DtwResult res;
  res.cost = m[p * (q + 1) + q];
  if (std::isfinite(res.cost)) {
    res.alignment = backtrace(m, p, q);
  }
  return res;
}

}  // namespace

DtwResult dtw_cost(const Path& a, const Path& b) {
  return dtw_full(a, b, std::nullopt);
}

double dtw_cost_span(std::span<const Vec3> a, std::span<const Vec3> b,
                     std::span<double> scratch) {
  const std::size_t q = b.size();
  double* prev = scratch.data();
  double* curr = scratch.data() + q + 1;
  std::fill(prev, prev + q + 1, kInf);
  std::fill(curr, curr + q + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    curr[0] = kInf;
    for (std::size_t j = 1; j <= q; ++j) {
      const double best = std::min({prev[j - 1], prev[j], curr[j - 1]});
      curr[j] = distance(a[i - 1], b[j - 1]) + best;
    }
    std::swap(prev, curr);
  }
  return prev[q];
}

double dtw_cost_only(const Path& a, const Path& b) {
  validate_path(a);
  validate_path(b);
  std::vector<double> scratch(2 * (b.size() + 1));
  return dtw_cost_span(a.points, b.points, scratch);
}

DtwResult dtw_cost_banded(const Path& a, const Path& b, std::size_t band) {
  return dtw_full(a, b, band);
}

double soft_dtw_cost(const Path& a, const Path& b, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("soft_dtw_cost requires gamma > 0");
  }
  validate_path(a);
  validate_path(b);
  const std::size_t q = b.size();
  // Shifted exp form keeps the softmin finite for any gamma: with
  // m = min(v), softmin = m - gamma * log(sum_i exp(-(v_i - m) / gamma)).
  const auto softmin = [gamma](double x, double y, double z) {
    const double m = std::min({x, y, z});
    if (m == kInf) return kInf;
    const double s = std::exp(-(x - m) / gamma) + std::exp(-(y - m) / gamma) +
                     std::exp(-(z - m) / gamma);
    return m - gamma * std::log(s);
  };
  std::vector<double> prev(q + 1, kInf);
  std::vector<double> curr(q + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    curr[0] = kInf;
    for (std::size_t j = 1; j <= q; ++j) {
      curr[j] = distance(a[i - 1], b[j - 1]) +
                softmin(prev[j - 1], prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[q];
}

double dtw_imitation_reward(const Path& ee_window, const Path& demo) {
  validate_path(ee_window);
  validate_path(demo);
  const std::size_t i0 = closest_point_index(demo, ee_window.front(), 0);
  const std::size_t i1 = closest_point_index(demo, ee_window.back(), i0);
  const Path segment = extract_segment(demo, i0, i1);
  return one_minus_tanh(dtw_cost_only(ee_window, segment));
}

std::vector<double> per_demo_dtw_rewards(const Path& ee_window,
                                         const DemoSet& demos,
                                         unsigned threads) {
  std::vector<double> out(demos.size());
  parallel_for(demos.size(), threads, [&](std::size_t i) {
    out[i] = dtw_imitation_reward(ee_window, demos.path(i));
  });
  return out;
}

BatchReward batch_dtw_reward(const Path& ee_window, const DemoSet& demos,
                             unsigned threads) {
  if (demos.empty()) {
    throw std::invalid_argument("batch_dtw_reward requires at least one demo");
  }
  const std::vector<double> rewards =
      per_demo_dtw_rewards(ee_window, demos, threads);
  BatchReward best{rewards[0], 0};
  for (std::size_t i = 1; i < rewards.size(); ++i) {
    if (rewards[i] > best.reward) {  // strict: ties keep the earlier demo
      best.reward = rewards[i];
      best.best_demo = i;
    }
  }
  return best;
}

}  // namespace trajmatch
