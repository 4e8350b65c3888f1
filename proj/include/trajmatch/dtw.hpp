#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trajmatch/demos.hpp"
#include "trajmatch/geometry.hpp"

namespace trajmatch {

struct DtwResult {
  double cost = 0.0;
  // Monotonic index pairs from (0,0) to (P-1,Q-1); summing the pairwise point
  // distances along it reproduces cost. Absent when no path exists (banded
  // variant with an unreachable corner) or when only the cost was requested.
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> alignment;
};

// Dynamic time warping cost between two paths, with backtraced alignment.
// Classic O(P*Q) table; cells accumulate the Euclidean distance of the point
// pair plus the cheapest of the three predecessor cells.
DtwResult dtw_cost(const Path& a, const Path& b);

// Same recurrence, two rolling rows, no alignment. Bit-identical cost to
// dtw_cost (same fold order per cell).
double dtw_cost_only(const Path& a, const Path& b);

// The raw kernel behind dtw_cost_only: no validation, caller-provided
// scratch of at least 2 * (b.size() + 1) doubles, no allocation. Spans must
// be non-empty.
double dtw_cost_span(std::span<const Vec3> a, std::span<const Vec3> b,
                     std::span<double> scratch);

// DTW restricted to cells within `band` of the diagonal: cell (i,j) (1-based)
// is admissible when |i*Q/P - j| <= band. band >= max(P,Q) admits every cell
// and reproduces dtw_cost bit for bit. A band too narrow to connect the
// corners yields an infinite cost and no alignment.
DtwResult dtw_cost_banded(const Path& a, const Path& b, std::size_t band);

// Soft minimum relaxation: min is replaced by
//   softmin_gamma(v) = -gamma * log(sum_i exp(-v_i / gamma)),
// gamma > 0. Converges to dtw_cost as gamma -> 0. Cost only.
double soft_dtw_cost(const Path& a, const Path& b, double gamma);

// Window-to-segment imitation reward in (0, 1]:
//   r = 1 - tanh(dtw_cost(window, demo[i0..i1]))
// where i0 is the demo point closest to the window's first point and i1 the
// demo point closest to its last point, searched from i0 onward.
double dtw_imitation_reward(const Path& ee_window, const Path& demo);

struct BatchReward {
  double reward = 0.0;
  std::size_t best_demo = 0;
};

// dtw_imitation_reward against every demo. `threads` 0 means one worker per
// hardware thread; results are identical for any thread count.
std::vector<double> per_demo_dtw_rewards(const Path& ee_window,
                                         const DemoSet& demos,
                                         unsigned threads = 0);

// Highest per-demo reward and the demo achieving it (ties: smallest index).
// Requires a non-empty demo set.
BatchReward batch_dtw_reward(const Path& ee_window, const DemoSet& demos,
                             unsigned threads = 0);

}  // namespace trajmatch
