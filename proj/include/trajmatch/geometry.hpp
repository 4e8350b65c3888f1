#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace trajmatch {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](std::size_t i) const {
    return i == 0 ? x : (i == 1 ? y : z);
  }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3& o) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double squared_distance(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return dot(d, d);
}

inline double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt(squared_distance(a, b));
}

// 1 - tanh(x) for x >= 0, rearranged so the result stays strictly positive
// far past the point where the naive expression rounds to zero (x ~ 19).
// Rewards of the form 1 - tanh(cost) rely on this to honour their open
// lower bound.
inline double one_minus_tanh(double x) {
  if (x > 350.0) return 2.0 * std::exp(-2.0 * x);
  return 2.0 / (1.0 + std::exp(2.0 * x));
}

// Ordered sequence of 3D positions, optionally timestamped. Invariants
// (checked by validate_path): at least one point, all coordinates finite,
// timestamps if present match the point count and strictly increase.
struct Path {
  std::vector<Vec3> points;
  std::optional<std::vector<double>> timestamps;

  std::size_t size() const { return points.size(); }
  const Vec3& front() const { return points.front(); }
  const Vec3& back() const { return points.back(); }
  const Vec3& operator[](std::size_t i) const { return points[i]; }
};

// Unordered collection of 3D points (order carries no meaning).
struct PointSet {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
};

// Throws std::invalid_argument when a Path invariant is violated.
void validate_path(const Path& p);

// Reverses point order. Timestamps are dropped: a reversed recording has no
// meaningful time axis until it is replayed.
Path reverse_path(const Path& p);

// Trailing window of the prefix p[0..t], at most n points, ending exactly at
// p[t]. Shorter near the start (length min(n, t+1)). Requires t < p.size()
// and n >= 1.
Path window(const Path& p, std::size_t t, std::size_t n);

// Index of the point of p closest to q, scanning indices >= from_index only.
// Exact distance ties resolve to the smallest index. Requires
// from_index < p.size().
std::size_t closest_point_index(const Path& p, const Vec3& q,
                                std::size_t from_index = 0);

// Contiguous subpath p[i..j], both ends included. Timestamps come along when
// present. Requires i <= j < p.size().
Path extract_segment(const Path& p, std::size_t i, std::size_t j);

// Symmetric mean of squared nearest-neighbour distances:
//   (1/|a|) sum_p min_q ||p-q||^2 + (1/|b|) sum_q min_p ||q-p||^2.
// Requires both sets non-empty.
double chamfer_distance(const PointSet& a, const PointSet& b);

}  // namespace trajmatch
