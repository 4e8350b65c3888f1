#include "trajmatch/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace trajmatch {

void validate_path(const Path& p) {
  if (p.points.empty()) {
    throw std::invalid_argument("path must contain at least one point");
  }
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const Vec3& v = p.points[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw std::invalid_argument("path point " + std::to_string(i) +
                                  " has a non-finite coordinate");
    }
  }
  if (p.timestamps) {
    const auto& ts = *p.timestamps;
    if (ts.size() != p.points.size()) {
      throw std::invalid_argument("timestamp count does not match point count");
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (!std::isfinite(ts[i])) {
        throw std::invalid_argument("timestamp " + std::to_string(i) +
                                    " is not finite");
      }
      if (i > 0 && ts[i] <= ts[i - 1]) {
        throw std::invalid_argument(
            "timestamps must be strictly increasing (violated at index " +
            std::to_string(i) + ")");
      }
    }
  }
}

Path reverse_path(const Path& p) {
  validate_path(p);
  Path out;
  out.points.assign(p.points.rbegin(), p.points.rend());
  return out;
}

Path window(const Path& p, std::size_t t, std::size_t n) {
  validate_path(p);
  if (t >= p.points.size()) {
    throw std::out_of_range("window index " + std::to_string(t) +
                            " outside path of length " +
                            std::to_string(p.points.size()));
  }
  if (n == 0) {
    throw std::invalid_argument("window length must be at least 1");
  }
  const std::size_t len = std::min(n, t + 1);
  const std::size_t first = t + 1 - len;
  Path out;
  out.points.assign(p.points.begin() + first, p.points.begin() + t + 1);
  if (p.timestamps) {
    out.timestamps.emplace(p.timestamps->begin() + first,
                           p.timestamps->begin() + t + 1);
  }
  return out;
}

std::size_t closest_point_index(const Path& p, const Vec3& q,
                                std::size_t from_index) {
  if (from_index >= p.points.size()) {
    throw std::out_of_range("closest_point_index start " +
                            std::to_string(from_index) +
                            " outside path of length " +
                            std::to_string(p.points.size()));
  }
  std::size_t best = from_index;
  double best_d2 = squared_distance(p.points[from_index], q);
  for (std::size_t i = from_index + 1; i < p.points.size(); ++i) {
    const double d2 = squared_distance(p.points[i], q);
    if (d2 < best_d2) {  // strict: ties keep the earlier index
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

Path extract_segment(const Path& p, std::size_t i, std::size_t j) {
  if (j >= p.points.size() || i > j) {
    throw std::out_of_range("segment [" + std::to_string(i) + ", " +
                            std::to_string(j) + "] invalid for path of length " +
                            std::to_string(p.points.size()));
  }
  Path out;
  out.points.assign(p.points.begin() + i, p.points.begin() + j + 1);
  if (p.timestamps) {
    out.timestamps.emplace(p.timestamps->begin() + i,
                           p.timestamps->begin() + j + 1);
  }
  return out;
}

double chamfer_distance(const PointSet& a, const PointSet& b) {
  if (a.points.empty() || b.points.empty()) {
    throw std::invalid_argument("chamfer_distance requires non-empty sets");
  }
  auto one_way = [](const PointSet& from, const PointSet& to) {
    double sum = 0.0;
    for (const Vec3& p : from.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& q : to.points) {
        best = std::min(best, squared_distance(p, q));
      }
      sum += best;
    }
    return sum / static_cast<double>(from.points.size());
  };
  return one_way(a, b) + one_way(b, a);
}

}  // namespace trajmatch
