#include "trajmatch/geometry.hpp"

#include <stdexcept>
#include <cmath>
#include <limits>

#include "doctest.h"

using namespace trajmatch;

TEST_CASE("validate_path accepts a single point") {
  Path p{{{1.0, 2.0, 3.0}}, std::nullopt};
  CHECK_NOTHROW(validate_path(p));
}

TEST_CASE("validate_path rejects empties and non-finite points") {
  CHECK_THROWS_AS(validate_path(Path{}), std::invalid_argument);
  Path nan_path{{{0.0, 0.0, std::nan("")}}, std::nullopt};
  CHECK_THROWS_AS(validate_path(nan_path), std::invalid_argument);
  Path inf_path{{{std::numeric_limits<double>::infinity(), 0.0, 0.0}},
                std::nullopt};
  CHECK_THROWS_AS(validate_path(inf_path), std::invalid_argument);
}

TEST_CASE("validate_path enforces strictly increasing timestamps") {
  Path p{{{0, 0, 0}, {1, 0, 0}}, std::vector<double>{0.0, 1.0}};
  CHECK_NOTHROW(validate_path(p));
  p.timestamps = std::vector<double>{0.0, 0.0};
  CHECK_THROWS_AS(validate_path(p), std::invalid_argument);
  p.timestamps = std::vector<double>{1.0, 0.5};
  CHECK_THROWS_AS(validate_path(p), std::invalid_argument);
  p.timestamps = std::vector<double>{0.0};
  CHECK_THROWS_AS(validate_path(p), std::invalid_argument);
}

TEST_CASE("reverse_path reverses points and drops timestamps") {
  Path p{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, std::vector<double>{0.0, 1.0, 2.0}};
  const Path r = reverse_path(p);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Vec3{2, 0, 0});
  CHECK(r[2] == Vec3{0, 0, 0});
  CHECK_FALSE(r.timestamps.has_value());
  const Path rr = reverse_path(r);
  CHECK(rr.points == p.points);
}

TEST_CASE("window truncates near the start and ends at the anchor") {
  Path p{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}},
         std::nullopt};
  SUBCASE("full window") {
    const Path w = window(p, 4, 3);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == Vec3{2, 0, 0});
    CHECK(w.back() == Vec3{4, 0, 0});
  }
  SUBCASE("truncated at the beginning") {
    const Path w = window(p, 1, 10);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == Vec3{0, 0, 0});
    CHECK(w.back() == Vec3{1, 0, 0});
  }
  SUBCASE("length one") {
    const Path w = window(p, 2, 1);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == Vec3{2, 0, 0});
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(window(p, 5, 3), std::out_of_range);
    CHECK_THROWS_AS(window(p, 0, 0), std::invalid_argument);
  }
}

TEST_CASE("window carries matching timestamps") {
  Path p{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}},
         std::vector<double>{0.5, 1.5, 2.5}};
  const Path w = window(p, 2, 2);
  REQUIRE(w.timestamps.has_value());
  CHECK((*w.timestamps) == std::vector<double>{1.5, 2.5});
}

TEST_CASE("closest_point_index honours from_index and tie order") {
  Path p{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {1, 0, 0}}, std::nullopt};
  CHECK(closest_point_index(p, {1.1, 0, 0}) == 1);
  // Indices 1 and 3 tie exactly; the smaller wins.
  CHECK(closest_point_index(p, {1.0, 0, 0}) == 1);
  CHECK(closest_point_index(p, {1.0, 0, 0}, 2) == 3);
  CHECK(closest_point_index(p, {0.0, 0, 0}, 2) == 3);
  CHECK_THROWS_AS(closest_point_index(p, {0, 0, 0}, 4), std::out_of_range);
}

TEST_CASE("extract_segment is inclusive on both ends") {
  Path p{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}},
         std::vector<double>{0, 1, 2, 3}};
  const Path s = extract_segment(p, 1, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == Vec3{1, 0, 0});
  CHECK(s[1] == Vec3{2, 0, 0});
  REQUIRE(s.timestamps.has_value());
  CHECK((*s.timestamps) == std::vector<double>{1, 2});
  const Path one = extract_segment(p, 2, 2);
  CHECK(one.size() == 1);
  CHECK_THROWS_AS(extract_segment(p, 2, 1), std::out_of_range);
  CHECK_THROWS_AS(extract_segment(p, 0, 4), std::out_of_range);
}

TEST_CASE("chamfer_distance hand example") {
  PointSet a{{{0, 0, 0}}};
  PointSet b{{{1, 0, 0}, {0, 0, 0}}};
  // a-side: nearest is the coincident point, 0. b-side: (1 + 0) / 2.
  CHECK(chamfer_distance(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(chamfer_distance(a, a) == 0.0);
  CHECK_THROWS_AS(chamfer_distance(PointSet{}, b), std::invalid_argument);
}

TEST_CASE("chamfer_distance is symmetric and uses squared distances") {
  PointSet a{{{0, 0, 0}, {2, 0, 0}}};
  PointSet b{{{0, 1, 0}}};
  // a-side: (1 + 5) / 2 = 3. b-side: min(1, 5) = 1.
  CHECK(chamfer_distance(a, b) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(chamfer_distance(a, b) == chamfer_distance(b, a));
}
