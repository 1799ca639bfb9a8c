#include <doctest.h>

#include <cmath>
#include <random>

#include "geoflow/error.hpp"
#include "geoflow/geomodel.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace geoflow;
using testing_util::box_region;
using testing_util::box_ring;

TEST_CASE("projection round trip stays within 1e-9 degrees") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-179.0, 179.0), off(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const Projection proj(lat(rng), lon(rng));
    const LatLon p{std::clamp(proj.origin_lat() + off(rng), -89.0, 89.0), proj.origin_lon() + off(rng)};
    const auto back = proj.inverse(proj.forward(p));
    CHECK(std::abs(back.lat - p.lat) < 1e-9);
    CHECK(std::abs(back.lon - p.lon) < 1e-9);
  }
}

TEST_CASE("projection matches the equirectangular formula") {
  const Projection proj(44.0, -120.0);
  const auto p = proj.forward({45.0, -121.0});
  const auto o = oracle::project(45.0, -121.0, 44.0, -120.0);
  CHECK(p.x == doctest::Approx(o.x).epsilon(1e-14));
  CHECK(p.y == doctest::Approx(o.y).epsilon(1e-14));
  CHECK_THROWS_AS(proj.forward({NAN, 0.0}), Error);
}

TEST_CASE("polygon area: unit square, orientation and rigid motions") {
  const PlanarRing square{{0, 0}, {10, 0}, {10, 10}, {0, 10}, {0, 0}};
  CHECK(polygon_area(square) == doctest::Approx(100.0));
  PlanarRing reversed(square.rbegin(), square.rend());
  CHECK(polygon_area(reversed) == doctest::Approx(100.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e5, 1e5), ang(0.0, 6.283185307179586);
  const PlanarRing poly{{0, 0}, {400, -30}, {650, 200}, {300, 500}, {-100, 350}, {0, 0}};
  const double base = polygon_area(poly);
  for (int i = 0; i < 50; ++i) {
    const double tx = u(rng), ty = u(rng), a = ang(rng);
    PlanarRing moved;
    for (const auto& p : poly) {
      moved.push_back({std::cos(a) * p.x - std::sin(a) * p.y + tx, std::sin(a) * p.x + std::cos(a) * p.y + ty});
    }
    CHECK(polygon_area(moved) == doctest::Approx(base).epsilon(1e-9));
  }
  // Starting vertex does not matter.
  const PlanarRing rotated{{400, -30}, {650, 200}, {300, 500}, {-100, 350}, {0, 0}, {400, -30}};
  CHECK(polygon_area(rotated) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("polygon area rejects degenerate rings") {
  CHECK_THROWS_AS(polygon_area(PlanarRing{{0, 0}, {1, 1}, {0, 0}}), Error);
  CHECK_THROWS_AS(polygon_area(PlanarRing{{0, 0}, {1, 1}, {2, 2}, {0, 0}}), Error);
}

TEST_CASE("centroid of a rectangle and of a collinear ring") {
  const auto c = polygon_centroid(PlanarRing{{0, 0}, {4, 0}, {4, 2}, {0, 2}, {0, 0}});
  CHECK(c.x == doctest::Approx(2.0));
  CHECK(c.y == doctest::Approx(1.0));
  const auto d = polygon_centroid(PlanarRing{{0, 0}, {1, 1}, {2, 2}, {0, 0}});
  CHECK(d.x == doctest::Approx(1.0));
}

TEST_CASE("point in polygon agrees with a winding-number oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int poly = 0; poly < 40; ++poly) {
    // Star-shaped polygon: random radii at increasing angles, so it is simple.
    std::vector<oracle::Pt> ring;
    PlanarRing planar;
    const int n = 5 + poly % 9;
    for (int k = 0; k < n; ++k) {
      const double a = 6.283185307179586 * k / n;
      const double r = 400.0 + 300.0 * u(rng);
      ring.push_back({r * std::cos(a), r * std::sin(a)});
      planar.push_back({ring.back().x, ring.back().y});
    }
    planar.push_back(planar.front());
    for (int i = 0; i < 300; ++i) {
      const oracle::Pt p{800.0 * u(rng), 800.0 * u(rng)};
      const bool expected = oracle::winding(p, ring) != 0;
      CHECK(point_in_ring({p.x, p.y}, planar) == expected);
    }
  }
}

TEST_CASE("boundary points count as inside") {
  const PlanarRing square{{0, 0}, {10, 0}, {10, 10}, {0, 10}, {0, 0}};
  CHECK(point_in_ring({0, 5}, square));
  CHECK(point_in_ring({10, 10}, square));
  CHECK(point_in_ring({5, 0}, square));
  CHECK_FALSE(point_in_ring({10.001, 5}, square));
}

TEST_CASE("locate returns the first containing region") {
  const Projection proj(0.5, 1.0);
  const std::vector<Region> regions{box_region("A", 0, 0, 1, 1), box_region("B", 0, 1, 1, 2)};
  const auto zones = project_regions(regions, proj);
  CHECK(locate(proj.forward({0.5, 0.5}), zones) == std::optional<std::size_t>(0));
  CHECK(locate(proj.forward({0.5, 1.5}), zones) == std::optional<std::size_t>(1));
  CHECK(locate(proj.forward({0.5, 1.0}), zones) == std::optional<std::size_t>(0));
  CHECK_FALSE(locate(proj.forward({5.0, 5.0}), zones).has_value());
}

TEST_CASE("region set validation") {
  std::vector<Region> dup{box_region("A", 0, 0, 1, 1), box_region("A", 0, 1, 1, 2)};
  CHECK_THROWS_AS(validate_region_set(dup), Error);
  std::vector<Region> neg{box_region("A", 0, 0, 1, 1, -5)};
  CHECK_THROWS_AS(validate_region_set(neg), Error);
  CHECK(find_region(std::vector<Region>{box_region("A", 0, 0, 1, 1)}, "A") != nullptr);
}

TEST_CASE("normalize_ring closes rings and rejects short ones") {
  auto ring = normalize_ring({{0, 0}, {0, 1}, {1, 1}});
  CHECK(ring.size() == 4);
  CHECK(ring.front() == ring.back());
  CHECK_THROWS_AS(normalize_ring({{0, 0}, {0, 1}, {0, 0}}), Error);
}

TEST_CASE("place centroid and area") {
  const Place p{PlaceScale::city, {box_ring(44.0, -123.2, 44.1, -123.0)}};
  const auto c = place_centroid(p);
  CHECK(c.lat == doctest::Approx(44.05).epsilon(1e-12));
  CHECK(c.lon == doctest::Approx(-123.1).epsilon(1e-12));

  std::vector<oracle::Pt> local;
  for (const auto& v : p.boundary[0]) local.push_back(oracle::project(v.lat, v.lon, c.lat, c.lon));
  local.pop_back();
  CHECK(place_area_m2(p) == doctest::Approx(oracle::shoelace(local)).epsilon(1e-10));

  // Two disjoint rings: area adds up, centroid is area weighted.
  const Place two{PlaceScale::admin, {box_ring(0, 0, 1, 1), box_ring(0, 2, 1, 5)}};
  const auto c2 = place_centroid(two);
  CHECK(c2.lon == doctest::Approx((0.5 * 1 + 3.5 * 3) / 4.0));
}

TEST_CASE("record validation") {
  auto ok = testing_util::coord_record("r", "u", 0, 10, 10);
  CHECK_NOTHROW(validate_record(ok));
  auto bad = testing_util::coord_record("r", "u", 0, 91, 10);
  CHECK_THROWS_AS(validate_record(bad), Error);
  auto noid = testing_util::coord_record("", "u", 0, 10, 10);
  CHECK_THROWS_AS(validate_record(noid), Error);
}

TEST_CASE("place scales are ordered from fine to coarse") {
  CHECK(coarser_than(PlaceScale::country, PlaceScale::admin));
  CHECK_FALSE(coarser_than(PlaceScale::poi, PlaceScale::city));
  CHECK(parse_place_scale("neighborhood") == PlaceScale::neighborhood);
  CHECK_FALSE(parse_place_scale("galaxy").has_value());
}
