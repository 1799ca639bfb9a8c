#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "geoflow/error.hpp"
#include "geoflow/stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace geoflow;
using namespace testing_util;

namespace {

std::vector<Region> grid_world(int rows, int cols) {
  std::vector<Region> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      char id[16];
      std::snprintf(id, sizeof id, "Z%02d%02d", r, c);
      out.push_back(box_region(id, r, c, r + 1, c + 1));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("Gi* matches the dense-matrix formula on random graphs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> value(0.0, 100.0), unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(3, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng);
    const double density = unit(rng);
    std::vector<std::vector<int>> dense(n, std::vector<int>(n, 0));
    Adjacency adj(n);
    for (int i = 0; i < n; ++i) {
      dense[i][i] = 1;
      for (int j = i + 1; j < n; ++j) {
        if (unit(rng) < density) {
          dense[i][j] = dense[j][i] = 1;
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
      }
    }
    for (auto& l : adj) std::sort(l.begin(), l.end());
    std::vector<double> x(n);
    for (auto& v : x) v = value(rng);
    const auto z = gi_star_z(x, adj);
    const auto ref = oracle::gi_star(x, dense);
    for (int i = 0; i < n; ++i) CHECK(std::abs(z[i] - ref[i]) <= 1e-12 * std::max(1.0, std::abs(ref[i])));
  }
}

TEST_CASE("Gi* edge cases") {
  Adjacency ring{{1, 2}, {0, 2}, {0, 1}};
  const auto z = gi_star_z(std::vector<double>{5, 5, 5}, ring);
  CHECK(z == std::vector<double>{0, 0, 0});
  CHECK_THROWS_AS(gi_star_z(std::vector<double>{1, 2}, Adjacency{{1}, {0}}), Error);
  CHECK(classify_z(2.58) == HotspotClass::hot99);
  CHECK(classify_z(-1.97) == HotspotClass::cold95);
  CHECK(classify_z(1.7) == HotspotClass::hot90);
  CHECK(classify_z(1.0) == HotspotClass::not_significant);
}

TEST_CASE("contiguity links edge and corner neighbors") {
  const auto world = grid_world(3, 3);
  const auto adj = contiguity(world);
  CHECK(adj[4].size() == 8);
  CHECK(adj[0] == std::vector<std::size_t>{1, 3, 4});
  const std::vector<Region> apart{box_region("A", 0, 0, 1, 1), box_region("B", 0, 1.5, 1, 2.5)};
  CHECK(contiguity(apart)[0].empty());
}

TEST_CASE("planted cluster is a hot99 hotspot") {
  const auto world = grid_world(10, 10);
  const auto adj = contiguity(world);
  ZoneCounts counts;
  for (const auto& r : world) counts.zones.push_back({r.region_id, 10, 1000, 0.01});
  for (int idx : {44, 45, 54, 55}) {
    counts.zones[idx].raw_count = 60;
    counts.zones[idx].rate = 0.06;
  }
  const auto result = gi_star(counts, adj, false);
  for (int idx : {44, 45, 54, 55}) CHECK(result.rows[idx].classification == HotspotClass::hot99);
  CHECK(result.rows[0].classification == HotspotClass::not_significant);
}

TEST_CASE("rate mode excludes zones without population") {
  const auto world = grid_world(2, 2);
  ZoneCounts counts;
  for (const auto& r : world) counts.zones.push_back({r.region_id, 5, 100, 0.05});
  counts.zones[3].population = 0;
  counts.zones[3].rate.reset();
  const auto result = gi_star(counts, contiguity(world), true);
  CHECK(result.excluded == std::vector<std::string>{"Z0101"});
  CHECK(result.rows.size() == 3);
  Adjacency asym{{1}, {}, {}, {}};
  CHECK_THROWS_AS(gi_star(counts, asym, false), Error);
}

TEST_CASE("count by zone drops coarse places and counts residuals") {
  const Projection proj(1.0, 1.0);
  const auto world = grid_world(2, 2);
  const auto zones = project_regions(world, proj);
  std::vector<GeoRecord> records{
      coord_record("1", "u", 0, 0.5, 0.5), coord_record("2", "u", 0, 0.5, 0.6),
      coord_record("3", "u", 0, 1.5, 1.5), coord_record("4", "u", 0, 5, 5),
      place_record("5", "u", 0, PlaceScale::city, 0.4, 1.4, 0.6, 1.6),
      place_record("6", "u", 0, PlaceScale::country, 0, 0, 2, 2)};
  for (unsigned threads : {1u, 3u}) {
    const auto c = count_by_zone(records, zones, proj, PlaceScale::admin, threads);
    CHECK(c.zones[0].raw_count == 2);
    CHECK(c.zones[1].raw_count == 1);
    CHECK(c.zones[3].raw_count == 1);
    CHECK(c.residual == 1);
    CHECK(c.excluded_coarse == 1);
    CHECK(c.zones[0].rate == std::optional<double>(2.0 / 1000.0));
  }
}

TEST_CASE("local time conversion") {
  const std::int64_t ts = 17399 * 86400 + 17 * 3600 + 16 * 60;  // 2017-08-21T17:16:00Z
  const auto [day, hour] = local_day_hour(ts, -7.0);
  CHECK(day == 17399);
  CHECK(hour == 10);
  CHECK(local_day_hour(17399 * 86400 + 3 * 3600, -7.0) == std::pair<std::int64_t, int>{17398, 20});
  CHECK(local_day_hour(17399 * 86400 + 22 * 3600, 5.5) == std::pair<std::int64_t, int>{17400, 3});
  CHECK(local_day_hour(-1, 0.0) == std::pair<std::int64_t, int>{-1, 23});
}

TEST_CASE("temporal histogram conserves records and falls back to longitude offsets") {
  const Projection proj(44.0, -120.0);
  auto oregon = box_region("OR", 42, -124, 46, -117);
  oregon.utc_offset_hours = -7.0;
  const std::vector<Region> regions{oregon};
  const auto zones = project_regions(regions, proj);
  const auto corridor = project_region(box_region("C", 44, -124, 45, -117), proj);
  const std::int64_t t0 = 17399 * 86400;
  std::vector<GeoRecord> records{
      coord_record("1", "a", t0 + 17 * 3600 + 16 * 60, 44.5, -123.0),  // inside, 10 local
      coord_record("2", "a", t0 + 17 * 3600 + 20 * 60, 43.0, -123.0),  // outside, 10 local
      coord_record("3", "b", t0 + 18 * 3600, 44.5, -90.0),              // no zone: offset -6
      coord_record("4", "b", t0 + 3 * 86400, 44.5, -123.0),             // beyond range
  };
  const auto h = temporal_histogram(records, corridor, zones, proj, 17399, 17400);
  CHECK(h.inside(17399, 10) == 1);
  CHECK(h.outside(17399, 10) == 1);
  CHECK(h.outside(17399, 12) == 1);
  CHECK(h.fallback_offsets == 1);
  CHECK(h.outside_range == 1);
  CHECK(h.total() + h.outside_range == records.size());
  const auto csv = histogram_to_csv(h);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 48);
  CHECK(csv.find("2017-08-21,10,1,1") != std::string::npos);
  CHECK_THROWS_AS(temporal_histogram(records, corridor, zones, proj, 5, 4), Error);
}
