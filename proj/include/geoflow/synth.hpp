#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoflow/geomodel.hpp"
#include "geoflow/ingest.hpp"

namespace geoflow::synth {

/// Probabilities of emitting a coordinate or a place at each scale.
struct ScaleMix {
  double coordinate = 0.17;
  std::array<double, 5> place{0.13, 0.10, 0.40, 0.15, 0.05};  // poi .. country

  /// Parses "coordinate:0.2,poi:0.1,...". Missing entries are zero.
  static ScaleMix parse(const std::string& text);
  double total() const;
};

/// Nominal side length of generated place boxes, in meters.
struct PlaceBoxSizes {
  std::array<double, 5> side{100.0, 1'000.0, 10'000.0, 200'000.0, 3'000'000.0};

  double of(PlaceScale s) const { return side[static_cast<std::size_t>(s)]; }
};

/// origin -> [(destination, probability)]; an empty destination means the
/// user does not attend the event inside the corridor.
using TravelMatrix = std::map<std::string, std::vector<std::pair<std::string, double>>>;

struct ScenarioSpec {
  std::uint64_t seed = 42;
  std::vector<Region> regions;
  std::size_t cohort_size = 500;
  std::size_t records_min = 20;
  std::size_t records_max = 80;
  double home_fidelity = 0.8;
  double home_sigma_m = 20'000.0;
  ScaleMix scale_mix;
  PlaceBoxSizes box_sizes;

  std::optional<Region> corridor;
  std::int64_t event_day = 17'399;  // 2017-08-21
  std::int64_t history_days = 60;
  std::size_t event_records_min = 1;
  std::size_t event_records_max = 3;
  TravelMatrix travel;
  /// Share of non-attending users who still post one event record at home,
  /// outside the corridor.
  double home_event_share = 0.5;
  std::vector<std::string> keywords{"eclipse", "totality"};

  void validate() const;
};

struct UserTruth {
  std::string user_id;
  std::string home_region_id;
  std::optional<std::string> destination_region_id;
  bool traveled = false;  // destination set and different from home
};

struct GroundTruth {
  std::vector<UserTruth> users;

  std::string to_csv() const;
  static GroundTruth from_csv(const std::filesystem::path& path);
  const UserTruth* find(const std::string& user_id) const;
};

struct Scenario {
  RecordStore store;
  GroundTruth truth;
};

/// Deterministic for a fixed spec: every user draws from its own stream
/// derived from (seed, user index), and output is in user-index order.
Scenario generate(const ScenarioSpec& spec, unsigned threads = 1);

/// Loads a key=value scenario file; relative paths resolve against its directory.
ScenarioSpec load_scenario_spec(const std::filesystem::path& path);

/// rows x cols square cells of `cell_deg` degrees, row 0 at `south_lat`,
/// ids "R<row><col>". Populations are taken cyclically from `populations`.
std::vector<Region> grid_regions(std::size_t rows, std::size_t cols, double south_lat,
                                 double west_lon, double cell_deg,
                                 const std::vector<std::int64_t>& populations);

/// Quadrilateral band from west to east with the given center latitudes and
/// half-height in degrees.
Region band_corridor(double west_lon, double east_lon, double west_center_lat,
                     double east_center_lat, double half_height_deg);

/// Region ids that share area with the corridor, in region-set order.
std::vector<std::string> corridor_regions(const std::vector<Region>& regions,
                                          const Region& corridor);

/// Destination visitors come from `origins`; population-calibrated, the
/// destination's own residents hold `in_state_share` of the visitor share.
TravelMatrix in_state_travel(const std::string& destination,
                             const std::vector<std::string>& origins, double in_state_share);

/// Default event behavior: residents of corridor regions mostly stay, other
/// users split between staying out and visiting a corridor region.
TravelMatrix corridor_travel(const std::vector<Region>& regions, const Region& corridor);

/// The reference cohort: a 4x4 world of 2-degree regions, a diagonal corridor,
/// 500 users, home fidelity 0.8 and place/coordinate ratios in the range
/// reported for real georeferenced histories.
ScenarioSpec standard_scenario(std::uint64_t seed = 42);

}  // namespace geoflow::synth
