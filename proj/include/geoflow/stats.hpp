#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoflow/geomodel.hpp"

namespace geoflow {

struct ZoneCount {
  std::string region_id;
  std::size_t raw_count = 0;
  std::int64_t population = 0;
  std::optional<double> rate;  // raw_count / population when population > 0
};

struct ZoneCounts {
  std::vector<ZoneCount> zones;  // same order as the zone set
  std::size_t residual = 0;         // kept records outside every zone
  std::size_t excluded_coarse = 0;  // places coarser than the scale limit
};

/// Counts records per zone after dropping places coarser than max_scale.
/// Each record joins the first zone (in zone-set order) containing its
/// representative point.
ZoneCounts count_by_zone(std::span<const GeoRecord> records,
                         std::span<const ProjectedRegion> zones, const Projection& proj,
                         PlaceScale max_scale, unsigned threads = 1);

/// Sorted neighbor lists; self is never listed.
using Adjacency = std::vector<std::vector<std::size_t>>;

/// Zones touching in at least one boundary point (a vertex of one within
/// snap_degrees of an edge of the other) are neighbors.
Adjacency contiguity(std::span<const Region> zones, double snap_degrees = 1e-6);

enum class HotspotClass { hot99, hot95, hot90, not_significant, cold90, cold95, cold99 };

std::string_view to_string(HotspotClass c);
HotspotClass classify_z(double z);

struct HotspotRow {
  std::string region_id;
  double value = 0.0;
  double gi_star_z = 0.0;
  HotspotClass classification = HotspotClass::not_significant;
};

struct HotspotResult {
  std::vector<HotspotRow> rows;
  std::vector<std::string> excluded;  // zero-population zones skipped in rate mode
};

/// Getis-Ord Gi* z-scores with self-inclusive binary weights. All-equal values
/// give z = 0 everywhere. Throws no_variance for fewer than three zones.
std::vector<double> gi_star_z(std::span<const double> values, const Adjacency& adjacency);

HotspotResult gi_star(const ZoneCounts& counts, const Adjacency& adjacency, bool use_rate);

std::string hotspots_to_csv(const HotspotResult& result);

struct TemporalHistogram {
  std::int64_t first_day = 0;  // days since epoch, inclusive
  std::int64_t last_day = 0;   // inclusive
  std::vector<std::array<std::size_t, 2>> bins;  // [(day - first_day) * 24 + hour] -> {inside, outside}
  std::size_t fallback_offsets = 0;  // offsets taken from the longitude rule
  std::size_t outside_range = 0;     // records whose local day is outside the range

  std::size_t inside(std::int64_t day, int hour) const;
  std::size_t outside(std::int64_t day, int hour) const;
  std::size_t total() const;
};

/// UTC offset in hours: the containing zone's offset when set, else round(lon / 15).
double resolve_utc_offset(const GeoRecord& record, std::span<const ProjectedRegion> zones,
                          const Projection& proj, bool& fell_back);

/// Local (day, hour) for a UTC timestamp at a fixed offset in hours.
std::pair<std::int64_t, int> local_day_hour(std::int64_t timestamp_utc, double offset_hours);

TemporalHistogram temporal_histogram(std::span<const GeoRecord> records,
                                     const ProjectedRegion& corridor,
                                     std::span<const ProjectedRegion> zones,
                                     const Projection& proj, std::int64_t first_day,
                                     std::int64_t last_day);

std::string histogram_to_csv(const TemporalHistogram& histogram);

}  // namespace geoflow
