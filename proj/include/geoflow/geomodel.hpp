#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geoflow {

// Ordered finest to coarsest so that `a > b` reads "a is coarser than b".
enum class PlaceScale : std::uint8_t { poi, neighborhood, city, admin, country };

constexpr bool coarser_than(PlaceScale a, PlaceScale b) { return a > b; }

std::string_view to_string(PlaceScale scale);
std::optional<PlaceScale> parse_place_scale(std::string_view text);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

using LatLonRing = std::vector<LatLon>;

struct Place {
  PlaceScale scale = PlaceScale::city;
  std::vector<LatLonRing> boundary;
};

/// A record is located either by a precise coordinate or by a place polygon.
using Georeference = std::variant<LatLon, Place>;

inline bool is_place(const Georeference& g) { return std::holds_alternative<Place>(g); }

struct GeoRecord {
  std::string record_id;
  std::string user_id;
  std::int64_t timestamp_utc = 0;
  std::string text;
  Georeference georef;
};

struct Region {
  std::string region_id;
  std::string name;
  std::vector<LatLonRing> boundary;
  std::int64_t population = 0;
  std::optional<double> utc_offset_hours;
};

const Region* find_region(std::span<const Region> regions, std::string_view region_id);

/// Throws invalid_geometry on duplicate ids or invalid rings.
void validate_region_set(std::span<const Region> regions);

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

using PlanarRing = std::vector<PlanarPoint>;

/// Equirectangular projection about a fixed origin. The mapping is affine in
/// (lat, lon), so centroids and area ratios computed in degree space carry
/// over exactly to planar meters.
class Projection {
 public:
  static constexpr double kEarthRadius = 6371008.8;

  Projection() : Projection(0.0, 0.0) {}
  Projection(double origin_lat, double origin_lon);

  double origin_lat() const { return origin_lat_; }
  double origin_lon() const { return origin_lon_; }

  PlanarPoint forward(LatLon p) const;
  LatLon inverse(PlanarPoint p) const;

 private:
  double origin_lat_;
  double origin_lon_;
  double cos_origin_lat_;
};

void validate_latlon(LatLon p);

/// Closes the ring if needed and checks it has at least three distinct vertices.
LatLonRing normalize_ring(LatLonRing ring);

/// Absolute shoelace area. Accepts open or closed rings.
/// Throws invalid_geometry for fewer than three distinct vertices or zero area.
double polygon_area(std::span<const PlanarPoint> ring);

/// Area-weighted centroid; falls back to the vertex mean for zero-area rings.
PlanarPoint polygon_centroid(std::span<const PlanarPoint> ring);

PlanarRing project_ring(std::span<const LatLon> ring, const Projection& proj);

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static BoundingBox of(std::span<const PlanarPoint> pts);
  bool contains(PlanarPoint p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  void expand(const BoundingBox& other);
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

struct ProjectedRegion {
  Region region;
  std::vector<PlanarRing> rings;
  BoundingBox bbox;

  const std::string& id() const { return region.region_id; }
};

ProjectedRegion project_region(const Region& region, const Projection& proj);
std::vector<ProjectedRegion> project_regions(std::span<const Region> regions,
                                             const Projection& proj);

/// Even-odd test over all rings; points on any ring edge count as inside.
bool point_in_ring(PlanarPoint p, std::span<const PlanarPoint> ring);
bool point_in_region(PlanarPoint p, const ProjectedRegion& region);

/// Index of the first region (in the given order) containing p.
std::optional<std::size_t> locate(PlanarPoint p, std::span<const ProjectedRegion> regions);

LatLon place_centroid(const Place& place);

/// Place area in square meters, measured in a local projection centered on
/// the place itself.
double place_area_m2(const Place& place);

LatLon representative_latlon(const Georeference& georef);
PlanarPoint representative_point(const Georeference& georef, const Projection& proj);

/// Projection centered on the mean representative location of the records.
Projection fit_projection(std::span<const GeoRecord> records);

/// Checks every GeoRecord invariant except store-level id uniqueness.
void validate_record(const GeoRecord& record);

}  // namespace geoflow
