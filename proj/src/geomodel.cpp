#include "geoflow/geomodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "geoflow/error.hpp"

namespace geoflow {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Edge distance under which a point counts as lying on a ring boundary.
constexpr double kBoundaryTolerance = 1e-6;

// Drops the closing vertex of a closed ring.
template <typename P>
std::span<const P> open_view(std::span<const P> ring) {
  if (ring.size() >= 2 && ring.front() == ring.back()) return ring.first(ring.size() - 1);
  return ring;
}

std::size_t distinct_vertices(std::span<const PlanarPoint> ring) {
  std::vector<std::pair<double, double>> v;
  v.reserve(ring.size());
  for (const auto& p : ring) v.emplace_back(p.x, p.y);
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

struct RingMoments {
  double twice_signed_area = 0.0;
  double cx_numerator = 0.0;  // relative to the reference vertex
  double cy_numerator = 0.0;
  PlanarPoint reference;
};

RingMoments ring_moments(std::span<const PlanarPoint> ring) {
  auto open = open_view(ring);
  RingMoments m;
  if (open.empty()) return m;
  m.reference = open.front();
  const std::size_t n = open.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = open[i].x - m.reference.x;
    const double y0 = open[i].y - m.reference.y;
    const double x1 = open[(i + 1) % n].x - m.reference.x;
    const double y1 = open[(i + 1) % n].y - m.reference.y;
    const double cross = x0 * y1 - x1 * y0;
    m.twice_signed_area += cross;
    m.cx_numerator += (x0 + x1) * cross;
    m.cy_numerator += (y0 + y1) * cross;
  }
  return m;
}

PlanarPoint vertex_mean(std::span<const PlanarPoint> ring) {
  auto open = open_view(ring);
  PlanarPoint mean;
  for (const auto& p : open) {
    mean.x += p.x;
    mean.y += p.y;
  }
  mean.x /= static_cast<double>(open.size());
  mean.y /= static_cast<double>(open.size());
  return mean;
}

void require_ring(std::span<const PlanarPoint> ring) {
  if (distinct_vertices(open_view(ring)) < 3) {
    fail(ErrorKind::invalid_geometry, "ring has fewer than 3 distinct vertices");
  }
}

bool degenerate_area(double area, std::span<const PlanarPoint> ring) {
  const auto box = BoundingBox::of(ring);
  const double scale = box.width() * box.width() + box.height() * box.height();
  return !(area > 1e-12 * scale);
}

// Degree-space view of a lat/lon ring, x = lon and y = lat.
PlanarRing degree_ring(std::span<const LatLon> ring) {
  PlanarRing out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back({p.lon, p.lat});
  return out;
}

double segment_distance(PlanarPoint p, PlanarPoint a, PlanarPoint b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::invalid_geometry: return "invalid geometry";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::resource_limit: return "resource limit";
    case ErrorKind::no_variance: return "no variance";
    case ErrorKind::empty_table: return "empty table";
    case ErrorKind::data: return "data error";
  }
  return "error";
}

std::string_view to_string(PlaceScale scale) {
  switch (scale) {
    case PlaceScale::poi: return "poi";
    case PlaceScale::neighborhood: return "neighborhood";
    case PlaceScale::city: return "city";
    case PlaceScale::admin: return "admin";
    case PlaceScale::country: return "country";
  }
  return "?";
}

std::optional<PlaceScale> parse_place_scale(std::string_view text) {
  for (auto s : {PlaceScale::poi, PlaceScale::neighborhood, PlaceScale::city,
                 PlaceScale::admin, PlaceScale::country}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

const Region* find_region(std::span<const Region> regions, std::string_view region_id) {
  for (const auto& r : regions) {
    if (r.region_id == region_id) return &r;
  }
  return nullptr;
}

void validate_region_set(std::span<const Region> regions) {
  std::set<std::string_view> ids;
  for (const auto& r : regions) {
    if (r.region_id.empty()) fail(ErrorKind::invalid_geometry, "region with empty region_id");
    if (!ids.insert(r.region_id).second) {
      fail(ErrorKind::invalid_geometry, "duplicate region_id '" + r.region_id + "'");
    }
    if (r.boundary.empty()) {
      fail(ErrorKind::invalid_geometry, "region '" + r.region_id + "' has no rings");
    }
    if (r.population < 0) {
      fail(ErrorKind::invalid_geometry, "region '" + r.region_id + "' has negative population");
    }
    for (const auto& ring : r.boundary) {
      for (const auto& p : ring) validate_latlon(p);
      require_ring(degree_ring(ring));
    }
  }
}

Projection::Projection(double origin_lat, double origin_lon)
    : origin_lat_(origin_lat),
      origin_lon_(origin_lon),
      cos_origin_lat_(std::cos(origin_lat * kDegToRad)) {
  if (!std::isfinite(origin_lat) || !std::isfinite(origin_lon) || std::abs(origin_lat) >= 90.0) {
    fail(ErrorKind::invalid_geometry, "projection origin must be finite with |lat| < 90");
  }
}

PlanarPoint Projection::forward(LatLon p) const {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) {
    fail(ErrorKind::invalid_geometry, "non-finite coordinate");
  }
  return {kEarthRadius * (p.lon - origin_lon_) * kDegToRad * cos_origin_lat_,
          kEarthRadius * (p.lat - origin_lat_) * kDegToRad};
}

LatLon Projection::inverse(PlanarPoint p) const {
  return {origin_lat_ + p.y / kEarthRadius / kDegToRad,
          origin_lon_ + p.x / (kEarthRadius * cos_origin_lat_) / kDegToRad};
}

void validate_latlon(LatLon p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || p.lat < -90.0 || p.lat > 90.0 ||
      p.lon < -180.0 || p.lon > 180.0) {
    std::ostringstream msg;
    msg << "coordinate out of range (lat=" << p.lat << ", lon=" << p.lon << ")";
    fail(ErrorKind::invalid_geometry, msg.str());
  }
}

LatLonRing normalize_ring(LatLonRing ring) {
  if (!ring.empty() && !(ring.front() == ring.back())) ring.push_back(ring.front());
  require_ring(degree_ring(ring));
  return ring;
}

double polygon_area(std::span<const PlanarPoint> ring) {
  require_ring(ring);
  const double area = std::abs(ring_moments(ring).twice_signed_area) / 2.0;
  if (degenerate_area(area, ring)) fail(ErrorKind::invalid_geometry, "ring has zero area");
  return area;
}

PlanarPoint polygon_centroid(std::span<const PlanarPoint> ring) {
  require_ring(ring);
  const auto m = ring_moments(ring);
  if (degenerate_area(std::abs(m.twice_signed_area) / 2.0, ring)) return vertex_mean(ring);
  const double six_a = 3.0 * m.twice_signed_area;
  return {m.reference.x + m.cx_numerator / six_a, m.reference.y + m.cy_numerator / six_a};
}

PlanarRing project_ring(std::span<const LatLon> ring, const Projection& proj) {
  PlanarRing out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back(proj.forward(p));
  return out;
}

BoundingBox BoundingBox::of(std::span<const PlanarPoint> pts) {
  BoundingBox b;
  if (pts.empty()) return b;
  b.min_x = b.max_x = pts.front().x;
  b.min_y = b.max_y = pts.front().y;
  for (const auto& p : pts) {
    b.min_x = std::min(b.min_x, p.x);
    b.max_x = std::max(b.max_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

void BoundingBox::expand(const BoundingBox& other) {
  min_x = std::min(min_x, other.min_x);
  min_y = std::min(min_y, other.min_y);
  max_x = std::max(max_x, other.max_x);
  max_y = std::max(max_y, other.max_y);
}

ProjectedRegion project_region(const Region& region, const Projection& proj) {
  ProjectedRegion out;
  out.region = region;
  for (const auto& ring : region.boundary) out.rings.push_back(project_ring(ring, proj));
  for (std::size_t i = 0; i < out.rings.size(); ++i) {
    const auto box = BoundingBox::of(out.rings[i]);
    if (i == 0) {
      out.bbox = box;
    } else {
      out.bbox.expand(box);
    }
  }
  return out;
}

std::vector<ProjectedRegion> project_regions(std::span<const Region> regions,
                                             const Projection& proj) {
  std::vector<ProjectedRegion> out;
  out.reserve(regions.size());
  for (const auto& r : regions) out.push_back(project_region(r, proj));
  return out;
}

bool point_in_ring(PlanarPoint p, std::span<const PlanarPoint> ring) {
  auto open = open_view(ring);
  const std::size_t n = open.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = open[i];
    const auto& b = open[j];
    if (segment_distance(p, a, b) <= kBoundaryTolerance) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool point_in_region(PlanarPoint p, const ProjectedRegion& region) {
  const double tol = kBoundaryTolerance;
  if (p.x < region.bbox.min_x - tol || p.x > region.bbox.max_x + tol ||
      p.y < region.bbox.min_y - tol || p.y > region.bbox.max_y + tol) {
    return false;
  }
  bool inside = false;
  for (const auto& ring : region.rings) {
    auto open = open_view(std::span<const PlanarPoint>(ring));
    const std::size_t n = open.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      if (segment_distance(p, open[i], open[j]) <= tol) return true;
    }
    if (point_in_ring(p, ring)) inside = !inside;
  }
  return inside;
}

std::optional<std::size_t> locate(PlanarPoint p, std::span<const ProjectedRegion> regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (point_in_region(p, regions[i])) return i;
  }
  return std::nullopt;
}

LatLon place_centroid(const Place& place) {
  double twice_area = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  PlanarPoint sum;
  std::size_t count = 0;
  for (const auto& ring : place.boundary) {
    const auto deg = degree_ring(ring);
    require_ring(deg);
    const auto m = ring_moments(deg);
    // Orientation-independent: weight each ring by its absolute area.
    const double sign = m.twice_signed_area < 0.0 ? -1.0 : 1.0;
    twice_area += sign * m.twice_signed_area;
    cx += sign * (m.cx_numerator / 3.0 + m.reference.x * m.twice_signed_area);
    cy += sign * (m.cy_numerator / 3.0 + m.reference.y * m.twice_signed_area);
    for (const auto& p : open_view(std::span<const PlanarPoint>(deg))) {
      sum.x += p.x;
      sum.y += p.y;
      ++count;
    }
  }
  if (count == 0) fail(ErrorKind::invalid_geometry, "place has no boundary");
  double extent = 0.0;
  for (const auto& ring : place.boundary) {
    const auto box = BoundingBox::of(degree_ring(ring));
    extent = std::max(extent, box.width() * box.width() + box.height() * box.height());
  }
  if (!(twice_area / 2.0 > 1e-12 * extent)) {
    return {sum.y / static_cast<double>(count), sum.x / static_cast<double>(count)};
  }
  return {cy / twice_area, cx / twice_area};
}

double place_area_m2(const Place& place) {
  const auto c = place_centroid(place);
  const Projection local(c.lat, c.lon);
  double area = 0.0;
  for (const auto& ring : place.boundary) area += polygon_area(project_ring(ring, local));
  return area;
}

LatLon representative_latlon(const Georeference& georef) {
  if (const auto* p = std::get_if<LatLon>(&georef)) return *p;
  return place_centroid(std::get<Place>(georef));
}

PlanarPoint representative_point(const Georeference& georef, const Projection& proj) {
  return proj.forward(representative_latlon(georef));
}

Projection fit_projection(std::span<const GeoRecord> records) {
  if (records.empty()) fail(ErrorKind::invalid_argument, "cannot fit a projection to no records");
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& r : records) {
    const auto p = representative_latlon(r.georef);
    lat += p.lat;
    lon += p.lon;
  }
  const auto n = static_cast<double>(records.size());
  return Projection(lat / n, lon / n);
}

void validate_record(const GeoRecord& record) {
  if (record.record_id.empty()) fail(ErrorKind::invalid_argument, "record_id is empty");
  if (record.user_id.empty()) fail(ErrorKind::invalid_argument, "user_id is empty");
  if (const auto* p = std::get_if<LatLon>(&record.georef)) {
    validate_latlon(*p);
    return;
  }
  const auto& place = std::get<Place>(record.georef);
  if (place.boundary.empty()) fail(ErrorKind::invalid_geometry, "place has no boundary");
  for (const auto& ring : place.boundary) {
    for (const auto& p : ring) validate_latlon(p);
    require_ring(degree_ring(ring));
  }
}

}  // namespace geoflow
