#include "geoflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoflow/error.hpp"
#include "geoflow/parallel.hpp"
#include "geoflow/text_io.hpp"

namespace geoflow {

ZoneCounts count_by_zone(std::span<const GeoRecord> records,
                         std::span<const ProjectedRegion> zones, const Projection& proj,
                         PlaceScale max_scale, unsigned threads) {
  struct Partial {
    std::vector<std::size_t> counts;
    std::size_t residual = 0;
    std::size_t excluded = 0;
  };
  const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(threads, records.size()));
  std::vector<Partial> partials(parts, Partial{std::vector<std::size_t>(zones.size(), 0)});
  parallel_for(parts, threads, [&](std::size_t p) {
    auto& part = partials[p];
    const std::size_t begin = records.size() * p / parts;
    const std::size_t end = records.size() * (p + 1) / parts;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = records[i];
      if (const auto* place = std::get_if<Place>(&r.georef);
          place && coarser_than(place->scale, max_scale)) {
        ++part.excluded;
        continue;
      }
      const auto zone = locate(representative_point(r.georef, proj), zones);
      if (zone) {
        ++part.counts[*zone];
      } else {
        ++part.residual;
      }
    }
  });

  ZoneCounts out;
  out.zones.reserve(zones.size());
  for (const auto& z : zones) out.zones.push_back({z.id(), 0, z.region.population, std::nullopt});
  for (const auto& part : partials) {
    for (std::size_t z = 0; z < zones.size(); ++z) out.zones[z].raw_count += part.counts[z];
    out.residual += part.residual;
    out.excluded_coarse += part.excluded;
  }
  for (auto& z : out.zones) {
    if (z.population > 0) z.rate = static_cast<double>(z.raw_count) / static_cast<double>(z.population);
  }
  return out;
}

namespace {

double distance_to_segment(double px, double py, const LatLon& a, const LatLon& b) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - a.lon) * dx + (py - a.lat) * dy) / len2, 0.0, 1.0);
  return std::hypot(px - (a.lon + t * dx), py - (a.lat + t * dy));
}

struct DegreeBox {
  double min_lon, min_lat, max_lon, max_lat;
};

DegreeBox box_of(const Region& r) {
  DegreeBox b{1e300, 1e300, -1e300, -1e300};
  for (const auto& ring : r.boundary) {
    for (const auto& p : ring) {
      b.min_lon = std::min(b.min_lon, p.lon);
      b.max_lon = std::max(b.max_lon, p.lon);
      b.min_lat = std::min(b.min_lat, p.lat);
      b.max_lat = std::max(b.max_lat, p.lat);
    }
  }
  return b;
}

bool vertices_touch(const Region& a, const Region& b, double tol) {
  for (const auto& ring_a : a.boundary) {
    for (const auto& v : ring_a) {
      for (const auto& ring_b : b.boundary) {
        for (std::size_t i = 0; i + 1 < ring_b.size(); ++i) {
          if (distance_to_segment(v.lon, v.lat, ring_b[i], ring_b[i + 1]) <= tol) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

Adjacency contiguity(std::span<const Region> zones, double snap_degrees) {
  std::vector<DegreeBox> boxes;
  boxes.reserve(zones.size());
  for (const auto& z : zones) boxes.push_back(box_of(z));
  Adjacency adj(zones.size());
  for (std::size_t i = 0; i < zones.size(); ++i) {
    for (std::size_t j = i + 1; j < zones.size(); ++j) {
      const auto& a = boxes[i];
      const auto& b = boxes[j];
      if (a.max_lon + snap_degrees < b.min_lon || b.max_lon + snap_degrees < a.min_lon ||
          a.max_lat + snap_degrees < b.min_lat || b.max_lat + snap_degrees < a.min_lat) {
        continue;
      }
      if (vertices_touch(zones[i], zones[j], snap_degrees) ||
          vertices_touch(zones[j], zones[i], snap_degrees)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  }
  return adj;
}

std::string_view to_string(HotspotClass c) {
  switch (c) {
    case HotspotClass::hot99: return "hot99";
    case HotspotClass::hot95: return "hot95";
    case HotspotClass::hot90: return "hot90";
    case HotspotClass::not_significant: return "not_significant";
    case HotspotClass::cold90: return "cold90";
    case HotspotClass::cold95: return "cold95";
    case HotspotClass::cold99: return "cold99";
  }
  return "?";
}

HotspotClass classify_z(double z) {
  const double a = std::abs(z);
  if (a >= 2.58) return z > 0 ? HotspotClass::hot99 : HotspotClass::cold99;
  if (a >= 1.96) return z > 0 ? HotspotClass::hot95 : HotspotClass::cold95;
  if (a >= 1.645) return z > 0 ? HotspotClass::hot90 : HotspotClass::cold90;
  return HotspotClass::not_significant;
}

std::vector<double> gi_star_z(std::span<const double> values, const Adjacency& adjacency) {
  const std::size_t n = values.size();
  if (n < 3) fail(ErrorKind::no_variance, "Gi* needs at least 3 zones, got " + std::to_string(n));
  if (adjacency.size() != n) fail(ErrorKind::invalid_argument, "adjacency size does not match values");
  const double nd = static_cast<double>(n);

  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= nd;
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / nd);

  std::vector<double> z(n, 0.0);
  if (sd == 0.0) return z;
  for (std::size_t i = 0; i < n; ++i) {
    double local = values[i];
    for (auto j : adjacency[i]) {
      if (j >= n || j == i) fail(ErrorKind::invalid_argument, "adjacency lists an invalid neighbor");
      local += values[j];
    }
    const double w = static_cast<double>(adjacency[i].size() + 1);
    const double spread = (nd * w - w * w) / (nd - 1.0);
    if (spread <= 0.0) continue;  // zone neighbors everything: numerator is zero too
    z[i] = (local - mean * w) / (sd * std::sqrt(spread));
  }
  return z;
}

HotspotResult gi_star(const ZoneCounts& counts, const Adjacency& adjacency, bool use_rate) {
  if (adjacency.size() != counts.zones.size()) {
    fail(ErrorKind::invalid_argument, "adjacency size does not match the zone counts");
  }
  for (std::size_t i = 0; i < adjacency.size(); ++i) {
    for (auto j : adjacency[i]) {
      if (j >= adjacency.size() ||
          !std::binary_search(adjacency[j].begin(), adjacency[j].end(), i)) {
        fail(ErrorKind::invalid_argument, "adjacency must be symmetric with sorted neighbor lists");
      }
    }
  }
  HotspotResult result;
  std::vector<std::ptrdiff_t> kept_index(counts.zones.size(), -1);
  std::vector<std::size_t> kept;
  std::vector<double> values;
  for (std::size_t i = 0; i < counts.zones.size(); ++i) {
    const auto& z = counts.zones[i];
    if (use_rate && !z.rate) {
      result.excluded.push_back(z.region_id);
      continue;
    }
    kept_index[i] = static_cast<std::ptrdiff_t>(kept.size());
    kept.push_back(i);
    values.push_back(use_rate ? *z.rate : static_cast<double>(z.raw_count));
  }
  Adjacency sub(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    for (auto j : adjacency[kept[k]]) {
      if (kept_index[j] >= 0) sub[k].push_back(static_cast<std::size_t>(kept_index[j]));
    }
  }
  const auto z = gi_star_z(values, sub);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    result.rows.push_back({counts.zones[kept[k]].region_id, values[k], z[k], classify_z(z[k])});
  }
  return result;
}

std::string hotspots_to_csv(const HotspotResult& result) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"region_id", "value", "gi_star_z", "classification"});
  for (const auto& r : result.rows) {
    csv.row({r.region_id, format_double(r.value), format_double(r.gi_star_z),
             std::string(to_string(r.classification))});
  }
  return out.str();
}

// ---- temporal ------------------------------------------------------------

std::size_t TemporalHistogram::inside(std::int64_t day, int hour) const {
  if (day < first_day || day > last_day || hour < 0 || hour > 23) return 0;
  return bins[static_cast<std::size_t>((day - first_day) * 24 + hour)][0];
}

std::size_t TemporalHistogram::outside(std::int64_t day, int hour) const {
  if (day < first_day || day > last_day || hour < 0 || hour > 23) return 0;
  return bins[static_cast<std::size_t>((day - first_day) * 24 + hour)][1];
}

std::size_t TemporalHistogram::total() const {
  std::size_t t = 0;
  for (const auto& b : bins) t += b[0] + b[1];
  return t;
}

double resolve_utc_offset(const GeoRecord& record, std::span<const ProjectedRegion> zones,
                          const Projection& proj, bool& fell_back) {
  const auto ll = representative_latlon(record.georef);
  const auto zone = locate(proj.forward(ll), zones);
  if (zone && zones[*zone].region.utc_offset_hours) {
    fell_back = false;
    return *zones[*zone].region.utc_offset_hours;
  }
  fell_back = true;
  return std::round(ll.lon / 15.0);
}

std::pair<std::int64_t, int> local_day_hour(std::int64_t timestamp_utc, double offset_hours) {
  const std::int64_t local = timestamp_utc + std::llround(offset_hours * 3600.0);
  const std::int64_t day = floor_div(local, 86400);
  return {day, static_cast<int>((local - day * 86400) / 3600)};
}

TemporalHistogram temporal_histogram(std::span<const GeoRecord> records,
                                     const ProjectedRegion& corridor,
                                     std::span<const ProjectedRegion> zones,
                                     const Projection& proj, std::int64_t first_day,
                                     std::int64_t last_day) {
  if (first_day > last_day) fail(ErrorKind::invalid_argument, "day range is reversed");
  TemporalHistogram h;
  h.first_day = first_day;
  h.last_day = last_day;
  h.bins.assign(static_cast<std::size_t>((last_day - first_day + 1) * 24), {0, 0});
  for (const auto& r : records) {
    bool fell_back = false;
    const double offset = resolve_utc_offset(r, zones, proj, fell_back);
    if (fell_back) ++h.fallback_offsets;
    const auto [day, hour] = local_day_hour(r.timestamp_utc, offset);
    if (day < first_day || day > last_day) {
      ++h.outside_range;
      continue;
    }
    const bool in = point_in_region(representative_point(r.georef, proj), corridor);
    ++h.bins[static_cast<std::size_t>((day - first_day) * 24 + hour)][in ? 0 : 1];
  }
  return h;
}

std::string histogram_to_csv(const TemporalHistogram& histogram) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"date", "hour", "inside_count", "outside_count"});
  for (auto day = histogram.first_day; day <= histogram.last_day; ++day) {
    for (int hour = 0; hour < 24; ++hour) {
      csv.row({format_date(day), std::to_string(hour),
               std::to_string(histogram.inside(day, hour)),
               std::to_string(histogram.outside(day, hour))});
    }
  }
  return out.str();
}

}  // namespace geoflow
