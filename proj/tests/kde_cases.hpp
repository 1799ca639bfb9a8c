#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "geoflow/geomodel.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

namespace testing_util {

// Independent kernel sites for rectangle places and coordinates.
inline std::vector<oracle::Site> oracle_sites(const std::vector<GeoRecord>& records, double lat0,
                                              double lon0, bool variable) {
  std::vector<oracle::Pt> centers;
  std::vector<double> areas;
  for (const auto& r : records) {
    if (const auto* c = std::get_if<LatLon>(&r.georef)) {
      centers.push_back(oracle::project(c->lat, c->lon, lat0, lon0));
      areas.push_back(0.0);
    } else {
      const auto& ring = std::get<Place>(r.georef).boundary[0];
      const double clat = (ring[0].lat + ring[2].lat) / 2.0;
      const double clon = (ring[0].lon + ring[2].lon) / 2.0;
      centers.push_back(oracle::project(clat, clon, lat0, lon0));
      std::vector<oracle::Pt> local;
      for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        local.push_back(oracle::project(ring[i].lat, ring[i].lon, clat, clon));
      }
      areas.push_back(oracle::shoelace(local));
    }
  }
  const double bw = oracle::base_bandwidth(centers);
  std::vector<oracle::Site> sites;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    sites.push_back({centers[i], variable ? std::sqrt((areas[i] + 80.0) / 80.0) * bw : bw});
  }
  return sites;
}

inline std::vector<GeoRecord> random_records(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> lat(44.9, 45.1), lon(-120.15, -119.85), side(0.0001, 0.004);
  std::uniform_int_distribution<int> kind(0, 2);
  std::vector<GeoRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = lat(rng), o = lon(rng);
    if (kind(rng) == 0) {
      out.push_back(coord_record(std::to_string(i), "u", 0, a, o));
    } else {
      const double s = side(rng);
      out.push_back(place_record(std::to_string(i), "u", 0, PlaceScale::poi, a - s, o - s, a + s, o + s));
    }
  }
  return out;
}

}  // namespace testing_util
