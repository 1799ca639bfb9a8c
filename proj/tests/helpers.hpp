#pragma once

#include <string>
#include <vector>

#include "geoflow/geomodel.hpp"

namespace testing_util {

using namespace geoflow;

inline LatLonRing box_ring(double south, double west, double north, double east) {
  return {{south, west}, {south, east}, {north, east}, {north, west}, {south, west}};
}

inline Region box_region(std::string id, double south, double west, double north, double east,
                         std::int64_t population = 1000) {
  Region r;
  r.region_id = id;
  r.name = id;
  r.boundary.push_back(box_ring(south, west, north, east));
  r.population = population;
  return r;
}

inline GeoRecord coord_record(std::string id, std::string user, std::int64_t ts, double lat,
                              double lon, std::string text = "hello") {
  return GeoRecord{std::move(id), std::move(user), ts, std::move(text), LatLon{lat, lon}};
}

inline GeoRecord place_record(std::string id, std::string user, std::int64_t ts, PlaceScale scale,
                              double south, double west, double north, double east,
                              std::string text = "hello") {
  return GeoRecord{std::move(id), std::move(user), ts, std::move(text),
                   Place{scale, {box_ring(south, west, north, east)}}};
}

}  // namespace testing_util
