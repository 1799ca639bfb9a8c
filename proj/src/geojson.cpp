#include "geoflow/geojson.hpp"

#include <json.hpp>

#include "geoflow/error.hpp"
#include "geoflow/text_io.hpp"

namespace geoflow {

namespace {

using nlohmann::json;

LatLonRing parse_ring(const json& coords) {
  LatLonRing ring;
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2) {
      fail(ErrorKind::invalid_geometry, "GeoJSON position must be [lon, lat]");
    }
    ring.push_back({pos[1].get<double>(), pos[0].get<double>()});
  }
  return normalize_ring(std::move(ring));
}

// Only the outer ring of each polygon is kept; holes are not modeled.
void add_polygon(const json& polygon, std::vector<LatLonRing>& rings) {
  if (!polygon.is_array() || polygon.empty()) {
    fail(ErrorKind::invalid_geometry, "GeoJSON polygon has no rings");
  }
  rings.push_back(parse_ring(polygon.front()));
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  fail(ErrorKind::invalid_geometry, "region_id must be a string or integer");
}

}  // namespace

std::vector<Region> parse_regions_geojson(const std::string& text) {
  std::vector<Region> regions;
  try {
    const auto doc = json::parse(text);
    if (doc.value("type", "") != "FeatureCollection") {
      fail(ErrorKind::invalid_geometry, "expected a GeoJSON FeatureCollection");
    }
    for (const auto& feature : doc.at("features")) {
      const auto& props = feature.at("properties");
      const auto& geom = feature.at("geometry");
      Region r;
      r.region_id = id_string(props.at("region_id"));
      r.name = props.value("name", r.region_id);
      r.population = props.value("population", std::int64_t{0});
      if (props.contains("utc_offset_hours") && !props["utc_offset_hours"].is_null()) {
        r.utc_offset_hours = props["utc_offset_hours"].get<double>();
      }
      const auto type = geom.at("type").get<std::string>();
      if (type == "Polygon") {
        add_polygon(geom.at("coordinates"), r.boundary);
      } else if (type == "MultiPolygon") {
        for (const auto& poly : geom.at("coordinates")) add_polygon(poly, r.boundary);
      } else {
        fail(ErrorKind::invalid_geometry, "unsupported geometry type '" + type + "' for region '" +
                                              r.region_id + "'");
      }
      regions.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_geometry, std::string("malformed GeoJSON: ") + e.what());
  }
  validate_region_set(regions);
  return regions;
}

std::vector<Region> load_regions_geojson(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return parse_regions_geojson(text);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string regions_to_geojson(const std::vector<Region>& regions) {
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = nlohmann::ordered_json::array();
  for (const auto& r : regions) {
    nlohmann::ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"]["region_id"] = r.region_id;
    feature["properties"]["name"] = r.name;
    feature["properties"]["population"] = r.population;
    if (r.utc_offset_hours) feature["properties"]["utc_offset_hours"] = *r.utc_offset_hours;
    auto polys = nlohmann::ordered_json::array();
    for (const auto& ring : r.boundary) {
      auto coords = nlohmann::ordered_json::array();
      for (const auto& p : ring) coords.push_back({p.lon, p.lat});
      polys.push_back(nlohmann::ordered_json::array({coords}));
    }
    feature["geometry"]["type"] = "MultiPolygon";
    feature["geometry"]["coordinates"] = polys;
    doc["features"].push_back(feature);
  }
  return doc.dump(1) + "\n";
}

}  // namespace geoflow
