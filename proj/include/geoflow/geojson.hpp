#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geoflow/geomodel.hpp"

namespace geoflow {

/// Loads a region set from a GeoJSON FeatureCollection of Polygon or
/// MultiPolygon features. Properties: region_id (string or integer), name,
/// population, utc_offset_hours (optional). Interior rings are ignored.
std::vector<Region> load_regions_geojson(const std::filesystem::path& path);
std::vector<Region> parse_regions_geojson(const std::string& text);

std::string regions_to_geojson(const std::vector<Region>& regions);

}  // namespace geoflow
