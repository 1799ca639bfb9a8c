#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "geoflow/vbkde.hpp"

namespace geoflow {

inline constexpr double kAsciiNoData = -9999.0;

/// ESRI ASCII raster. Values are held south row first, like GridSpec.
struct AsciiGrid {
  GridSpec grid;
  double nodata = kAsciiNoData;
  std::vector<double> values;
};

/// Header (ncols, nrows, xllcorner, yllcorner, cellsize, NODATA_value) then
/// rows north to south with shortest round-trip number formatting.
std::string to_ascii_grid(const GridSpec& grid, const std::vector<double>& values);
inline std::string to_ascii_grid(const ActivitySurface& surface) {
  return to_ascii_grid(surface.grid, surface.values);
}

AsciiGrid parse_ascii_grid(const std::string& text);
AsciiGrid read_ascii_grid(const std::filesystem::path& path);

}  // namespace geoflow
