#include "geoflow/ascii_grid.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "geoflow/error.hpp"
#include "geoflow/text_io.hpp"

namespace geoflow {

std::string to_ascii_grid(const GridSpec& grid, const std::vector<double>& values) {
  if (values.size() != grid.cells()) {
    fail(ErrorKind::invalid_argument, "raster values do not match the grid");
  }
  std::string out;
  out.reserve(values.size() * 12 + 128);
  out += "ncols " + std::to_string(grid.n_cols) + "\n";
  out += "nrows " + std::to_string(grid.n_rows) + "\n";
  out += "xllcorner " + format_double(grid.origin.x) + "\n";
  out += "yllcorner " + format_double(grid.origin.y) + "\n";
  out += "cellsize " + format_double(grid.cell_size) + "\n";
  out += "NODATA_value " + format_double(kAsciiNoData) + "\n";
  for (std::size_t r = grid.n_rows; r-- > 0;) {
    for (std::size_t c = 0; c < grid.n_cols; ++c) {
      if (c) out += ' ';
      out += format_double(values[r * grid.n_cols + c]);
    }
    out += '\n';
  }
  return out;
}

AsciiGrid parse_ascii_grid(const std::string& text) {
  std::istringstream in(text);
  std::map<std::string, double> header;
  std::string key;
  bool corner_x = true;
  bool corner_y = true;
  for (int i = 0; i < 6 && in >> key; ++i) {
    key = to_lower(key);
    if (key == "xllcenter") corner_x = false;
    if (key == "yllcenter") corner_y = false;
    if (key == "xllcenter") key = "xllcorner";
    if (key == "yllcenter") key = "yllcorner";
    double v = 0.0;
    if (!(in >> v)) fail(ErrorKind::invalid_argument, "ASCII grid header value missing for " + key);
    header[key] = v;
  }
  for (const char* k : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}) {
    if (!header.count(k)) fail(ErrorKind::invalid_argument, std::string("ASCII grid missing ") + k);
  }
  AsciiGrid g;
  g.grid.n_cols = static_cast<std::size_t>(header["ncols"]);
  g.grid.n_rows = static_cast<std::size_t>(header["nrows"]);
  g.grid.cell_size = header["cellsize"];
  g.grid.origin = {header["xllcorner"] - (corner_x ? 0.0 : g.grid.cell_size / 2.0),
                   header["yllcorner"] - (corner_y ? 0.0 : g.grid.cell_size / 2.0)};
  if (header.count("nodata_value")) g.nodata = header["nodata_value"];
  g.values.assign(g.grid.cells(), 0.0);
  for (std::size_t r = g.grid.n_rows; r-- > 0;) {
    for (std::size_t c = 0; c < g.grid.n_cols; ++c) {
      if (!(in >> g.values[r * g.grid.n_cols + c])) {
        fail(ErrorKind::invalid_argument, "ASCII grid has fewer values than ncols*nrows");
      }
    }
  }
  return g;
}

AsciiGrid read_ascii_grid(const std::filesystem::path& path) {
  return parse_ascii_grid(read_file(path));
}

}  // namespace geoflow
