#include "geoflow/vbkde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoflow/error.hpp"
#include "geoflow/ingest.hpp"
#include "geoflow/parallel.hpp"

namespace geoflow {

void GridSpec::validate(std::size_t max_cells) const {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    fail(ErrorKind::invalid_argument, "grid cell_size must be positive");
  }
  if (n_rows == 0 || n_cols == 0) fail(ErrorKind::invalid_argument, "grid must have rows and columns");
  if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    fail(ErrorKind::invalid_argument, "grid origin must be finite");
  }
  if (n_rows > max_cells / n_cols) {
    fail(ErrorKind::resource_limit, "grid of " + std::to_string(n_rows) + "x" +
                                        std::to_string(n_cols) + " cells exceeds the cap of " +
                                        std::to_string(max_cells));
  }
}

double ActivitySurface::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double ActivitySurface::total_mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.cell_size * grid.cell_size;
}

double base_bandwidth(std::span<const PlanarPoint> points, double floor) {
  if (points.empty()) fail(ErrorKind::invalid_argument, "base bandwidth needs at least one point");
  const auto n = static_cast<double>(points.size());
  PlanarPoint mean;
  for (const auto& p : points) {
    mean.x += p.x;
    mean.y += p.y;
  }
  mean.x /= n;
  mean.y /= n;

  std::vector<double> dist;
  dist.reserve(points.size());
  double sum_sq = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - mean.x;
    const double dy = p.y - mean.y;
    sum_sq += dx * dx + dy * dy;
    dist.push_back(std::sqrt(dx * dx + dy * dy));
  }
  const double standard_distance = std::sqrt(sum_sq / n);
  const double median_distance = median(std::move(dist));
  const double spread =
      std::min(standard_distance, std::sqrt(1.0 / std::numbers::ln2) * median_distance);
  const double bw = 0.9 * spread * std::pow(n, -0.2);
  return std::max(floor, bw);
}

double bandwidth_for_area(double area_m2, double bw_s, double alpha) {
  if (!(bw_s > 0.0)) fail(ErrorKind::invalid_argument, "base bandwidth must be positive");
  if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "alpha must be positive");
  if (!(area_m2 >= 0.0)) fail(ErrorKind::invalid_argument, "place area must be non-negative");
  return std::sqrt((area_m2 + alpha) / alpha) * bw_s;
}

double record_bandwidth(const GeoRecord& record, double bw_s, double alpha) {
  const auto* place = std::get_if<Place>(&record.georef);
  return bandwidth_for_area(place ? place_area_m2(*place) : 0.0, bw_s, alpha);
}

KernelSet kernel_sites(std::span<const GeoRecord> records, const Projection& proj,
                       const SurfaceOptions& options) {
  KernelSet set;
  std::vector<PlanarPoint> centers;
  std::vector<double> areas;
  for (const auto& r : records) {
    try {
      const auto* place = std::get_if<Place>(&r.georef);
      const double area = place ? place_area_m2(*place) : 0.0;
      centers.push_back(representative_point(r.georef, proj));
      areas.push_back(area);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::invalid_geometry) throw;
      ++set.skipped;
    }
  }
  if (centers.empty()) fail(ErrorKind::invalid_argument, "no record with a usable georeference");

  set.base_bandwidth = base_bandwidth(centers, options.bandwidth_floor);
  set.sites.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double h = options.mode == BandwidthMode::variable
                         ? bandwidth_for_area(areas[i], set.base_bandwidth, options.alpha)
                         : set.base_bandwidth;
    set.sites.push_back({centers[i], h});
  }
  return set;
}

GridSpec auto_grid(std::span<const KernelSite> sites, std::size_t max_dim) {
  if (sites.empty()) fail(ErrorKind::invalid_argument, "auto grid needs at least one kernel");
  if (max_dim == 0) fail(ErrorKind::invalid_argument, "max grid dimension must be positive");
  double min_h = sites.front().bandwidth;
  double max_h = min_h;
  BoundingBox box{sites.front().center.x, sites.front().center.y, sites.front().center.x,
                  sites.front().center.y};
  for (const auto& s : sites) {
    min_h = std::min(min_h, s.bandwidth);
    max_h = std::max(max_h, s.bandwidth);
    box.expand({s.center.x, s.center.y, s.center.x, s.center.y});
  }
  box = {box.min_x - max_h, box.min_y - max_h, box.max_x + max_h, box.max_y + max_h};

  const double longest = std::max(box.width(), box.height());
  const double cell = std::max(min_h / 4.0, longest / static_cast<double>(max_dim));
  auto cells_along = [&](double length) {
    const double n = std::ceil(length / cell);
    return std::clamp<std::size_t>(static_cast<std::size_t>(n), 1, max_dim);
  };
  GridSpec grid;
  grid.origin = {box.min_x, box.min_y};
  grid.cell_size = cell;
  grid.n_cols = cells_along(box.width());
  grid.n_rows = cells_along(box.height());
  return grid;
}

namespace {

// Inclusive index range of cells whose centers may fall within [lo, hi].
std::pair<std::size_t, std::size_t> cell_span(double lo, double hi, double origin, double cell,
                                              std::size_t count, bool& empty) {
  const double first = std::floor((lo - origin) / cell - 0.5);
  const double last = std::ceil((hi - origin) / cell - 0.5);
  const double max_index = static_cast<double>(count) - 1.0;
  if (last < 0.0 || first > max_index) {
    empty = true;
    return {0, 0};
  }
  empty = false;
  return {static_cast<std::size_t>(std::max(first, 0.0)),
          static_cast<std::size_t>(std::min(last, max_index))};
}

}  // namespace

std::vector<double> accumulate_kernels(std::span<const KernelSite> sites, const GridSpec& grid,
                                       double weight, unsigned threads) {
  std::vector<double> values(grid.cells(), 0.0);
  parallel_chunks(grid.n_rows, threads, [&](std::size_t row_begin, std::size_t row_end) {
    for (const auto& site : sites) {
      const double h = site.bandwidth;
      bool empty = false;
      auto [r0, r1] = cell_span(site.center.y - h, site.center.y + h, grid.origin.y,
                                grid.cell_size, grid.n_rows, empty);
      if (empty) continue;
      r0 = std::max(r0, row_begin);
      if (row_end == 0 || r0 > row_end - 1) continue;
      r1 = std::min(r1, row_end - 1);
      if (r0 > r1) continue;
      const auto [c0, c1] = cell_span(site.center.x - h, site.center.x + h, grid.origin.x,
                                      grid.cell_size, grid.n_cols, empty);
      if (empty) continue;
      for (std::size_t r = r0; r <= r1; ++r) {
        double* row = values.data() + r * grid.n_cols;
        const double dy = grid.origin.y + (static_cast<double>(r) + 0.5) * grid.cell_size -
                          site.center.y;
        for (std::size_t c = c0; c <= c1; ++c) {
          const double dx = grid.origin.x + (static_cast<double>(c) + 0.5) * grid.cell_size -
                            site.center.x;
          row[c] += weight * quartic_kernel(dx * dx + dy * dy, h);
        }
      }
    }
  });
  return values;
}

void normalize_surface(ActivitySurface& surface) {
  const double mass = surface.total_mass();
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    fail(ErrorKind::data, "activity surface has no mass on its grid");
  }
  for (double& v : surface.values) v /= mass;
  surface.normalized = true;
}

ActivitySurface build_surface(std::span<const GeoRecord> records, const Projection& proj,
                              const SurfaceOptions& options) {
  const auto set = kernel_sites(records, proj, options);
  ActivitySurface surface;
  surface.grid = options.grid ? *options.grid : auto_grid(set.sites, options.max_grid_dim);
  surface.grid.validate(options.max_cells);
  surface.record_count = set.sites.size();
  surface.skipped_records = set.skipped;
  surface.base_bandwidth = set.base_bandwidth;
  surface.values = accumulate_kernels(set.sites, surface.grid,
                                      1.0 / static_cast<double>(set.sites.size()),
                                      options.threads);
  if (options.normalize) normalize_surface(surface);
  return surface;
}

}  // namespace geoflow
