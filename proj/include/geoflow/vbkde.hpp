#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "geoflow/geomodel.hpp"

namespace geoflow {

inline constexpr double kDefaultAlpha = 80.0;          // m^2
inline constexpr double kDefaultBandwidthFloor = 100.0;  // m
inline constexpr std::size_t kDefaultMaxGridDim = 2048;

/// Raster layout. Row 0 is the southernmost row; values are evaluated at
/// cell centers.
struct GridSpec {
  PlanarPoint origin;  // lower-left corner
  double cell_size = 1.0;
  std::size_t n_rows = 1;
  std::size_t n_cols = 1;

  std::size_t cells() const { return n_rows * n_cols; }
  PlanarPoint cell_center(std::size_t row, std::size_t col) const {
    return {origin.x + (static_cast<double>(col) + 0.5) * cell_size,
            origin.y + (static_cast<double>(row) + 0.5) * cell_size};
  }
  BoundingBox extent() const {
    return {origin.x, origin.y, origin.x + static_cast<double>(n_cols) * cell_size,
            origin.y + static_cast<double>(n_rows) * cell_size};
  }

  /// Throws invalid_argument for a bad layout and resource_limit when the
  /// grid exceeds `max_cells`.
  void validate(std::size_t max_cells) const;
};

struct KernelSite {
  PlanarPoint center;
  double bandwidth = 0.0;
};

enum class BandwidthMode { variable, fixed };

struct SurfaceOptions {
  double alpha = kDefaultAlpha;
  double bandwidth_floor = kDefaultBandwidthFloor;
  BandwidthMode mode = BandwidthMode::variable;
  std::optional<GridSpec> grid;  // auto-sized when absent
  std::size_t max_grid_dim = kDefaultMaxGridDim;
  std::size_t max_cells = kDefaultMaxGridDim * kDefaultMaxGridDim;
  bool normalize = true;
  unsigned threads = 1;
};

struct ActivitySurface {
  GridSpec grid;
  std::vector<double> values;  // row-major, row 0 south
  bool normalized = false;
  std::size_t record_count = 0;    // records that contributed a kernel
  std::size_t skipped_records = 0; // records with unusable geometry
  double base_bandwidth = 0.0;

  double at(std::size_t row, std::size_t col) const { return values[row * grid.n_cols + col]; }
  double max_value() const;
  /// Sum of value * cell area.
  double total_mass() const;
};

/// Two-dimensional rule-of-thumb bandwidth:
/// max(floor, 0.9 * min(SD, sqrt(1/ln 2) * D_m) * n^-0.2), with SD the
/// standard distance and D_m the median distance to the mean center.
double base_bandwidth(std::span<const PlanarPoint> points,
                      double floor = kDefaultBandwidthFloor);

/// sqrt((area + alpha) / alpha) * bw_s.
double bandwidth_for_area(double area_m2, double bw_s, double alpha = kDefaultAlpha);

/// Coordinates keep bw_s; places widen with their boundary area.
double record_bandwidth(const GeoRecord& record, double bw_s, double alpha = kDefaultAlpha);

/// Quartic (biweight) kernel density at squared distance d2 for bandwidth h.
inline double quartic_kernel(double d2, double h) {
  const double h2 = h * h;
  if (!(d2 < h2)) return 0.0;
  const double u = 1.0 - d2 / h2;
  return 3.0 / (3.14159265358979323846 * h2) * u * u;
}

struct KernelSet {
  std::vector<KernelSite> sites;
  double base_bandwidth = 0.0;
  std::size_t skipped = 0;
};

/// Kernel centers and bandwidths for a user's records. Records whose place
/// geometry cannot be measured are skipped and counted.
KernelSet kernel_sites(std::span<const GeoRecord> records, const Projection& proj,
                       const SurfaceOptions& options);

/// Bounding box of the centers buffered by the widest bandwidth; cell size
/// is a quarter of the narrowest bandwidth unless the extent forces coarser
/// cells to stay within max_dim per side.
GridSpec auto_grid(std::span<const KernelSite> sites, std::size_t max_dim = kDefaultMaxGridDim);

/// Sums weight * quartic kernels at every cell center. Rows are processed in
/// bands across threads; each cell accumulates sites in input order, so the
/// result does not depend on the thread count.
std::vector<double> accumulate_kernels(std::span<const KernelSite> sites, const GridSpec& grid,
                                       double weight, unsigned threads = 1);

ActivitySurface build_surface(std::span<const GeoRecord> records, const Projection& proj,
                              const SurfaceOptions& options = {});

/// Scales values so that the total mass is one. Throws data error for a
/// surface with no mass.
void normalize_surface(ActivitySurface& surface);

}  // namespace geoflow
