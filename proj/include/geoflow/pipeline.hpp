#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "geoflow/flows.hpp"
#include "geoflow/geomodel.hpp"
#include "geoflow/inference.hpp"
#include "geoflow/ingest.hpp"
#include "geoflow/stats.hpp"
#include "geoflow/text_io.hpp"
#include "geoflow/vbkde.hpp"

namespace geoflow {

struct PipelineConfig {
  std::filesystem::path records;
  std::filesystem::path regions;
  std::filesystem::path corridor;
  std::filesystem::path gazetteer;       // optional alias CSV
  std::filesystem::path profiles;        // optional user_id,profile_text CSV
  std::filesystem::path baseline_flows;  // optional flows.csv of a reference period
  std::filesystem::path out_dir = "out";

  std::vector<std::string> keywords{"eclipse", "totality"};
  std::int64_t start_utc = 0;
  std::int64_t end_utc = 0;  // exclusive
  std::optional<std::int64_t> temporal_first_day;
  std::optional<std::int64_t> temporal_last_day;

  double alpha = kDefaultAlpha;
  double bandwidth_floor = kDefaultBandwidthFloor;
  std::size_t min_evidence = kDefaultMinEvidence;
  std::size_t history_cap = kDefaultHistoryCap;
  std::size_t grid_max_dim = 256;
  std::size_t max_cells = kDefaultMaxGridDim * kDefaultMaxGridDim;
  PlaceScale hotspot_max_scale = PlaceScale::admin;
  bool hotspot_rate = true;
  std::vector<std::string> destinations;  // empty: every corridor region with event users
  std::size_t top_k = 10;
  std::optional<LatLon> projection_origin;
  unsigned threads = 1;
  std::uint64_t seed = 42;

  /// Reads documented keys; unknown keys are a config error. Relative paths
  /// resolve against the config file's directory.
  static PipelineConfig from_values(const KeyValueConfig& values);
  static PipelineConfig load(const std::filesystem::path& path,
                             const std::map<std::string, std::string>& overrides = {});

  /// Referenced files exist and numbers are in range; throws config errors.
  void validate() const;
  std::vector<std::pair<std::string, std::string>> parameters() const;
};

/// Documented configuration keys, in manifest order.
const std::vector<std::string>& pipeline_config_keys();

enum class Stage {
  filter,
  users,
  histories,
  stats,
  homes,
  hotspots,
  temporal,
  flows,
  compare,
  profiles,
};

std::string_view to_string(Stage stage);

struct StageCount {
  std::string stage;
  std::vector<std::pair<std::string, std::int64_t>> counts;
};

struct PipelineResult {
  std::vector<GeoRecord> event_records;
  std::vector<std::string> event_users;  // sorted
  HistoryMap histories;
  HistoryReport history_report;
  std::vector<HomeEstimate> estimates;  // event_users order
  std::optional<HotspotResult> hotspots;
  std::optional<TemporalHistogram> histogram;
  std::vector<FlowTable> flows;
  std::vector<std::string> empty_destinations;
  std::vector<FlowComparison> comparisons;
  std::vector<ProfileMatch> profile_matches;
  std::optional<double> profile_agreement;
  std::vector<StageCount> counts;
  std::vector<std::string> written;  // artifact file names, in write order
};

using ProgressSink = std::function<void(const std::string&)>;

/// Runs the requested stages plus whatever they depend on, writing each
/// artifact into out_dir as soon as its stage finishes. A failing stage
/// raises an Error whose message starts with the stage name; artifacts of
/// completed stages and a manifest naming the failed stage are kept.
PipelineResult run_pipeline(const PipelineConfig& config, const std::set<Stage>& targets,
                            const ProgressSink& progress = {});

std::set<Stage> all_stages();

/// Projection used by the pipeline: the configured origin, else the center
/// of the region set's bounding box.
Projection pipeline_projection(const PipelineConfig& config, std::span<const Region> regions);

/// One grid covering the projected region set, at most max_dim cells per side.
GridSpec region_grid(std::span<const ProjectedRegion> regions, std::size_t max_dim);

}  // namespace geoflow
