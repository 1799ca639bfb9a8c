#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geoflow/geomodel.hpp"
#include "geoflow/inference.hpp"

namespace geoflow {

struct FlowRow {
  std::string origin;
  std::size_t raw_count = 0;
  double weight = 0.0;  // raw_count / origin population
  double share = 0.0;   // weight / sum of weights
  std::size_t rank = 0; // dense rank by share, 1 = largest
};

struct FlowTable {
  std::string destination;
  std::vector<FlowRow> rows;  // share descending, ties by origin id
  std::size_t total_users = 0;   // every estimate passed in
  std::size_t undetermined = 0;  // estimates without a home region
  std::vector<std::string> excluded_origins;  // origins without a positive population
  std::size_t excluded_users = 0;

  const FlowRow* find(const std::string& origin) const;
  /// Fraction of users that ended up in a share.
  double coverage() const;
};

/// Per-capita calibrated origin shares from raw per-origin user counts.
/// Throws empty_table when no origin has a positive weight.
FlowTable flow_table_from_counts(std::string destination,
                                 const std::map<std::string, std::size_t>& counts,
                                 std::span<const Region> populations);

/// Groups determined home estimates of users observed at the destination.
FlowTable build_flow_table(std::span<const HomeEstimate> estimates, std::string destination,
                           std::span<const Region> populations);

struct FlowComparisonRow {
  std::string origin;
  double share_baseline = 0.0;
  double share_event = 0.0;
  double share_delta = 0.0;  // event - baseline
  std::size_t rank_baseline = 0;
  std::size_t rank_event = 0;
};

struct FlowComparison {
  std::string destination;
  std::vector<FlowComparisonRow> rows;  // event share descending
};

/// Aligns origins (missing = share 0), dense-ranks both sides over the union
/// and keeps the event top_k plus anything in the baseline top_k.
FlowComparison compare_flows(const FlowTable& baseline, const FlowTable& event,
                             std::size_t top_k);

std::string flows_to_csv(std::span<const FlowTable> tables);
std::vector<FlowTable> flows_from_csv(const std::filesystem::path& path);
std::string comparison_to_csv(std::span<const FlowComparison> comparisons);

}  // namespace geoflow
