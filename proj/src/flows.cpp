#include "geoflow/flows.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "geoflow/error.hpp"
#include "geoflow/text_io.hpp"

namespace geoflow {

namespace {

template <typename Row, typename Share>
void sort_and_rank(std::vector<Row>& rows, Share share, std::size_t Row::*rank) {
  std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
    if (share(a) != share(b)) return share(a) > share(b);
    return a.origin < b.origin;
  });
  std::size_t current = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 || share(rows[i]) != share(rows[i - 1])) ++current;
    rows[i].*rank = current;
  }
}

}  // namespace

const FlowRow* FlowTable::find(const std::string& origin) const {
  for (const auto& r : rows) {
    if (r.origin == origin) return &r;
  }
  return nullptr;
}

double FlowTable::coverage() const {
  if (total_users == 0) return 0.0;
  std::size_t used = 0;
  for (const auto& r : rows) used += r.raw_count;
  return static_cast<double>(used) / static_cast<double>(total_users);
}

FlowTable flow_table_from_counts(std::string destination,
                                 const std::map<std::string, std::size_t>& counts,
                                 std::span<const Region> populations) {
  FlowTable table;
  table.destination = std::move(destination);
  double total_weight = 0.0;
  for (const auto& [origin, count] : counts) {
    table.total_users += count;
    const auto* region = find_region(populations, origin);
    if (!region || region->population <= 0) {
      table.excluded_origins.push_back(origin);
      table.excluded_users += count;
      continue;
    }
    FlowRow row;
    row.origin = origin;
    row.raw_count = count;
    row.weight = static_cast<double>(count) / static_cast<double>(region->population);
    total_weight += row.weight;
    table.rows.push_back(std::move(row));
  }
  if (!(total_weight > 0.0)) {
    fail(ErrorKind::empty_table, "no calibrated visitors for destination '" + table.destination + "'");
  }
  for (auto& row : table.rows) row.share = row.weight / total_weight;
  sort_and_rank(table.rows, [](const FlowRow& r) { return r.share; }, &FlowRow::rank);
  return table;
}

FlowTable build_flow_table(std::span<const HomeEstimate> estimates, std::string destination,
                           std::span<const Region> populations) {
  std::map<std::string, std::size_t> counts;
  std::size_t undetermined = 0;
  for (const auto& e : estimates) {
    if (e.determined()) {
      ++counts[*e.region_id];
    } else {
      ++undetermined;
    }
  }
  auto table = flow_table_from_counts(std::move(destination), counts, populations);
  table.undetermined = undetermined;
  table.total_users += undetermined;
  return table;
}

FlowComparison compare_flows(const FlowTable& baseline, const FlowTable& event,
                             std::size_t top_k) {
  if (baseline.destination != event.destination) {
    fail(ErrorKind::invalid_argument, "cannot compare flows of '" + baseline.destination +
                                          "' and '" + event.destination + "'");
  }
  std::set<std::string> origins;
  for (const auto& r : baseline.rows) origins.insert(r.origin);
  for (const auto& r : event.rows) origins.insert(r.origin);

  std::vector<FlowComparisonRow> rows;
  for (const auto& o : origins) {
    FlowComparisonRow row;
    row.origin = o;
    if (const auto* b = baseline.find(o)) row.share_baseline = b->share;
    if (const auto* e = event.find(o)) row.share_event = e->share;
    row.share_delta = row.share_event - row.share_baseline;
    rows.push_back(std::move(row));
  }
  sort_and_rank(rows, [](const FlowComparisonRow& r) { return r.share_baseline; },
                &FlowComparisonRow::rank_baseline);
  std::set<std::string> keep;
  for (std::size_t i = 0; i < rows.size() && i < top_k; ++i) keep.insert(rows[i].origin);
  sort_and_rank(rows, [](const FlowComparisonRow& r) { return r.share_event; },
                &FlowComparisonRow::rank_event);
  for (std::size_t i = 0; i < rows.size() && i < top_k; ++i) keep.insert(rows[i].origin);

  FlowComparison out;
  out.destination = event.destination;
  for (auto& r : rows) {
    if (keep.count(r.origin)) out.rows.push_back(std::move(r));
  }
  return out;
}

std::string flows_to_csv(std::span<const FlowTable> tables) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"destination", "origin", "raw_count", "weight", "share", "rank"});
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      csv.row({t.destination, r.origin, std::to_string(r.raw_count), format_double(r.weight),
               format_double(r.share), std::to_string(r.rank)});
    }
  }
  return out.str();
}

std::vector<FlowTable> flows_from_csv(const std::filesystem::path& path) {
  const auto csv = read_csv(path);
  const auto dest = csv.column("destination");
  const auto origin = csv.column("origin");
  const auto raw = csv.column("raw_count");
  const auto weight = csv.column("weight");
  const auto share = csv.column("share");
  const auto rank = csv.column("rank");
  std::vector<FlowTable> tables;
  try {
    for (const auto& row : csv.rows) {
      if (tables.empty() || tables.back().destination != row[dest]) {
        tables.emplace_back();
        tables.back().destination = row[dest];
      }
      auto& t = tables.back();
      FlowRow r{row[origin], std::stoull(row[raw]), std::stod(row[weight]), std::stod(row[share]),
                std::stoull(row[rank])};
      t.total_users += r.raw_count;
      t.rows.push_back(std::move(r));
    }
  } catch (const std::logic_error&) {
    fail(ErrorKind::config, "malformed number in flow table '" + path.string() + "'");
  }
  return tables;
}

std::string comparison_to_csv(std::span<const FlowComparison> comparisons) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"destination", "origin", "share_baseline", "share_event", "share_delta",
           "rank_baseline", "rank_event"});
  for (const auto& c : comparisons) {
    for (const auto& r : c.rows) {
      csv.row({c.destination, r.origin, format_double(r.share_baseline),
               format_double(r.share_event), format_double(r.share_delta),
               std::to_string(r.rank_baseline), std::to_string(r.rank_event)});
    }
  }
  return out.str();
}

}  // namespace geoflow
