#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geoflow/geomodel.hpp"

namespace geoflow {

inline constexpr std::size_t kDefaultHistoryCap = 3200;

struct MalformedLine {
  std::size_t line_number = 0;
  std::uint64_t byte_offset = 0;
  std::string reason;
};

struct LoadReport {
  std::size_t lines = 0;  // non-blank lines seen
  std::size_t records = 0;
  std::vector<MalformedLine> malformed;
};

/// Parses one NDJSON record line. Throws invalid_argument / invalid_geometry
/// describing what is wrong with the line.
GeoRecord parse_record_line(std::string_view line);
std::string record_to_json_line(const GeoRecord& record);

/// Streams records out of NDJSON text. Malformed lines (bad JSON, missing or
/// mistyped fields, invalid geometry, duplicate record_id) are skipped and
/// listed in the report. A failing stream raises an io error carrying the
/// byte offset where reading stopped.
void for_each_record(std::istream& in, LoadReport& report,
                     const std::function<void(GeoRecord&&)>& sink);

/// In-memory record store: stream order is preserved, per-user lookups are
/// indexed newest first.
class RecordStore {
 public:
  RecordStore() = default;
  /// Throws invalid_argument on duplicate record ids or invalid records.
  explicit RecordStore(std::vector<GeoRecord> records);

  static RecordStore load(const std::filesystem::path& path, LoadReport* report = nullptr);
  static RecordStore read(std::istream& in, LoadReport* report = nullptr);

  std::span<const GeoRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool has_user(std::string_view user_id) const;
  std::size_t user_count() const { return by_user_.size(); }

  /// Records of one user, timestamp descending (ties by record_id).
  std::vector<const GeoRecord*> user_records(std::string_view user_id) const;

  std::string to_ndjson() const;

 private:
  void index();

  std::vector<GeoRecord> records_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_user_;
};

struct FilterSpec {
  std::vector<std::string> keywords;
  std::int64_t start_utc = 0;
  std::int64_t end_utc = 0;  // exclusive
  std::optional<Region> bounding_region;

  /// Checks invariants and lowercases keywords.
  void normalize();
};

bool matches_keywords(std::string_view text, std::span<const std::string> lowercase_keywords);

/// Records in [start, end) whose text contains a keyword and, when a bounding
/// region is set, whose representative point lies inside it. Order preserved.
std::vector<GeoRecord> filter_event_records(std::span<const GeoRecord> records, FilterSpec spec,
                                            const Projection& proj);

/// Distinct authors with at least one record whose representative point lies
/// in the corridor.
std::set<std::string> select_event_users(std::span<const GeoRecord> records,
                                         const ProjectedRegion& corridor, const Projection& proj);

/// Up to `cap` most recent records of a user, newest first. Unknown users
/// yield an empty list.
std::vector<GeoRecord> fetch_history(const RecordStore& store, std::string_view user_id,
                                     std::size_t cap = kDefaultHistoryCap);

struct HistoryStats {
  std::string user_id;
  std::size_t n_total = 0;
  std::size_t n_place = 0;
  std::size_t n_coordinate = 0;
  double ratio_place = 0.0;
  double ratio_coordinate = 0.0;
};

/// One summary row (max, min, median or mean) over the per-user columns.
struct HistoryAggregate {
  std::string label;
  double n_total = 0.0;
  double n_place = 0.0;
  double n_coordinate = 0.0;
  double ratio_place = 0.0;
  double ratio_coordinate = 0.0;
};

struct HistoryReport {
  std::vector<HistoryStats> users;         // sorted by user_id
  std::vector<HistoryAggregate> aggregate; // max, min, median, mean; empty without users
};

using HistoryMap = std::map<std::string, std::vector<GeoRecord>>;

HistoryStats classify_history(std::string_view user_id, std::span<const GeoRecord> history);
HistoryReport history_stats(const HistoryMap& histories);

double median(std::vector<double> values);

}  // namespace geoflow
