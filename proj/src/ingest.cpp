#include "geoflow/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "geoflow/error.hpp"
#include "geoflow/text_io.hpp"

namespace geoflow {

namespace {

using nlohmann::json;

LatLonRing parse_position_ring(const json& coords) {
  if (!coords.is_array()) fail(ErrorKind::invalid_geometry, "ring must be an array");
  LatLonRing ring;
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() != 2 || !pos[0].is_number() || !pos[1].is_number()) {
      fail(ErrorKind::invalid_geometry, "ring position must be [lon, lat]");
    }
    ring.push_back({pos[1].get<double>(), pos[0].get<double>()});
  }
  return normalize_ring(std::move(ring));
}

// Accepts a single ring ([[lon,lat],...]) or a list of rings.
std::vector<LatLonRing> parse_boundary(const json& boundary) {
  if (!boundary.is_array() || boundary.empty()) {
    fail(ErrorKind::invalid_geometry, "place_boundary must be a non-empty array");
  }
  std::vector<LatLonRing> rings;
  const bool single_ring = boundary[0].is_array() && !boundary[0].empty() &&
                           boundary[0][0].is_number();
  if (single_ring) {
    rings.push_back(parse_position_ring(boundary));
  } else {
    for (const auto& ring : boundary) rings.push_back(parse_position_ring(ring));
  }
  return rings;
}

const json& require(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::invalid_argument, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) fail(ErrorKind::invalid_argument, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

GeoRecord parse_record_line(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::invalid_argument, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::invalid_argument, "record must be a JSON object");

  GeoRecord r;
  r.record_id = require_string(doc, "record_id");
  r.user_id = require_string(doc, "user_id");
  const auto& ts = require(doc, "timestamp_utc");
  if (!ts.is_number_integer()) fail(ErrorKind::invalid_argument, "timestamp_utc must be an integer");
  r.timestamp_utc = ts.get<std::int64_t>();
  r.text = require_string(doc, "text");

  const bool has_coord = doc.contains("lat") || doc.contains("lon");
  const bool has_place = doc.contains("place_scale") || doc.contains("place_boundary");
  if (has_coord == has_place) {
    fail(ErrorKind::invalid_argument, "record needs exactly one of {lat, lon} or {place_scale, place_boundary}");
  }
  if (has_coord) {
    const auto& lat = require(doc, "lat");
    const auto& lon = require(doc, "lon");
    if (!lat.is_number() || !lon.is_number()) fail(ErrorKind::invalid_argument, "lat/lon must be numbers");
    r.georef = LatLon{lat.get<double>(), lon.get<double>()};
  } else {
    const auto scale_text = require_string(doc, "place_scale");
    const auto scale = parse_place_scale(scale_text);
    if (!scale) fail(ErrorKind::invalid_argument, "unknown place_scale '" + scale_text + "'");
    r.georef = Place{*scale, parse_boundary(require(doc, "place_boundary"))};
  }
  validate_record(r);
  return r;
}

std::string record_to_json_line(const GeoRecord& record) {
  nlohmann::ordered_json doc;
  doc["record_id"] = record.record_id;
  doc["user_id"] = record.user_id;
  doc["timestamp_utc"] = record.timestamp_utc;
  doc["text"] = record.text;
  if (const auto* p = std::get_if<LatLon>(&record.georef)) {
    doc["lat"] = p->lat;
    doc["lon"] = p->lon;
  } else {
    const auto& place = std::get<Place>(record.georef);
    doc["place_scale"] = std::string(to_string(place.scale));
    auto rings = nlohmann::ordered_json::array();
    for (const auto& ring : place.boundary) {
      auto coords = nlohmann::ordered_json::array();
      for (const auto& v : ring) coords.push_back({v.lon, v.lat});
      rings.push_back(std::move(coords));
    }
    doc["place_boundary"] = std::move(rings);
  }
  return doc.dump();
}

void for_each_record(std::istream& in, LoadReport& report,
                     const std::function<void(GeoRecord&&)>& sink) {
  std::unordered_set<std::string> seen;
  std::string line;
  std::uint64_t offset = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    const auto line_offset = offset;
    offset += line.size() + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    ++report.lines;
    try {
      auto record = parse_record_line(line);
      if (!seen.insert(record.record_id).second) {
        fail(ErrorKind::invalid_argument, "duplicate record_id '" + record.record_id + "'");
      }
      ++report.records;
      sink(std::move(record));
    } catch (const Error& e) {
      report.malformed.push_back({line_no, line_offset, e.what()});
    }
  }
  if (in.bad()) {
    fail(ErrorKind::io, "record stream unreadable at byte offset " + std::to_string(offset));
  }
}

RecordStore::RecordStore(std::vector<GeoRecord> records) : records_(std::move(records)) {
  std::unordered_set<std::string_view> ids;
  for (const auto& r : records_) {
    validate_record(r);
    if (!ids.insert(r.record_id).second) {
      fail(ErrorKind::invalid_argument, "duplicate record_id '" + r.record_id + "'");
    }
  }
  index();
}

RecordStore RecordStore::read(std::istream& in, LoadReport* report) {
  LoadReport local;
  RecordStore store;
  for_each_record(in, report ? *report : local,
                  [&](GeoRecord&& r) { store.records_.push_back(std::move(r)); });
  store.index();
  return store;
}

RecordStore RecordStore::load(const std::filesystem::path& path, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open record store '" + path.string() + "'");
  try {
    return read(in, report);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void RecordStore::index() {
  by_user_.clear();
  for (std::size_t i = 0; i < records_.size(); ++i) by_user_[records_[i].user_id].push_back(i);
  for (auto& [user, idx] : by_user_) {
    std::sort(idx.begin(), idx.end(), [this](std::size_t a, std::size_t b) {
      const auto& ra = records_[a];
      const auto& rb = records_[b];
      if (ra.timestamp_utc != rb.timestamp_utc) return ra.timestamp_utc > rb.timestamp_utc;
      return ra.record_id < rb.record_id;
    });
  }
}

bool RecordStore::has_user(std::string_view user_id) const {
  return by_user_.count(std::string(user_id)) != 0;
}

std::vector<const GeoRecord*> RecordStore::user_records(std::string_view user_id) const {
  std::vector<const GeoRecord*> out;
  const auto it = by_user_.find(std::string(user_id));
  if (it == by_user_.end()) return out;
  out.reserve(it->second.size());
  for (auto i : it->second) out.push_back(&records_[i]);
  return out;
}

std::string RecordStore::to_ndjson() const {
  std::string out;
  for (const auto& r : records_) {
    out += record_to_json_line(r);
    out += '\n';
  }
  return out;
}

void FilterSpec::normalize() {
  if (keywords.empty()) fail(ErrorKind::invalid_argument, "filter needs at least one keyword");
  for (auto& k : keywords) {
    k = to_lower(k);
    if (k.empty()) fail(ErrorKind::invalid_argument, "empty filter keyword");
  }
  if (start_utc > end_utc) fail(ErrorKind::invalid_argument, "filter window start is after end");
}

bool matches_keywords(std::string_view text, std::span<const std::string> lowercase_keywords) {
  const auto lowered = to_lower(text);
  return std::any_of(lowercase_keywords.begin(), lowercase_keywords.end(),
                     [&](const std::string& k) { return lowered.find(k) != std::string::npos; });
}

std::vector<GeoRecord> filter_event_records(std::span<const GeoRecord> records, FilterSpec spec,
                                            const Projection& proj) {
  spec.normalize();
  std::optional<ProjectedRegion> bounds;
  if (spec.bounding_region) bounds = project_region(*spec.bounding_region, proj);
  std::vector<GeoRecord> out;
  for (const auto& r : records) {
    if (r.timestamp_utc < spec.start_utc || r.timestamp_utc >= spec.end_utc) continue;
    if (!matches_keywords(r.text, spec.keywords)) continue;
    if (bounds && !point_in_region(representative_point(r.georef, proj), *bounds)) continue;
    out.push_back(r);
  }
  return out;
}

std::set<std::string> select_event_users(std::span<const GeoRecord> records,
                                         const ProjectedRegion& corridor, const Projection& proj) {
  std::set<std::string> users;
  for (const auto& r : records) {
    if (users.count(r.user_id)) continue;
    if (point_in_region(representative_point(r.georef, proj), corridor)) users.insert(r.user_id);
  }
  return users;
}

std::vector<GeoRecord> fetch_history(const RecordStore& store, std::string_view user_id,
                                     std::size_t cap) {
  if (cap == 0) fail(ErrorKind::invalid_argument, "history cap must be at least 1");
  const auto all = store.user_records(user_id);
  std::vector<GeoRecord> out;
  const auto n = std::min(cap, all.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*all[i]);
  return out;
}

HistoryStats classify_history(std::string_view user_id, std::span<const GeoRecord> history) {
  HistoryStats s;
  s.user_id = std::string(user_id);
  s.n_total = history.size();
  for (const auto& r : history) {
    if (is_place(r.georef)) {
      ++s.n_place;
    } else {
      ++s.n_coordinate;
    }
  }
  if (s.n_total > 0) {
    s.ratio_place = static_cast<double>(s.n_place) / static_cast<double>(s.n_total);
    s.ratio_coordinate = static_cast<double>(s.n_coordinate) / static_cast<double>(s.n_total);
  }
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorKind::invalid_argument, "median of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

HistoryReport history_stats(const HistoryMap& histories) {
  HistoryReport report;
  for (const auto& [user, records] : histories) report.users.push_back(classify_history(user, records));
  if (report.users.empty()) return report;

  using Column = double HistoryAggregate::*;
  const std::array<std::pair<Column, std::function<double(const HistoryStats&)>>, 5> columns{{
      {&HistoryAggregate::n_total, [](const HistoryStats& s) { return double(s.n_total); }},
      {&HistoryAggregate::n_place, [](const HistoryStats& s) { return double(s.n_place); }},
      {&HistoryAggregate::n_coordinate, [](const HistoryStats& s) { return double(s.n_coordinate); }},
      {&HistoryAggregate::ratio_place, [](const HistoryStats& s) { return s.ratio_place; }},
      {&HistoryAggregate::ratio_coordinate, [](const HistoryStats& s) { return s.ratio_coordinate; }},
  }};

  HistoryAggregate max{"max"}, min{"min"}, med{"median"}, mean{"mean"};
  for (const auto& [member, get] : columns) {
    std::vector<double> v;
    v.reserve(report.users.size());
    for (const auto& s : report.users) v.push_back(get(s));
    max.*member = *std::max_element(v.begin(), v.end());
    min.*member = *std::min_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    mean.*member = sum / static_cast<double>(v.size());
    med.*member = median(std::move(v));
  }
  report.aggregate = {max, min, med, mean};
  return report;
}

}  // namespace geoflow
