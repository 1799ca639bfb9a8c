#include "geoflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "geoflow/error.hpp"
#include "geoflow/geojson.hpp"
#include "geoflow/parallel.hpp"

namespace geoflow {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::vector<std::string> kKeys{
    "records",        "regions",           "corridor",          "gazetteer",
    "profiles",       "baseline_flows",    "out_dir",           "keywords",
    "start",          "end",               "temporal_first_day", "temporal_last_day",
    "alpha",          "bandwidth_floor",   "min_evidence",      "history_cap",
    "grid_max_dim",   "max_cells",         "hotspot_max_scale", "hotspot_mode",
    "destinations",   "top_k",             "projection_origin", "threads",
    "seed"};

std::int64_t parse_bound(const std::string& key, const std::string& text, bool end) {
  try {
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
      // Plain dates are whole days; an end date is inclusive.
      return (parse_date(text) + (end ? 1 : 0)) * 86400;
    }
    return parse_timestamp(text);
  } catch (const Error& e) {
    fail(ErrorKind::config, "key '" + key + "': " + e.what());
  }
}

std::optional<std::int64_t> parse_day(const KeyValueConfig& cfg, const std::string& key) {
  const auto v = cfg.get(key);
  if (!v || v->empty()) return std::nullopt;
  try {
    return parse_date(*v);
  } catch (const Error& e) {
    fail(ErrorKind::config, "key '" + key + "': " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& item : split(text, ',')) {
    const auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void require_file(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) fail(ErrorKind::config, "missing required key '" + what + "'");
  if (!std::filesystem::is_regular_file(path)) {
    fail(ErrorKind::config, what + " file not found: " + path.string());
  }
}

void optional_file(const std::filesystem::path& path, const std::string& what) {
  if (!path.empty() && !std::filesystem::is_regular_file(path)) {
    fail(ErrorKind::config, what + " file not found: " + path.string());
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

}  // namespace

const std::vector<std::string>& pipeline_config_keys() { return kKeys; }

PipelineConfig PipelineConfig::from_values(const KeyValueConfig& cfg) {
  for (const auto& [key, value] : cfg.values()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      fail(ErrorKind::config, "unknown config key '" + key + "'");
    }
  }
  PipelineConfig c;
  auto path = [&](const char* key) { return cfg.get_path(key).value_or(std::filesystem::path{}); };
  c.records = path("records");
  c.regions = path("regions");
  c.corridor = path("corridor");
  c.gazetteer = path("gazetteer");
  c.profiles = path("profiles");
  c.baseline_flows = path("baseline_flows");
  if (const auto out = cfg.get_path("out_dir")) c.out_dir = *out;

  if (const auto kw = cfg.get("keywords")) c.keywords = split_list(*kw);
  if (const auto start = cfg.get("start")) c.start_utc = parse_bound("start", *start, false);
  if (const auto end = cfg.get("end")) c.end_utc = parse_bound("end", *end, true);
  c.temporal_first_day = parse_day(cfg, "temporal_first_day");
  c.temporal_last_day = parse_day(cfg, "temporal_last_day");

  c.alpha = cfg.get_double("alpha", c.alpha);
  c.bandwidth_floor = cfg.get_double("bandwidth_floor", c.bandwidth_floor);
  auto count = [&](const char* key, std::size_t fallback) {
    const auto v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) fail(ErrorKind::config, std::string("key '") + key + "' must not be negative");
    return static_cast<std::size_t>(v);
  };
  c.min_evidence = count("min_evidence", c.min_evidence);
  c.history_cap = count("history_cap", c.history_cap);
  c.grid_max_dim = count("grid_max_dim", c.grid_max_dim);
  c.max_cells = count("max_cells", c.max_cells);
  c.top_k = count("top_k", c.top_k);
  c.threads = static_cast<unsigned>(count("threads", c.threads));
  c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<std::int64_t>(c.seed)));

  if (const auto s = cfg.get("hotspot_max_scale")) {
    const auto scale = parse_place_scale(*s);
    if (!scale) fail(ErrorKind::config, "unknown hotspot_max_scale '" + *s + "'");
    c.hotspot_max_scale = *scale;
  }
  if (const auto m = cfg.get("hotspot_mode")) {
    if (*m == "rate") {
      c.hotspot_rate = true;
    } else if (*m == "count") {
      c.hotspot_rate = false;
    } else {
      fail(ErrorKind::config, "hotspot_mode must be 'rate' or 'count'");
    }
  }
  if (const auto d = cfg.get("destinations")) c.destinations = split_list(*d);
  if (const auto o = cfg.get("projection_origin")) {
    const auto parts = split_list(*o);
    KeyValueConfig tmp;
    if (parts.size() != 2) fail(ErrorKind::config, "projection_origin expects 'lat,lon'");
    tmp.set("lat", parts[0]);
    tmp.set("lon", parts[1]);
    c.projection_origin = LatLon{tmp.get_double("lat", 0.0), tmp.get_double("lon", 0.0)};
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path,
                                    const std::map<std::string, std::string>& overrides) {
  auto cfg = KeyValueConfig::load(path);
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  return from_values(cfg);
}

void PipelineConfig::validate() const {
  require_file(records, "records");
  require_file(regions, "regions");
  require_file(corridor, "corridor");
  optional_file(gazetteer, "gazetteer");
  optional_file(profiles, "profiles");
  optional_file(baseline_flows, "baseline_flows");
  if (keywords.empty()) fail(ErrorKind::config, "keywords must not be empty");
  if (end_utc <= start_utc) fail(ErrorKind::config, "'start' and 'end' must give a non-empty window");
  if (temporal_first_day && temporal_last_day && *temporal_first_day > *temporal_last_day) {
    fail(ErrorKind::config, "temporal_first_day is after temporal_last_day");
  }
  if (!(alpha > 0.0)) fail(ErrorKind::config, "alpha must be positive");
  if (!(bandwidth_floor > 0.0)) fail(ErrorKind::config, "bandwidth_floor must be positive");
  if (history_cap == 0) fail(ErrorKind::config, "history_cap must be positive");
  if (grid_max_dim < 2 || grid_max_dim > 16384) {
    fail(ErrorKind::config, "grid_max_dim must lie in [2, 16384]");
  }
  if (max_cells == 0) fail(ErrorKind::config, "max_cells must be positive");
  if (top_k == 0) fail(ErrorKind::config, "top_k must be positive");
  if (threads == 0 || threads > 256) fail(ErrorKind::config, "threads must lie in [1, 256]");
  if (projection_origin) {
    try {
      validate_latlon(*projection_origin);
    } catch (const Error& e) {
      fail(ErrorKind::config, std::string("projection_origin: ") + e.what());
    }
  }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::parameters() const {
  std::vector<std::pair<std::string, std::string>> p{
      {"records", records.string()},
      {"regions", regions.string()},
      {"corridor", corridor.string()},
      {"gazetteer", gazetteer.string()},
      {"profiles", profiles.string()},
      {"baseline_flows", baseline_flows.string()},
      {"keywords", join(keywords)},
      {"start", format_timestamp(start_utc)},
      {"end", format_timestamp(end_utc)},
      {"temporal_first_day", temporal_first_day ? format_date(*temporal_first_day) : ""},
      {"temporal_last_day", temporal_last_day ? format_date(*temporal_last_day) : ""},
      {"alpha", format_double(alpha)},
      {"bandwidth_floor", format_double(bandwidth_floor)},
      {"min_evidence", std::to_string(min_evidence)},
      {"history_cap", std::to_string(history_cap)},
      {"grid_max_dim", std::to_string(grid_max_dim)},
      {"max_cells", std::to_string(max_cells)},
      {"hotspot_max_scale", std::string(to_string(hotspot_max_scale))},
      {"hotspot_mode", hotspot_rate ? "rate" : "count"},
      {"destinations", join(destinations)},
      {"top_k", std::to_string(top_k)},
      {"projection_origin", projection_origin ? format_double(projection_origin->lat) + "," +
                                                    format_double(projection_origin->lon)
                                              : ""},
      {"seed", std::to_string(seed)},
  };
  return p;
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::filter: return "filter";
    case Stage::users: return "select-users";
    case Stage::histories: return "fetch-histories";
    case Stage::stats: return "history-stats";
    case Stage::homes: return "infer-homes";
    case Stage::hotspots: return "hotspots";
    case Stage::temporal: return "temporal";
    case Stage::flows: return "flows";
    case Stage::compare: return "compare-flows";
    case Stage::profiles: return "validate-profiles";
  }
  return "?";
}

std::set<Stage> all_stages() {
  return {Stage::filter, Stage::users,    Stage::histories, Stage::stats,   Stage::homes,
          Stage::hotspots, Stage::temporal, Stage::flows,   Stage::compare, Stage::profiles};
}

Projection pipeline_projection(const PipelineConfig& config, std::span<const Region> regions) {
  if (config.projection_origin) return {config.projection_origin->lat, config.projection_origin->lon};
  double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
  for (const auto& r : regions) {
    for (const auto& ring : r.boundary) {
      for (const auto& p : ring) {
        min_lat = std::min(min_lat, p.lat);
        max_lat = std::max(max_lat, p.lat);
        min_lon = std::min(min_lon, p.lon);
        max_lon = std::max(max_lon, p.lon);
      }
    }
  }
  if (min_lat > max_lat) return {};
  return {(min_lat + max_lat) / 2.0, (min_lon + max_lon) / 2.0};
}

GridSpec region_grid(std::span<const ProjectedRegion> regions, std::size_t max_dim) {
  if (regions.empty()) fail(ErrorKind::invalid_argument, "region set is empty");
  if (max_dim == 0) fail(ErrorKind::invalid_argument, "grid dimension must be positive");
  BoundingBox box = regions.front().bbox;
  for (const auto& r : regions) box.expand(r.bbox);
  const double extent = std::max(box.width(), box.height());
  GridSpec g;
  g.origin = {box.min_x, box.min_y};
  g.cell_size = extent / static_cast<double>(max_dim);
  g.n_cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(box.width() / g.cell_size - 1e-9)));
  g.n_rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(box.height() / g.cell_size - 1e-9)));
  return g;
}

namespace {

class Runner {
 public:
  Runner(const PipelineConfig& config, const ProgressSink& progress)
      : cfg_(config), progress_(progress) {}

  template <typename Body>
  void stage(Stage s, Body&& body) {
    current_ = s;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      failure_ = std::string(e.what());
      finish(false);
      throw Error(e.kind(), std::string(to_string(s)) + ": " + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    timings_.emplace_back(std::string(to_string(s)),
                          std::chrono::duration<double>(t1 - t0).count());
  }

  void count(std::string key, std::int64_t value) {
    const std::string name(to_string(current_));
    if (result.counts.empty() || result.counts.back().stage != name) result.counts.push_back({name, {}});
    result.counts.back().counts.emplace_back(std::move(key), value);
    if (progress_) progress_("[" + name + "] " + result.counts.back().counts.back().first + " = " +
                             std::to_string(value));
  }

  void write(const std::string& name, std::string_view content) {
    write_file(cfg_.out_dir / name, content);
    result.written.push_back(name);
  }

  void finish(bool ok) {
    ordered_json m;
    m["tool"] = "geoflow";
    m["status"] = ok ? "ok" : "failed";
    if (!ok) {
      m["failed_stage"] = std::string(to_string(current_));
      m["error"] = failure_;
    }
    m["seed"] = cfg_.seed;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : cfg_.parameters()) params[k] = v;
    m["parameters"] = params;
    ordered_json stages = ordered_json::array();
    for (const auto& sc : result.counts) {
      ordered_json counts = ordered_json::object();
      for (const auto& [k, v] : sc.counts) counts[k] = v;
      stages.push_back({{"stage", sc.stage}, {"counts", counts}});
    }
    m["stages"] = stages;
    m["artifacts"] = result.written;
    write_file(cfg_.out_dir / "manifest.json", m.dump(2) + "\n");

    ordered_json t;
    t["threads"] = cfg_.threads;
    ordered_json st = ordered_json::array();
    double total = 0.0;
    for (const auto& [name, secs] : timings_) {
      st.push_back({{"stage", name}, {"seconds", secs}});
      total += secs;
    }
    t["stages"] = st;
    t["total_seconds"] = total;
    write_file(cfg_.out_dir / "run_timings.json", t.dump(2) + "\n");
  }

  PipelineResult result;

 private:
  const PipelineConfig& cfg_;
  const ProgressSink& progress_;
  Stage current_ = Stage::filter;
  std::string failure_;
  std::vector<std::pair<std::string, double>> timings_;
};

std::set<Stage> with_dependencies(std::set<Stage> targets, const PipelineConfig& cfg) {
  const bool full = targets == all_stages();
  if (targets.count(Stage::compare) && cfg.baseline_flows.empty()) {
    if (!full) fail(ErrorKind::config, "compare-flows needs 'baseline_flows'");
    targets.erase(Stage::compare);
  }
  if (targets.count(Stage::profiles) && cfg.profiles.empty()) {
    if (!full) fail(ErrorKind::config, "validate-profiles needs 'profiles'");
    targets.erase(Stage::profiles);
  }
  if (targets.count(Stage::compare)) targets.insert(Stage::flows);
  if (targets.count(Stage::flows) || targets.count(Stage::profiles)) targets.insert(Stage::homes);
  if (targets.count(Stage::homes) || targets.count(Stage::stats)) targets.insert(Stage::histories);
  if (targets.count(Stage::histories)) targets.insert(Stage::users);
  targets.insert(Stage::filter);
  return targets;
}

std::vector<std::pair<std::string, std::string>> load_profiles(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto user = table.column("user_id");
  const auto text = table.column("profile_text");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& row : table.rows) out.emplace_back(row[user], row[text]);
  return out;
}

std::string history_stats_csv(const HistoryReport& report) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"user_id", "n_total", "n_place", "n_coordinate", "ratio_place", "ratio_coordinate"});
  for (const auto& u : report.users) {
    csv.row({u.user_id, std::to_string(u.n_total), std::to_string(u.n_place),
             std::to_string(u.n_coordinate), format_double(u.ratio_place),
             format_double(u.ratio_coordinate)});
  }
  for (const auto& a : report.aggregate) {
    csv.row({"(" + a.label + ")", format_double(a.n_total), format_double(a.n_place),
             format_double(a.n_coordinate), format_double(a.ratio_place),
             format_double(a.ratio_coordinate)});
  }
  return out.str();
}

std::string profiles_csv(std::span<const ProfileMatch> matches,
                         std::span<const HomeEstimate> estimates) {
  std::map<std::string_view, const HomeEstimate*> by_user;
  for (const auto& e : estimates) by_user[e.user_id] = &e;
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"user_id", "profile_text", "profile_region_id", "estimated_region_id", "agrees"});
  for (const auto& m : matches) {
    const auto it = by_user.find(m.user_id);
    const std::string est = it == by_user.end() ? "" : it->second->region_label();
    const std::string agrees =
        m.agrees_with_estimate ? (*m.agrees_with_estimate ? "1" : "0") : "";
    csv.row({m.user_id, m.profile_text, m.matched_region_id.value_or(""), est, agrees});
  }
  return out.str();
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const std::set<Stage>& requested,
                            const ProgressSink& progress) {
  config.validate();
  const auto targets = with_dependencies(requested, config);
  std::filesystem::create_directories(config.out_dir);
  Runner run(config, progress);
  auto& res = run.result;

  RecordStore store;
  std::vector<Region> regions;
  std::optional<ProjectedRegion> corridor;
  std::vector<ProjectedRegion> zones;
  Projection proj;
  LoadReport report;

  run.stage(Stage::filter, [&] {
    regions = load_regions_geojson(config.regions);
    auto corridor_features = load_regions_geojson(config.corridor);
    if (corridor_features.empty()) fail(ErrorKind::config, "corridor file has no feature");
    proj = pipeline_projection(config, regions);
    zones = project_regions(regions, proj);
    corridor = project_region(corridor_features.front(), proj);
    store = RecordStore::load(config.records, &report);
    run.count("lines", static_cast<std::int64_t>(report.lines));
    run.count("records", static_cast<std::int64_t>(report.records));
    run.count("malformed_lines", static_cast<std::int64_t>(report.malformed.size()));

    FilterSpec spec;
    spec.keywords = config.keywords;
    spec.start_utc = config.start_utc;
    spec.end_utc = config.end_utc;
    res.event_records = filter_event_records(store.records(), spec, proj);
    run.count("event_records", static_cast<std::int64_t>(res.event_records.size()));
    std::string nd;
    for (const auto& r : res.event_records) nd += record_to_json_line(r) + "\n";
    run.write("event_records.ndjson", nd);
  });

  if (targets.count(Stage::users)) {
    run.stage(Stage::users, [&] {
      const auto users = select_event_users(res.event_records, *corridor, proj);
      if (users.empty()) fail(ErrorKind::data, "no event users inside the corridor");
      res.event_users.assign(users.begin(), users.end());
      run.count("event_users", static_cast<std::int64_t>(users.size()));
      std::map<std::string, std::size_t> inside;
      for (const auto& r : res.event_records) {
        if (point_in_region(representative_point(r.georef, proj), *corridor)) ++inside[r.user_id];
      }
      std::ostringstream out;
      CsvWriter csv(out);
      csv.row({"user_id", "corridor_records"});
      for (const auto& u : res.event_users) csv.row({u, std::to_string(inside[u])});
      run.write("event_users.csv", out.str());
    });
  }

  if (targets.count(Stage::histories)) {
    run.stage(Stage::histories, [&] {
      std::size_t empty = 0, total = 0;
      std::string nd;
      for (const auto& u : res.event_users) {
        auto h = fetch_history(store, u, config.history_cap);
        if (h.empty()) {
          ++empty;
        } else {
          total += h.size();
          for (const auto& r : h) nd += record_to_json_line(r) + "\n";
        }
        res.histories.emplace(u, std::move(h));
      }
      run.count("users_with_history", static_cast<std::int64_t>(res.event_users.size() - empty));
      run.count("users_without_history", static_cast<std::int64_t>(empty));
      run.count("history_records", static_cast<std::int64_t>(total));
      run.write("histories.ndjson", nd);
    });
  }

  if (targets.count(Stage::stats)) {
    run.stage(Stage::stats, [&] {
      res.history_report = history_stats(res.histories);
      run.count("users", static_cast<std::int64_t>(res.history_report.users.size()));
      run.write("history_stats.csv", history_stats_csv(res.history_report));
    });
  }

  if (targets.count(Stage::homes)) {
    run.stage(Stage::homes, [&] {
      SurfaceOptions opts;
      opts.alpha = config.alpha;
      opts.bandwidth_floor = config.bandwidth_floor;
      opts.grid = region_grid(zones, config.grid_max_dim);
      opts.grid->validate(config.max_cells);
      opts.max_cells = config.max_cells;
      opts.normalize = false;
      opts.threads = 1;
      const ZoneIndex index(*opts.grid, zones);
      run.count("grid_rows", static_cast<std::int64_t>(opts.grid->n_rows));
      run.count("grid_cols", static_cast<std::int64_t>(opts.grid->n_cols));

      res.estimates.resize(res.event_users.size());
      parallel_for(res.event_users.size(), config.threads, [&](std::size_t i) {
        const auto& user = res.event_users[i];
        const auto& history = res.histories.at(user);
        HomeEstimate est;
        est.user_id = user;
        est.evidence_count = history.size();
        try {
          auto surface = build_surface(history, proj, opts);
          if (surface.total_mass() > 0.0) {
            normalize_surface(surface);
            est = infer_home(surface, index, user, config.min_evidence);
          }
        } catch (const Error& e) {
          // Histories without any usable geometry simply stay undetermined.
          if (e.kind() != ErrorKind::invalid_argument && e.kind() != ErrorKind::invalid_geometry) throw;
        }
        res.estimates[i] = std::move(est);
      });
      const auto determined = std::count_if(res.estimates.begin(), res.estimates.end(),
                                            [](const HomeEstimate& e) { return e.determined(); });
      run.count("surfaces", static_cast<std::int64_t>(res.estimates.size()));
      run.count("determined", determined);
      run.count("undetermined", static_cast<std::int64_t>(res.estimates.size()) - determined);
      run.write("homes.csv", estimates_to_csv(res.estimates));
    });
  }

  if (targets.count(Stage::hotspots)) {
    run.stage(Stage::hotspots, [&] {
      const auto counts = count_by_zone(res.event_records, zones, proj, config.hotspot_max_scale,
                                        config.threads);
      const auto adj = contiguity(regions);
      res.hotspots = gi_star(counts, adj, config.hotspot_rate);
      run.count("zones", static_cast<std::int64_t>(res.hotspots->rows.size()));
      run.count("excluded_zones", static_cast<std::int64_t>(res.hotspots->excluded.size()));
      run.count("excluded_coarse_records", static_cast<std::int64_t>(counts.excluded_coarse));
      run.count("residual_records", static_cast<std::int64_t>(counts.residual));
      run.write("hotspots.csv", hotspots_to_csv(*res.hotspots));
    });
  }

  if (targets.count(Stage::temporal)) {
    run.stage(Stage::temporal, [&] {
      const auto first = config.temporal_first_day.value_or(floor_div(config.start_utc, 86400));
      const auto last = config.temporal_last_day.value_or(floor_div(config.end_utc - 1, 86400));
      res.histogram = temporal_histogram(res.event_records, *corridor, zones, proj, first, last);
      std::size_t inside = 0;
      for (const auto& b : res.histogram->bins) inside += b[0];
      run.count("binned_records", static_cast<std::int64_t>(res.histogram->total()));
      run.count("inside_corridor", static_cast<std::int64_t>(inside));
      run.count("outside_range", static_cast<std::int64_t>(res.histogram->outside_range));
      run.count("fallback_offsets", static_cast<std::int64_t>(res.histogram->fallback_offsets));
      run.write("temporal.csv", histogram_to_csv(*res.histogram));
    });
  }

  if (targets.count(Stage::flows)) {
    run.stage(Stage::flows, [&] {
      std::map<std::string, std::set<std::string>> visitors;
      for (const auto& r : res.event_records) {
        const auto p = representative_point(r.georef, proj);
        if (!point_in_region(p, *corridor)) continue;
        if (const auto z = locate(p, zones)) visitors[zones[*z].id()].insert(r.user_id);
      }
      std::vector<std::string> dests = config.destinations;
      if (dests.empty()) {
        for (const auto& [d, users] : visitors) dests.push_back(d);
      }
      std::map<std::string, std::size_t> index;
      for (std::size_t i = 0; i < res.event_users.size(); ++i) index[res.event_users[i]] = i;
      for (const auto& d : dests) {
        if (!find_region(regions, d)) fail(ErrorKind::config, "unknown destination '" + d + "'");
        std::vector<HomeEstimate> observed;
        for (const auto& u : visitors[d]) {
          if (const auto it = index.find(u); it != index.end()) observed.push_back(res.estimates[it->second]);
        }
        try {
          res.flows.push_back(build_flow_table(observed, d, regions));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::empty_table) throw;
          res.empty_destinations.push_back(d);
        }
      }
      run.count("destinations", static_cast<std::int64_t>(dests.size()));
      run.count("tables", static_cast<std::int64_t>(res.flows.size()));
      run.count("empty_tables", static_cast<std::int64_t>(res.empty_destinations.size()));
      std::size_t used = 0, undetermined = 0;
      for (const auto& t : res.flows) {
        for (const auto& row : t.rows) used += row.raw_count;
        undetermined += t.undetermined;
      }
      run.count("calibrated_visitors", static_cast<std::int64_t>(used));
      run.count("undetermined_visitors", static_cast<std::int64_t>(undetermined));
      run.write("flows.csv", flows_to_csv(res.flows));
    });
  }

  if (targets.count(Stage::compare)) {
    run.stage(Stage::compare, [&] {
      const auto baseline = flows_from_csv(config.baseline_flows);
      for (const auto& event : res.flows) {
        const auto it = std::find_if(baseline.begin(), baseline.end(), [&](const FlowTable& b) {
          return b.destination == event.destination;
        });
        if (it != baseline.end()) res.comparisons.push_back(compare_flows(*it, event, config.top_k));
      }
      run.count("comparisons", static_cast<std::int64_t>(res.comparisons.size()));
      run.write("comparison.csv", comparison_to_csv(res.comparisons));
    });
  }

  if (targets.count(Stage::profiles)) {
    run.stage(Stage::profiles, [&] {
      const auto gazetteer = config.gazetteer.empty() ? Gazetteer::from_regions(regions)
                                                      : Gazetteer::load_csv(config.gazetteer);
      res.profile_matches = match_profiles(load_profiles(config.profiles), res.estimates, regions, gazetteer);
      res.profile_agreement = agreement_rate(res.estimates, res.profile_matches);
      const auto matched = std::count_if(res.profile_matches.begin(), res.profile_matches.end(),
                                         [](const ProfileMatch& m) { return m.matched_region_id.has_value(); });
      const auto comparable = std::count_if(
          res.profile_matches.begin(), res.profile_matches.end(),
          [](const ProfileMatch& m) { return m.agrees_with_estimate.has_value(); });
      const auto agree = std::count_if(
          res.profile_matches.begin(), res.profile_matches.end(),
          [](const ProfileMatch& m) { return m.agrees_with_estimate.value_or(false); });
      run.count("profiles", static_cast<std::int64_t>(res.profile_matches.size()));
      run.count("matched", matched);
      run.count("comparable", comparable);
      run.count("agreeing", agree);
      run.write("profile_matches.csv", profiles_csv(res.profile_matches, res.estimates));
    });
  }

  run.finish(true);
  return std::move(res);
}

}  // namespace geoflow
