#include "geoflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "geoflow/error.hpp"
#include "geoflow/geojson.hpp"
#include "geoflow/parallel.hpp"
#include "geoflow/text_io.hpp"

namespace geoflow::synth {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

constexpr std::array<PlaceScale, 5> kScales{PlaceScale::poi, PlaceScale::neighborhood,
                                            PlaceScale::city, PlaceScale::admin,
                                            PlaceScale::country};

const std::array<const char*, 6> kFillerTexts{
    "good morning", "coffee first", "traffic is terrible again", "weekend plans anyone?",
    "nice weather today", "new favorite lunch spot"};

const std::array<const char*, 4> kEventTemplates{
    "Watching the {}!", "{} day is finally here", "Incredible {} view from here",
    "Not missing this {}"};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct DegreeBox {
  double min_lat, min_lon, max_lat, max_lon;
};

DegreeBox degree_box(const Region& r) {
  DegreeBox b{90.0, 180.0, -90.0, -180.0};
  for (const auto& ring : r.boundary) {
    for (const auto& p : ring) {
      b.min_lat = std::min(b.min_lat, p.lat);
      b.max_lat = std::max(b.max_lat, p.lat);
      b.min_lon = std::min(b.min_lon, p.lon);
      b.max_lon = std::max(b.max_lon, p.lon);
    }
  }
  return b;
}

// Inclusion tests run in a fixed projection; equirectangular is affine in
// (lat, lon), so the result matches degree-space inclusion.
struct Geometry {
  Projection proj{0.0, 0.0};
  std::vector<ProjectedRegion> regions;
  std::vector<DegreeBox> boxes;
  std::optional<ProjectedRegion> corridor;
  DegreeBox corridor_box{};

  explicit Geometry(const ScenarioSpec& spec) {
    regions = project_regions(spec.regions, proj);
    for (const auto& r : spec.regions) boxes.push_back(degree_box(r));
    if (spec.corridor) {
      corridor = project_region(*spec.corridor, proj);
      corridor_box = degree_box(*spec.corridor);
    }
  }

  bool in_region(std::size_t idx, LatLon p) const {
    return point_in_region(proj.forward(p), regions[idx]);
  }
  bool in_corridor(LatLon p) const {
    return corridor && point_in_region(proj.forward(p), *corridor);
  }
};

enum class CorridorRule { any, inside, outside };

std::optional<LatLon> sample_in_region(std::mt19937_64& rng, const Geometry& geo, std::size_t idx,
                                       CorridorRule rule, int attempts = 20'000) {
  auto b = geo.boxes[idx];
  if (rule == CorridorRule::inside && geo.corridor) {
    const auto& c = geo.corridor_box;
    b = {std::max(b.min_lat, c.min_lat), std::max(b.min_lon, c.min_lon),
         std::min(b.max_lat, c.max_lat), std::min(b.max_lon, c.max_lon)};
    if (b.min_lat > b.max_lat || b.min_lon > b.max_lon) return std::nullopt;
  }
  std::uniform_real_distribution<double> lat(b.min_lat, b.max_lat);
  std::uniform_real_distribution<double> lon(b.min_lon, b.max_lon);
  for (int i = 0; i < attempts; ++i) {
    const LatLon p{lat(rng), lon(rng)};
    if (!geo.in_region(idx, p)) continue;
    if (rule == CorridorRule::inside && !geo.in_corridor(p)) continue;
    if (rule == CorridorRule::outside && geo.in_corridor(p)) continue;
    return p;
  }
  return std::nullopt;
}

LatLon offset_meters(LatLon p, double east_m, double north_m) {
  const double lat = p.lat + north_m / Projection::kEarthRadius * kRadToDeg;
  const double lon =
      p.lon + east_m / (Projection::kEarthRadius * std::cos(p.lat / kRadToDeg)) * kRadToDeg;
  return {lat, lon};
}

Georeference make_georef(std::mt19937_64& rng, LatLon p, const ScenarioSpec& spec) {
  std::discrete_distribution<int> pick{spec.scale_mix.coordinate,   spec.scale_mix.place[0],
                                       spec.scale_mix.place[1], spec.scale_mix.place[2],
                                       spec.scale_mix.place[3], spec.scale_mix.place[4]};
  const int k = pick(rng);
  if (k == 0) return p;
  const auto scale = kScales[static_cast<std::size_t>(k - 1)];
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  const double half = spec.box_sizes.of(scale) * jitter(rng) / 2.0;
  const auto sw = offset_meters(p, -half, -half);
  const auto ne = offset_meters(p, half, half);
  const double south = std::clamp(sw.lat, -89.9, 89.9);
  const double north = std::clamp(ne.lat, -89.9, 89.9);
  const double west = std::clamp(sw.lon, -180.0, 180.0);
  const double east = std::clamp(ne.lon, -180.0, 180.0);
  LatLonRing ring{{south, west}, {south, east}, {north, east}, {north, west}, {south, west}};
  return Place{scale, {std::move(ring)}};
}

std::string event_text(std::mt19937_64& rng, const ScenarioSpec& spec) {
  std::uniform_int_distribution<std::size_t> tpl(0, kEventTemplates.size() - 1);
  std::uniform_int_distribution<std::size_t> kw(0, spec.keywords.size() - 1);
  std::string text = kEventTemplates[tpl(rng)];
  const auto pos = text.find("{}");
  text.replace(pos, 2, spec.keywords[kw(rng)]);
  return text;
}

std::string user_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%06zu", i + 1);
  return buf;
}

struct UserOutput {
  std::vector<GeoRecord> records;
  UserTruth truth;
};

UserOutput generate_user(const ScenarioSpec& spec, const Geometry& geo,
                         const std::vector<double>& home_weights, std::size_t index) {
  std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(index + 1)));
  UserOutput out;
  out.truth.user_id = user_name(index);

  std::discrete_distribution<std::size_t> pick_home(home_weights.begin(), home_weights.end());
  const std::size_t home = pick_home(rng);
  const auto& home_region = spec.regions[home];
  out.truth.home_region_id = home_region.region_id;
  const auto anchor = sample_in_region(rng, geo, home, CorridorRule::any);
  if (!anchor) fail(ErrorKind::invalid_argument, "cannot sample inside region '" + home_region.region_id + "'");

  std::optional<std::size_t> destination;
  if (const auto row = spec.travel.find(home_region.region_id); row != spec.travel.end()) {
    std::vector<double> probs;
    for (const auto& entry : row->second) probs.push_back(entry.second);
    std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
    const auto& dest_id = row->second[pick(rng)].first;
    if (!dest_id.empty()) {
      for (std::size_t i = 0; i < spec.regions.size(); ++i) {
        if (spec.regions[i].region_id == dest_id) destination = i;
      }
    }
  }

  std::uniform_int_distribution<std::size_t> count(spec.records_min, spec.records_max);
  const std::size_t n_history = count(rng);
  const std::int64_t history_end = spec.event_day * 86400;
  std::uniform_int_distribution<std::int64_t> history_time(history_end - spec.history_days * 86400,
                                                          history_end - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> scatter(0.0, std::max(spec.home_sigma_m, 1.0));
  std::uniform_int_distribution<std::size_t> filler(0, kFillerTexts.size() - 1);
  std::uniform_int_distribution<std::size_t> other_region(0, spec.regions.size() - 1);

  std::size_t seq = 0;
  auto emit = [&](LatLon p, std::int64_t ts, std::string text) {
    char id[48];
    std::snprintf(id, sizeof id, "-%04zu", ++seq);
    out.records.push_back(GeoRecord{out.truth.user_id + id, out.truth.user_id, ts, std::move(text),
                                    make_georef(rng, p, spec)});
  };

  for (std::size_t k = 0; k < n_history; ++k) {
    LatLon p = *anchor;
    if (unit(rng) < spec.home_fidelity || spec.regions.size() == 1) {
      for (int attempt = 0; spec.home_sigma_m > 0.0 && attempt < 100; ++attempt) {
        const auto q = offset_meters(*anchor, scatter(rng), scatter(rng));
        if (geo.in_region(home, q)) {
          p = q;
          break;
        }
      }
    } else {
      std::size_t away = other_region(rng);
      while (away == home) away = other_region(rng);
      if (auto q = sample_in_region(rng, geo, away, CorridorRule::any)) p = *q;
    }
    emit(p, history_time(rng), kFillerTexts[filler(rng)]);
  }

  std::uniform_int_distribution<std::int64_t> event_time(history_end + 16 * 3600,
                                                        history_end + 21 * 3600 - 1);
  if (destination) {
    out.truth.destination_region_id = spec.regions[*destination].region_id;
    out.truth.traveled = *destination != home;
    std::uniform_int_distribution<std::size_t> n_event(spec.event_records_min,
                                                       spec.event_records_max);
    const auto rule = spec.corridor ? CorridorRule::inside : CorridorRule::any;
    const std::size_t m = n_event(rng);
    for (std::size_t k = 0; k < m; ++k) {
      const auto p = sample_in_region(rng, geo, *destination, rule);
      if (!p) {
        fail(ErrorKind::invalid_argument, "destination '" + spec.regions[*destination].region_id +
                                              "' does not overlap the corridor");
      }
      emit(*p, event_time(rng), event_text(rng, spec));
    }
  } else if (unit(rng) < spec.home_event_share) {
    const auto rule = spec.corridor ? CorridorRule::outside : CorridorRule::any;
    if (const auto p = sample_in_region(rng, geo, home, rule, 2'000)) {
      // Coarse places could straddle the corridor; keep stay-at-home posts exact.
      const auto ts = event_time(rng);
      char id[48];
      std::snprintf(id, sizeof id, "-%04zu", ++seq);
      out.records.push_back(GeoRecord{out.truth.user_id + id, out.truth.user_id, ts,
                                      event_text(rng, spec), *p});
    }
  }
  return out;
}

}  // namespace

ScaleMix ScaleMix::parse(const std::string& text) {
  ScaleMix mix;
  mix.coordinate = 0.0;
  mix.place.fill(0.0);
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 2) fail(ErrorKind::config, "scale_mix entry '" + item + "' must be name:prob");
    double p = 0.0;
    try {
      p = std::stod(parts[1]);
    } catch (const std::logic_error&) {
      fail(ErrorKind::config, "scale_mix probability '" + parts[1] + "' is not a number");
    }
    if (parts[0] == "coordinate") {
      mix.coordinate = p;
    } else if (const auto s = parse_place_scale(parts[0])) {
      mix.place[static_cast<std::size_t>(*s)] = p;
    } else {
      fail(ErrorKind::config, "unknown scale '" + parts[0] + "' in scale_mix");
    }
  }
  return mix;
}

double ScaleMix::total() const {
  double t = coordinate;
  for (double p : place) t += p;
  return t;
}

void ScenarioSpec::validate() const {
  if (regions.empty()) fail(ErrorKind::invalid_argument, "scenario region set is empty");
  validate_region_set(regions);
  if (cohort_size == 0) fail(ErrorKind::invalid_argument, "cohort_size must be positive");
  if (records_min > records_max) fail(ErrorKind::invalid_argument, "records_min exceeds records_max");
  if (event_records_min > event_records_max) {
    fail(ErrorKind::invalid_argument, "event_records_min exceeds event_records_max");
  }
  if (!(home_fidelity >= 0.0 && home_fidelity <= 1.0)) {
    fail(ErrorKind::invalid_argument, "home_fidelity must lie in [0, 1]");
  }
  if (!(home_event_share >= 0.0 && home_event_share <= 1.0)) {
    fail(ErrorKind::invalid_argument, "home_event_share must lie in [0, 1]");
  }
  if (!(home_sigma_m >= 0.0)) fail(ErrorKind::invalid_argument, "home_sigma_m must be non-negative");
  if (history_days <= 0) fail(ErrorKind::invalid_argument, "history_days must be positive");
  if (keywords.empty()) fail(ErrorKind::invalid_argument, "scenario needs event keywords");
  if (scale_mix.coordinate < 0.0 ||
      std::any_of(scale_mix.place.begin(), scale_mix.place.end(), [](double p) { return p < 0.0; }) ||
      std::abs(scale_mix.total() - 1.0) > 1e-9) {
    fail(ErrorKind::invalid_argument, "scale_mix must be non-negative and sum to 1");
  }
  for (double s : box_sizes.side) {
    if (!(s > 0.0)) fail(ErrorKind::invalid_argument, "place box sizes must be positive");
  }
  for (const auto& [origin, row] : travel) {
    if (!find_region(regions, origin)) {
      fail(ErrorKind::invalid_argument, "travel matrix origin '" + origin + "' is not a region");
    }
    double sum = 0.0;
    for (const auto& [dest, p] : row) {
      if (!dest.empty() && !find_region(regions, dest)) {
        fail(ErrorKind::invalid_argument, "travel matrix destination '" + dest + "' is not a region");
      }
      if (!(p >= 0.0)) fail(ErrorKind::invalid_argument, "travel probabilities must be non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      fail(ErrorKind::invalid_argument, "travel probabilities for '" + origin + "' must sum to 1");
    }
  }
}

std::string GroundTruth::to_csv() const {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"user_id", "home_region_id", "destination_region_id", "traveled"});
  for (const auto& u : users) {
    csv.row({u.user_id, u.home_region_id, u.destination_region_id.value_or(""),
             u.traveled ? "1" : "0"});
  }
  return out.str();
}

GroundTruth GroundTruth::from_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto user = table.column("user_id");
  const auto home = table.column("home_region_id");
  const auto dest = table.column("destination_region_id");
  const auto traveled = table.column("traveled");
  GroundTruth gt;
  for (const auto& row : table.rows) {
    UserTruth u{row[user], row[home], std::nullopt, row[traveled] == "1"};
    if (!row[dest].empty()) u.destination_region_id = row[dest];
    gt.users.push_back(std::move(u));
  }
  return gt;
}

const UserTruth* GroundTruth::find(const std::string& user_id) const {
  for (const auto& u : users) {
    if (u.user_id == user_id) return &u;
  }
  return nullptr;
}

Scenario generate(const ScenarioSpec& spec, unsigned threads) {
  spec.validate();
  const Geometry geo(spec);
  std::vector<double> weights;
  double total = 0.0;
  for (const auto& r : spec.regions) {
    weights.push_back(static_cast<double>(r.population));
    total += static_cast<double>(r.population);
  }
  if (total <= 0.0) std::fill(weights.begin(), weights.end(), 1.0);

  std::vector<UserOutput> users(spec.cohort_size);
  parallel_for(spec.cohort_size, threads,
               [&](std::size_t i) { users[i] = generate_user(spec, geo, weights, i); });

  std::vector<GeoRecord> records;
  Scenario scenario;
  for (auto& u : users) {
    for (auto& r : u.records) records.push_back(std::move(r));
    scenario.truth.users.push_back(std::move(u.truth));
  }
  scenario.store = RecordStore(std::move(records));
  return scenario;
}

namespace {

TravelMatrix load_travel_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto origin = table.column("origin");
  const auto dest = table.column("destination");
  const auto prob = table.column("probability");
  TravelMatrix m;
  for (const auto& row : table.rows) {
    std::string d = row[dest];
    if (d == "none") d.clear();
    double p = 0.0;
    try {
      p = std::stod(row[prob]);
    } catch (const std::logic_error&) {
      fail(ErrorKind::config, "travel probability '" + row[prob] + "' is not a number");
    }
    m[row[origin]].emplace_back(std::move(d), p);
  }
  return m;
}

}  // namespace

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
  const auto cfg = KeyValueConfig::load(path);
  static const std::set<std::string> known{
      "seed", "regions", "corridor", "cohort_size", "records_min", "records_max",
      "home_fidelity", "home_sigma_m", "scale_mix", "event_day", "history_days",
      "event_records_min", "event_records_max", "travel_matrix", "in_state_destination",
      "in_state_origins", "in_state_share", "home_event_share", "keywords",
      "place_box_poi_m", "place_box_neighborhood_m", "place_box_city_m", "place_box_admin_m",
      "place_box_country_m"};
  for (const auto& [key, value] : cfg.values()) {
    if (!known.count(key)) fail(ErrorKind::config, path.string() + ": unknown key '" + key + "'");
  }

  ScenarioSpec spec;
  spec.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
  const auto regions_path = cfg.get_path("regions");
  if (!regions_path) fail(ErrorKind::config, path.string() + ": 'regions' is required");
  if (!std::filesystem::exists(*regions_path)) {
    fail(ErrorKind::config, "region file not found: " + regions_path->string());
  }
  spec.regions = load_regions_geojson(*regions_path);
  if (const auto corridor = cfg.get_path("corridor")) {
    if (!std::filesystem::exists(*corridor)) {
      fail(ErrorKind::config, "corridor file not found: " + corridor->string());
    }
    auto features = load_regions_geojson(*corridor);
    if (features.empty()) fail(ErrorKind::config, corridor->string() + ": no corridor feature");
    spec.corridor = std::move(features.front());
  }
  spec.cohort_size = static_cast<std::size_t>(cfg.get_int("cohort_size", 500));
  spec.records_min = static_cast<std::size_t>(cfg.get_int("records_min", 20));
  spec.records_max = static_cast<std::size_t>(cfg.get_int("records_max", 80));
  spec.home_fidelity = cfg.get_double("home_fidelity", 0.8);
  spec.home_sigma_m = cfg.get_double("home_sigma_m", 20'000.0);
  if (const auto mix = cfg.get("scale_mix")) spec.scale_mix = ScaleMix::parse(*mix);
  for (auto s : kScales) {
    const auto key = "place_box_" + std::string(to_string(s)) + "_m";
    spec.box_sizes.side[static_cast<std::size_t>(s)] =
        cfg.get_double(key, spec.box_sizes.of(s));
  }
  if (const auto day = cfg.get("event_day")) {
    try {
      spec.event_day = parse_date(*day);
    } catch (const Error& e) {
      fail(ErrorKind::config, e.what());
    }
  }
  spec.history_days = cfg.get_int("history_days", 60);
  spec.event_records_min = static_cast<std::size_t>(cfg.get_int("event_records_min", 1));
  spec.event_records_max = static_cast<std::size_t>(cfg.get_int("event_records_max", 3));
  spec.home_event_share = cfg.get_double("home_event_share", 0.5);
  if (const auto kw = cfg.get("keywords")) spec.keywords = split(*kw, ',');

  if (const auto travel = cfg.get_path("travel_matrix")) {
    if (!std::filesystem::exists(*travel)) {
      fail(ErrorKind::config, "travel matrix not found: " + travel->string());
    }
    spec.travel = load_travel_csv(*travel);
  } else if (const auto dest = cfg.get("in_state_destination")) {
    std::vector<std::string> origins;
    if (const auto o = cfg.get("in_state_origins")) {
      origins = split(*o, ',');
    } else {
      for (const auto& r : spec.regions) origins.push_back(r.region_id);
    }
    spec.travel = in_state_travel(*dest, origins, cfg.get_double("in_state_share", 0.65));
  } else if (spec.corridor) {
    spec.travel = corridor_travel(spec.regions, *spec.corridor);
  }
  return spec;
}

std::vector<Region> grid_regions(std::size_t rows, std::size_t cols, double south_lat,
                                 double west_lon, double cell_deg,
                                 const std::vector<std::int64_t>& populations) {
  std::vector<Region> out;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double s = south_lat + cell_deg * static_cast<double>(r);
      const double w = west_lon + cell_deg * static_cast<double>(c);
      char id[48];
      std::snprintf(id, sizeof id, "R%02zu%02zu", r, c);
      Region region;
      region.region_id = id;
      region.name = std::string("Region ") + id;
      region.boundary.push_back(
          {{s, w}, {s, w + cell_deg}, {s + cell_deg, w + cell_deg}, {s + cell_deg, w}, {s, w}});
      if (!populations.empty()) region.population = populations[(r * cols + c) % populations.size()];
      out.push_back(std::move(region));
    }
  }
  return out;
}

Region band_corridor(double west_lon, double east_lon, double west_center_lat,
                     double east_center_lat, double half_height_deg) {
  Region r;
  r.region_id = "corridor";
  r.name = "Event corridor";
  r.boundary.push_back({{west_center_lat - half_height_deg, west_lon},
                        {east_center_lat - half_height_deg, east_lon},
                        {east_center_lat + half_height_deg, east_lon},
                        {west_center_lat + half_height_deg, west_lon},
                        {west_center_lat - half_height_deg, west_lon}});
  return r;
}

std::vector<std::string> corridor_regions(const std::vector<Region>& regions,
                                          const Region& corridor) {
  // A region hosts the event when at least 1% of its area lies in the
  // corridor; slivers along the band edge do not count.
  const Projection proj(0.0, 0.0);
  const auto pc = project_region(corridor, proj);
  constexpr int kSteps = 100;
  std::vector<std::string> out;
  for (const auto& region : regions) {
    const auto pr = project_region(region, proj);
    std::size_t in_region = 0;
    std::size_t in_both = 0;
    for (int i = 0; i < kSteps; ++i) {
      for (int j = 0; j < kSteps; ++j) {
        const PlanarPoint p{pr.bbox.min_x + pr.bbox.width() * (i + 0.5) / kSteps,
                            pr.bbox.min_y + pr.bbox.height() * (j + 0.5) / kSteps};
        if (!point_in_region(p, pr)) continue;
        ++in_region;
        if (point_in_region(p, pc)) ++in_both;
      }
    }
    if (in_region > 0 && in_both * 100 >= in_region) out.push_back(region.region_id);
  }
  return out;
}

TravelMatrix in_state_travel(const std::string& destination,
                             const std::vector<std::string>& origins, double in_state_share) {
  if (!(in_state_share > 0.0 && in_state_share <= 1.0)) {
    fail(ErrorKind::invalid_argument, "in_state_share must lie in (0, 1]");
  }
  std::vector<std::string> others;
  for (const auto& o : origins) {
    if (o != destination) others.push_back(o);
  }
  TravelMatrix m;
  m[destination] = {{destination, 1.0}};
  if (others.empty()) return m;
  const double visit = (1.0 / in_state_share - 1.0) / static_cast<double>(others.size());
  if (visit > 1.0) {
    fail(ErrorKind::invalid_argument, "in_state_share too small for the number of origins");
  }
  for (const auto& o : others) m[o] = {{destination, visit}, {"", 1.0 - visit}};
  return m;
}

TravelMatrix corridor_travel(const std::vector<Region>& regions, const Region& corridor) {
  const auto hosts = corridor_regions(regions, corridor);
  TravelMatrix m;
  for (const auto& r : regions) {
    auto& row = m[r.region_id];
    if (hosts.empty()) {
      row = {{"", 1.0}};
      continue;
    }
    const bool host = std::find(hosts.begin(), hosts.end(), r.region_id) != hosts.end();
    if (host) {
      row.emplace_back(r.region_id, hosts.size() > 1 ? 0.6 : 0.8);
      for (const auto& h : hosts) {
        if (h != r.region_id) row.emplace_back(h, 0.2 / static_cast<double>(hosts.size() - 1));
      }
      row.emplace_back("", 0.2);
    } else {
      for (const auto& h : hosts) row.emplace_back(h, 0.5 / static_cast<double>(hosts.size()));
      row.emplace_back("", 0.5);
    }
  }
  return m;
}

ScenarioSpec standard_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.regions = grid_regions(4, 4, 38.0, -124.0, 2.0,
                              {3'900'000, 1'200'000, 600'000, 2'100'000, 900'000, 4'400'000,
                               300'000, 1'500'000, 2'800'000, 700'000, 1'100'000, 500'000,
                               3'200'000, 1'800'000, 400'000, 2'400'000});
  for (auto& r : spec.regions) {
    const double west = r.boundary.front().front().lon;
    r.utc_offset_hours = west < -120.0 ? -7.0 : -6.0;
  }
  spec.corridor = band_corridor(-124.5, -115.5, 43.2, 40.6, 0.5);
  spec.cohort_size = 500;
  spec.records_min = 20;
  spec.records_max = 80;
  spec.home_fidelity = 0.8;
  spec.home_sigma_m = 20'000.0;
  spec.travel = corridor_travel(spec.regions, *spec.corridor);
  return spec;
}

}  // namespace geoflow::synth
