#include <doctest.h>

#include <filesystem>
#include <map>

#include "geoflow/error.hpp"
#include "geoflow/synth.hpp"
#include "geoflow/text_io.hpp"

using namespace geoflow;

namespace {

synth::ScenarioSpec small_spec() {
  synth::ScenarioSpec spec;
  spec.regions = synth::grid_regions(2, 2, 40.0, -100.0, 1.0, {1000, 2000, 3000, 4000});
  spec.corridor = synth::band_corridor(-100.5, -97.5, 40.5, 41.5, 0.3);
  spec.travel = synth::corridor_travel(spec.regions, *spec.corridor);
  spec.cohort_size = 60;
  spec.records_min = 5;
  spec.records_max = 15;
  return spec;
}

}  // namespace

TEST_CASE("generation is deterministic for a seed and any thread count") {
  const auto spec = small_spec();
  const auto a = synth::generate(spec, 1);
  const auto b = synth::generate(spec, 3);
  CHECK(a.store.to_ndjson() == b.store.to_ndjson());
  CHECK(a.truth.to_csv() == b.truth.to_csv());
  auto other = spec;
  other.seed = 7;
  CHECK(synth::generate(other).store.to_ndjson() != a.store.to_ndjson());
  CHECK(a.truth.users.size() == spec.cohort_size);
}

TEST_CASE("full home fidelity keeps history inside the home region") {
  auto spec = small_spec();
  spec.home_fidelity = 1.0;
  spec.scale_mix = synth::ScaleMix::parse("coordinate:0.5,poi:0.3,neighborhood:0.2");
  const auto scenario = synth::generate(spec);
  const std::int64_t event_start = spec.event_day * 86400;
  const Projection proj(40.0, -100.0);
  const auto zones = project_regions(spec.regions, proj);
  std::size_t checked = 0;
  for (const auto& r : scenario.store.records()) {
    if (r.timestamp_utc >= event_start) continue;
    const auto* truth = scenario.truth.find(r.user_id);
    REQUIRE(truth != nullptr);
    const auto& home = *std::find_if(zones.begin(), zones.end(),
                                     [&](const auto& z) { return z.id() == truth->home_region_id; });
    CHECK(point_in_region(representative_point(r.georef, proj), home));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("event records follow the travel matrix") {
  auto spec = small_spec();
  const auto hosts = synth::corridor_regions(spec.regions, *spec.corridor);
  REQUIRE_FALSE(hosts.empty());
  synth::TravelMatrix diagonal;
  for (const auto& r : spec.regions) {
    if (std::find(hosts.begin(), hosts.end(), r.region_id) != hosts.end()) {
      diagonal[r.region_id] = {{r.region_id, 1.0}};
    } else {
      diagonal[r.region_id] = {{"", 1.0}};
    }
  }
  spec.travel = diagonal;
  spec.home_event_share = 0.0;
  const auto scenario = synth::generate(spec);
  const Projection proj(40.0, -100.0);
  const auto corridor = project_region(*spec.corridor, proj);
  std::map<std::string, std::string> dest;
  for (const auto& u : scenario.truth.users) {
    CHECK_FALSE(u.traveled);
    if (u.destination_region_id) {
      CHECK(*u.destination_region_id == u.home_region_id);
      dest[u.user_id] = *u.destination_region_id;
    }
  }
  std::size_t event_records = 0;
  for (const auto& r : scenario.store.records()) {
    if (r.timestamp_utc < spec.event_day * 86400) continue;
    ++event_records;
    CHECK(dest.count(r.user_id) == 1);
    CHECK(point_in_region(representative_point(r.georef, proj), corridor));
    CHECK(r.timestamp_utc < (spec.event_day + 1) * 86400);
  }
  CHECK(event_records >= dest.size());
}

TEST_CASE("scale mix is reproduced within two percent") {
  auto spec = small_spec();
  spec.cohort_size = 1000;
  const auto scenario = synth::generate(spec);
  std::array<double, 6> seen{};
  double total = 0.0;
  for (const auto& r : scenario.store.records()) {
    if (r.timestamp_utc >= spec.event_day * 86400) continue;
    if (const auto* p = std::get_if<Place>(&r.georef)) {
      seen[1 + static_cast<std::size_t>(p->scale)] += 1.0;
    } else {
      seen[0] += 1.0;
    }
    total += 1.0;
  }
  CHECK(std::abs(seen[0] / total - spec.scale_mix.coordinate) < 0.02);
  for (std::size_t s = 0; s < 5; ++s) CHECK(std::abs(seen[s + 1] / total - spec.scale_mix.place[s]) < 0.02);
}

TEST_CASE("scenario validation") {
  auto spec = small_spec();
  CHECK_NOTHROW(spec.validate());
  auto bad = spec;
  bad.travel["R0000"] = {{"R0001", 0.5}};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.travel["R0000"] = {{"nowhere", 1.0}};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.home_fidelity = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.records_min = 20;
  bad.records_max = 10;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(synth::ScaleMix::parse("planet:1"), Error);
  CHECK(synth::ScaleMix::parse("coordinate:0.25,city:0.75").total() == doctest::Approx(1.0));
}

TEST_CASE("in-state travel matrix") {
  const auto m = synth::in_state_travel("D", {"A", "B"}, 0.5);
  CHECK(m.at("D") == std::vector<std::pair<std::string, double>>{{"D", 1.0}});
  double sum = 0.0;
  for (const auto& [d, p] : m.at("A")) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  CHECK_THROWS_AS(synth::in_state_travel("D", {"A"}, 0.0), Error);
}

TEST_CASE("ground truth csv round trip") {
  const auto scenario = synth::generate(small_spec());
  const auto path = std::filesystem::temp_directory_path() / "geoflow_truth.csv";
  write_file(path, scenario.truth.to_csv());
  const auto back = synth::GroundTruth::from_csv(path);
  CHECK(back.to_csv() == scenario.truth.to_csv());
  std::filesystem::remove(path);
}

TEST_CASE("standard scenario") {
  const auto spec = synth::standard_scenario();
  CHECK(spec.regions.size() == 16);
  CHECK(spec.cohort_size == 500);
  CHECK_NOTHROW(spec.validate());
  CHECK_FALSE(synth::corridor_regions(spec.regions, *spec.corridor).empty());
}
