#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geoflow/cli.hpp"
#include "geoflow/error.hpp"
#include "geoflow/geojson.hpp"
#include "geoflow/pipeline.hpp"
#include "geoflow/synth.hpp"

using namespace geoflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path dir;
  synth::Scenario scenario;

  explicit Workspace(const std::string& name, std::size_t users = 120) {
    dir = fs::temp_directory_path() / ("geoflow_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto spec = synth::standard_scenario(11);
    spec.cohort_size = users;
    scenario = synth::generate(spec);
    write_file(dir / "records.ndjson", scenario.store.to_ndjson());
    write_file(dir / "regions.geojson", regions_to_geojson(spec.regions));
    write_file(dir / "corridor.geojson", regions_to_geojson({*spec.corridor}));
    write_config("run.conf", "");
  }
  ~Workspace() { fs::remove_all(dir); }

  void write_config(const std::string& name, const std::string& extra) const {
    write_file(dir / name,
               "records = records.ndjson\nregions = regions.geojson\ncorridor = corridor.geojson\n"
               "start = 2017-08-21\nend = 2017-08-21\n" + extra);
  }

  int cli(std::vector<std::string> args) const {
    args.insert(args.begin(), "geoflow");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  }

  std::string conf(const std::string& name = "run.conf") const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("pipeline counts match the planted ground truth") {
  Workspace ws("truth");
  const auto out = ws.dir / "out";
  REQUIRE(ws.cli({"run", "-q", "-c", ws.conf(), "-o", out.string()}) == 0);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  std::size_t attending = 0;
  for (const auto& u : ws.scenario.truth.users) attending += u.destination_region_id.has_value();
  std::int64_t event_users = -1;
  for (const auto& s : manifest["stages"]) {
    if (s["stage"] == "select-users") event_users = s["counts"]["event_users"];
  }
  CHECK(event_users == static_cast<std::int64_t>(attending));

  const auto homes = estimates_from_csv(out / "homes.csv");
  CHECK(homes.size() == attending);
  std::size_t correct = 0, determined = 0;
  for (const auto& h : homes) {
    if (!h.determined()) continue;
    ++determined;
    correct += *h.region_id == ws.scenario.truth.find(h.user_id)->home_region_id;
  }
  CHECK(determined > 0);
  CHECK(static_cast<double>(correct) / static_cast<double>(determined) >= 0.9);
  for (const char* f : {"event_records.ndjson", "event_users.csv", "histories.ndjson", "history_stats.csv",
                        "hotspots.csv", "temporal.csv", "flows.csv", "run_timings.json"}) {
    CHECK(fs::exists(out / f));
  }
  CHECK_FALSE(fs::exists(out / "comparison.csv"));
}

TEST_CASE("run output does not depend on the thread count") {
  Workspace ws("threads");
  const auto a = ws.dir / "a", b = ws.dir / "b";
  REQUIRE(ws.cli({"run", "-q", "-c", ws.conf(), "-o", a.string(), "-j", "1"}) == 0);
  REQUIRE(ws.cli({"run", "-q", "-c", ws.conf(), "-o", b.string(), "-j", "4"}) == 0);
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
  for (const auto& n : names) {
    if (n == "run_timings.json") continue;
    CHECK_MESSAGE(slurp(a / n) == slurp(b / n), n);
  }
}

TEST_CASE("single stages pull in their dependencies") {
  Workspace ws("stages", 60);
  const auto out = ws.dir / "out";
  REQUIRE(ws.cli({"hotspot", "-q", "-c", ws.conf(), "-o", out.string()}) == 0);
  CHECK(fs::exists(out / "hotspots.csv"));
  CHECK(fs::exists(out / "event_records.ndjson"));
  CHECK_FALSE(fs::exists(out / "homes.csv"));
}

TEST_CASE("exit codes") {
  Workspace ws("exits", 40);
  const auto out = (ws.dir / "out").string();
  CHECK(ws.cli({"run", "-q", "-c", ws.conf(), "-o", out, "--set", "keywords=nothingmatches"}) == 3);
  const auto manifest = nlohmann::json::parse(slurp(ws.dir / "out" / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["failed_stage"] == "select-users");

  ws.write_config("missing.conf", "");
  write_file(ws.dir / "missing.conf", "records = records.ndjson\nregions = nowhere.geojson\n"
                                      "corridor = corridor.geojson\nstart = 2017-08-21\nend = 2017-08-21\n");
  CHECK(ws.cli({"run", "-q", "-c", ws.conf("missing.conf"), "-o", out}) == 2);
  try {
    PipelineConfig::load(ws.dir / "missing.conf").validate();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("nowhere.geojson") != std::string::npos);
  }

  write_file(ws.dir / "broken.conf", "records = records.ndjson\nthis line has no equals sign\n");
  CHECK(ws.cli({"run", "-q", "-c", ws.conf("broken.conf"), "-o", out}) == 2);
  write_file(ws.dir / "unknown.conf", "records = records.ndjson\ncolour = blue\n");
  CHECK(ws.cli({"run", "-q", "-c", ws.conf("unknown.conf"), "-o", out}) == 2);
  CHECK(ws.cli({"run", "-q", "-c", ws.conf("absent.conf")}) == 2);
  CHECK(ws.cli({"run", "--no-such-flag"}) == 2);
  CHECK(ws.cli({"surface", "-q", "-c", ws.conf(), "-o", out, "-u", "nobody"}) == 3);
  CHECK(ws.cli({"compare-flows", "-q", "-c", ws.conf(), "-o", out}) == 2);
}

TEST_CASE("surface command writes comparable rasters") {
  Workspace ws("surface", 40);
  const auto out = ws.dir / "out";
  const std::string user = ws.scenario.truth.users.front().user_id;
  REQUIRE(ws.cli({"surface", "-q", "-c", ws.conf(), "-o", out.string(), "-u", user}) == 0);
  const auto vb = slurp(out / ("surface_" + user + "_vb.asc"));
  const auto fixed = slurp(out / ("surface_" + user + "_fixed.asc"));
  CHECK(vb.rfind("ncols", 0) == 0);
  auto max_of = [](const std::string& text) {
    std::istringstream in(text);
    std::string key;
    double v = 0.0, best = 0.0;
    for (int i = 0; i < 6; ++i) in >> key >> v;
    while (in >> v) best = std::max(best, v);
    return best;
  };
  CHECK(max_of(vb) <= max_of(fixed) * (1 + 1e-12));
}

TEST_CASE("standalone flow comparison") {
  Workspace ws("compare", 80);
  const auto out = ws.dir / "out";
  REQUIRE(ws.cli({"flows", "-q", "-c", ws.conf(), "-o", out.string()}) == 0);
  const auto flows = (out / "flows.csv").string();
  REQUIRE(ws.cli({"compare-flows", "-q", "--baseline", flows, "--event", flows, "-o", out.string()}) == 0);
  const auto text = slurp(out / "comparison.csv");
  CHECK(text.find(",0,") != std::string::npos);

  ws.write_config("baseline.conf", "baseline_flows = out/flows.csv\n");
  const auto out2 = ws.dir / "out2";
  REQUIRE(ws.cli({"run", "-q", "-c", ws.conf("baseline.conf"), "-o", out2.string()}) == 0);
  CHECK(fs::exists(out2 / "comparison.csv"));
}

TEST_CASE("config parsing") {
  KeyValueConfig kv = KeyValueConfig::parse("start = 2017-08-21\nend = 2017-08-21\nhotspot_mode = count\n"
                                            "projection_origin = 44.0,-120.5\ndestinations = A,B\n",
                                            "x.conf");
  const auto cfg = PipelineConfig::from_values(kv);
  CHECK(cfg.start_utc == 17399LL * 86400);
  CHECK(cfg.end_utc == 17400LL * 86400);
  CHECK_FALSE(cfg.hotspot_rate);
  CHECK(cfg.projection_origin->lat == 44.0);
  CHECK(cfg.projection_origin->lon == -120.5);
  CHECK(cfg.destinations == std::vector<std::string>{"A", "B"});
  for (const auto& [k, v] : cfg.parameters()) {
    CHECK(k != "out_dir");
    CHECK(k != "threads");
  }
}
