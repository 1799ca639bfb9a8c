#include "geoflow/cli.hpp"

#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "geoflow/ascii_grid.hpp"
#include "geoflow/error.hpp"
#include "geoflow/geojson.hpp"
#include "geoflow/pipeline.hpp"
#include "geoflow/synth.hpp"

namespace geoflow {

int exit_code_for(const Error& error) {
  switch (error.kind()) {
    case ErrorKind::config:
    case ErrorKind::io:
    case ErrorKind::invalid_argument:
    case ErrorKind::invalid_geometry:
      return 2;
    case ErrorKind::data:
    case ErrorKind::no_variance:
    case ErrorKind::empty_table:
      return 3;
    case ErrorKind::resource_limit:
      return 4;
  }
  return 1;
}

namespace {

struct CommonOptions {
  std::string config;
  std::string out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "key=value configuration file");
  cmd->add_option("-o,--out-dir", o.out_dir, "output directory");
  cmd->add_option("-j,--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
  cmd->add_option("--seed", o.seed, "random seed recorded in the outputs");
  cmd->add_option("--set", o.sets, "override a config key (key=value), repeatable");
  cmd->add_flag("-q,--quiet", o.quiet, "no progress output");
}

std::map<std::string, std::string> overrides_of(const CommonOptions& o) {
  std::map<std::string, std::string> out;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::config, "--set expects key=value, got '" + s + "'");
    out[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
  }
  // Flag paths are relative to the working directory, not the config file.
  if (!o.out_dir.empty()) out["out_dir"] = std::filesystem::absolute(o.out_dir).string();
  if (o.threads) out["threads"] = std::to_string(o.threads);
  if (o.seed) out["seed"] = std::to_string(*o.seed);
  return out;
}

PipelineConfig load_config(const CommonOptions& o) {
  if (o.config.empty()) fail(ErrorKind::config, "--config is required");
  if (!std::filesystem::is_regular_file(o.config)) {
    fail(ErrorKind::config, "config file not found: " + o.config);
  }
  return PipelineConfig::load(o.config, overrides_of(o));
}

ProgressSink progress_of(const CommonOptions& o) {
  if (o.quiet) return {};
  return [](const std::string& line) { std::cerr << line << '\n'; };
}

void summarize(const PipelineResult& r, const PipelineConfig& cfg, bool quiet) {
  if (quiet) return;
  std::cerr << "wrote " << r.written.size() << " artifact(s) to " << cfg.out_dir.string() << '\n';
  if (r.profile_agreement) {
    std::cerr << "profile agreement: " << format_double(*r.profile_agreement) << '\n';
  }
}

int cmd_pipeline(const CommonOptions& o, std::set<Stage> targets) {
  const auto cfg = load_config(o);
  const auto result = run_pipeline(cfg, targets, progress_of(o));
  summarize(result, cfg, o.quiet);
  return 0;
}

int cmd_synth(const CommonOptions& o, const std::string& spec_path, bool standard) {
  synth::ScenarioSpec spec;
  std::string path = spec_path.empty() ? o.config : spec_path;
  if (standard) {
    spec = synth::standard_scenario();
  } else {
    if (path.empty()) fail(ErrorKind::config, "synth needs a scenario file or --standard");
    if (!std::filesystem::is_regular_file(path)) fail(ErrorKind::config, "scenario file not found: " + path);
    spec = synth::load_scenario_spec(path);
  }
  for (const auto& [k, v] : overrides_of(o)) {
    if (k != "out_dir" && k != "threads" && k != "seed") {
      fail(ErrorKind::config, "synth does not accept --set " + k);
    }
  }
  if (o.seed) spec.seed = *o.seed;
  const std::filesystem::path out = o.out_dir.empty() ? "." : o.out_dir;
  const auto scenario = synth::generate(spec, o.threads ? o.threads : 1);
  write_file(out / "records.ndjson", scenario.store.to_ndjson());
  write_file(out / "ground_truth.csv", scenario.truth.to_csv());
  if (standard) {
    write_file(out / "regions.geojson", regions_to_geojson(spec.regions));
    write_file(out / "corridor.geojson", regions_to_geojson({*spec.corridor}));
  }
  if (!o.quiet) {
    std::cerr << "generated " << scenario.store.size() << " records for "
              << scenario.truth.users.size() << " users in " << out.string() << '\n';
  }
  return 0;
}

int cmd_compare(const CommonOptions& o, const std::string& baseline, const std::string& event,
                std::size_t top_k) {
  if (baseline.empty() != event.empty()) {
    fail(ErrorKind::config, "--baseline and --event must be given together");
  }
  if (baseline.empty()) return cmd_pipeline(o, {Stage::compare});
  for (const auto& p : {baseline, event}) {
    if (!std::filesystem::is_regular_file(p)) fail(ErrorKind::config, "flow table not found: " + p);
  }
  const auto base = flows_from_csv(baseline);
  const auto ev = flows_from_csv(event);
  std::vector<FlowComparison> out;
  for (const auto& e : ev) {
    for (const auto& b : base) {
      if (b.destination == e.destination) out.push_back(compare_flows(b, e, top_k));
    }
  }
  if (out.empty()) fail(ErrorKind::data, "no destination appears in both flow tables");
  const std::filesystem::path dir = o.out_dir.empty() ? "." : o.out_dir;
  write_file(dir / "comparison.csv", comparison_to_csv(out));
  if (!o.quiet) std::cerr << "compared " << out.size() << " destination(s)\n";
  return 0;
}

int cmd_surface(const CommonOptions& o, const std::string& user) {
  const auto cfg = load_config(o);
  if (cfg.records.empty() || !std::filesystem::is_regular_file(cfg.records)) {
    fail(ErrorKind::config, "records file not found: " + cfg.records.string());
  }
  const auto store = RecordStore::load(cfg.records);
  const auto history = fetch_history(store, user, cfg.history_cap);
  if (history.empty()) fail(ErrorKind::data, "unknown user '" + user + "'");

  Projection proj;
  if (cfg.projection_origin || !cfg.regions.empty()) {
    std::vector<Region> regions;
    if (!cfg.regions.empty()) regions = load_regions_geojson(cfg.regions);
    proj = pipeline_projection(cfg, regions);
  } else {
    proj = fit_projection(history);
  }

  // Both rasters share the grid sized for the fixed kernels, and neither is
  // rescaled to the clipped grid mass, so their values compare directly.
  SurfaceOptions fixed;
  fixed.alpha = cfg.alpha;
  fixed.bandwidth_floor = cfg.bandwidth_floor;
  fixed.max_cells = cfg.max_cells;
  fixed.threads = cfg.threads;
  fixed.normalize = false;
  fixed.mode = BandwidthMode::fixed;
  fixed.grid = auto_grid(kernel_sites(history, proj, fixed).sites, cfg.grid_max_dim);
  auto vb = fixed;
  vb.mode = BandwidthMode::variable;

  const auto vb_surface = build_surface(history, proj, vb);
  const auto fixed_surface = build_surface(history, proj, fixed);
  const std::filesystem::path dir = cfg.out_dir;
  write_file(dir / ("surface_" + user + "_vb.asc"), to_ascii_grid(vb_surface));
  write_file(dir / ("surface_" + user + "_fixed.asc"), to_ascii_grid(fixed_surface));
  if (!o.quiet) {
    std::cerr << "user " << user << ": " << history.size() << " records, base bandwidth "
              << format_double(vb_surface.base_bandwidth) << " m, grid " << vb_surface.grid.n_rows
              << "x" << vb_surface.grid.n_cols << ", max vb " << format_double(vb_surface.max_value())
              << " / fixed " << format_double(fixed_surface.max_value()) << ", grid mass vb "
              << format_double(vb_surface.total_mass()) << " / fixed "
              << format_double(fixed_surface.total_mass()) << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"geoflow: movement analysis around events from georeferenced records"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "geoflow 1.0.0");

  CommonOptions common;
  std::string spec_path;
  bool standard = false;
  std::string user;
  std::string baseline, event;
  std::size_t top_k = 10;

  struct PipelineCommand {
    const char* name;
    const char* help;
    Stage stage;
  };
  const std::vector<PipelineCommand> pipeline_commands{
      {"filter", "keyword and time-window filter of the record store", Stage::filter},
      {"users", "select users with event records inside the corridor", Stage::users},
      {"histories", "fetch the record histories of event users", Stage::histories},
      {"stats", "place/coordinate statistics of user histories", Stage::stats},
      {"infer-home", "variable-bandwidth surfaces and home regions", Stage::homes},
      {"hotspot", "Gi* hotspots of event records per region", Stage::hotspots},
      {"temporal", "hourly local-time histogram inside/outside the corridor", Stage::temporal},
      {"flows", "population-calibrated origin shares per destination", Stage::flows},
      {"validate-profiles", "compare home estimates with profile locations", Stage::profiles},
  };

  std::map<CLI::App*, Stage> stage_of;
  for (const auto& pc : pipeline_commands) {
    auto* cmd = app.add_subcommand(pc.name, pc.help);
    add_common(cmd, common);
    stage_of[cmd] = pc.stage;
  }

  auto* run = app.add_subcommand("run", "run every stage end to end");
  add_common(run, common);

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic record store with ground truth");
  add_common(synth_cmd, common);
  synth_cmd->add_option("spec", spec_path, "scenario file");
  synth_cmd->add_flag("--standard", standard, "use the built-in reference scenario");

  auto* surface = app.add_subcommand("surface", "fixed and variable bandwidth rasters for one user");
  add_common(surface, common);
  surface->add_option("-u,--user", user, "user id")->required();

  auto* compare = app.add_subcommand("compare-flows", "compare baseline and event flow tables");
  add_common(compare, common);
  compare->add_option("--baseline", baseline, "baseline flows.csv");
  compare->add_option("--event", event, "event flows.csv");
  compare->add_option("--top-k", top_k, "origins kept from each table")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(common, spec_path, standard);
    if (surface->parsed()) return cmd_surface(common, user);
    if (compare->parsed()) return cmd_compare(common, baseline, event, top_k);
    if (run->parsed()) return cmd_pipeline(common, all_stages());
    for (const auto& [cmd, stage] : stage_of) {
      if (cmd->parsed()) return cmd_pipeline(common, {stage});
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace geoflow
