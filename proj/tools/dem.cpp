// dem - run, compare and inspect DEM benchmark scenes.
//
//   dem run <config>              simulate until termination, write reports
//   dem compare <config>          same scene under the simple and practical models
//   dem scene <config> --dry-run  validate the config and print scene statistics
//
// Exit codes: 0 success, 2 config error, 3 numerical explosion, 4 I/O error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dem/cell_grid.hpp"
#include "dem/config.hpp"
#include "dem/errors.hpp"
#include "dem/parallel_engine.hpp"
#include "dem/profiler.hpp"
#include "dem/runner.hpp"
#include "dem/scene.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitExplosion = 3;
constexpr int kExitIo = 4;

struct Common {
  std::string config_path;
  std::size_t workers = 0;  // 0: DEM_WORKERS or hardware concurrency
  bool full = false;
  std::string output;
};

dem::RunConfig load(const Common& c) {
  dem::RunConfig cfg = dem::load_config(c.config_path);
  if (c.full) dem::scale_to_full(cfg);
  return cfg;
}

dem::RunOptions options(const Common& c) {
  dem::RunOptions o;
  o.workers = c.workers > 0 ? c.workers : dem::workers_from_env();
  o.output_dir = c.output;
  return o;
}

void print_report(const dem::RunReport& r) {
  std::printf("model=%s particles=%llu workers=%zu steps=%llu wall=%.3fs throughput=%.1f particle-steps/s reason=%s\n",
              dem::model_name(r.model), static_cast<unsigned long long>(r.particle_count), r.worker_count,
              static_cast<unsigned long long>(r.total_steps), r.wall_seconds, r.throughput,
              r.termination_reason.c_str());
}

int cmd_run(const Common& c) {
  const dem::RunReport r = dem::run(load(c), options(c));
  print_report(r);
  return 0;
}

int cmd_compare(const Common& c) {
  const dem::ComparisonReport r = dem::compare_models(load(c), options(c));
  print_report(r.simple);
  print_report(r.practical);
  if (r.slowdown)
    std::printf("simple/practical throughput ratio: %.3f\n", *r.slowdown);
  else
    std::printf("simple/practical throughput ratio: n/a\n");
  return 0;
}

int cmd_scene(const Common& c) {
  const dem::RunConfig cfg = load(c);
  const dem::Scene scene = dem::build_scene(cfg);
  const dem::GridDims g = cfg.sim.grid_dims();
  const double d = 2.0 * cfg.radius;
  const dem::Vec3& e = cfg.sim.cell_edge;
  std::printf("particles: %zu\n", scene.particles.count());
  std::printf("walls: %zu\n", scene.walls.size());
  std::printf("grid: %lld x %lld x %lld cells\n", static_cast<long long>(g.nx), static_cast<long long>(g.ny),
              static_cast<long long>(g.nz));
  std::printf("cell packing capacity: %.4f\n", dem::packing_capacity(e.x, e.y, e.z, d));
  std::printf("candidate bound: %.4f\n", dem::candidate_bound(27, dem::packing_capacity(e.x, e.y, e.z, d)));
  if (scene.particles.count() < 5000) std::printf("min pair gap: %.6g m\n", dem::min_pair_gap(scene.particles));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete element granular-flow simulator"};
  app.require_subcommand(1);

  Common common;
  bool dry_run = false;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", common.config_path, "Run configuration file")->required();
    sub->add_option("--workers", common.workers, "Worker threads (default: DEM_WORKERS or hardware)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--full", common.full, "Scale the scene to 131072 particles");
    sub->add_option("--output", common.output, "Output directory (overrides output_dir)");
  };
  CLI::App* run = app.add_subcommand("run", "Simulate until termination");
  add_common(run);
  CLI::App* compare = app.add_subcommand("compare", "Compare simple and practical models");
  add_common(compare);
  CLI::App* scene = app.add_subcommand("scene", "Validate a config and report scene statistics");
  add_common(scene);
  scene->add_flag("--dry-run", dry_run, "Do not simulate (the only mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(common);
    if (compare->parsed()) return cmd_compare(common);
    return cmd_scene(common);
  } catch (const dem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dem::NumericalExplosion& e) {
    std::cerr << e.what() << '\n';
    return kExitExplosion;
  } catch (const dem::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}
