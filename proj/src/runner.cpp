#include "dem/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "dem/errors.hpp"
#include "dem/scene.hpp"
#include "dem/snapshot.hpp"

namespace dem {

namespace fs = std::filesystem;

const char* model_name(ContactModel m) { return m == ContactModel::simple ? "simple" : "practical"; }

StepRow summarize_step(const StepOutcome& outcome, std::size_t worker_count) {
  const StepStats& s = outcome.stats;
  StepRow row;
  row.step = outcome.step_index;
  row.max_displacement = outcome.max_displacement;
  row.candidates = s.total_candidates();
  row.contacts = s.total_contacts();
  row.max_candidates = s.max_candidates();
  row.max_contacts = s.max_contacts();
  row.sqrt_calls = s.sqrt_calls;
  row.norm_sqrt_calls = s.norm_sqrt_calls;
  row.branch_paths = s.branch_path_count;
  row.wall_checks = s.wall_checks;
  row.wall_contacts = s.wall_contacts;
  if (row.candidates > 0) row.divergence_ratio = divergence_ratio(s);
  const std::vector<std::uint64_t> work(s.candidates_checked.begin(), s.candidates_checked.end());
  row.imbalance = load_histogram(work, worker_count).imbalance;
  return row;
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

bool contained(const ParticleSet& p, const SimConfig& sim) {
  for (std::size_t i = 0; i < p.count(); ++i) {
    const Vec3& x = p.position[i];
    for (int a = 0; a < 3; ++a) {
      if (x[a] < sim.domain_min[a] - p.radius[i] || x[a] > sim.domain_max[a]) return false;
    }
  }
  return true;
}

std::string snapshot_name(std::uint64_t step) {
  std::ostringstream os;
  os << "snapshot_" << std::setw(8) << std::setfill('0') << step << ".dems";
  return os.str();
}

nlohmann::json report_json(const RunReport& r) {
  nlohmann::json j;
  j["model"] = model_name(r.model);
  j["particle_count"] = r.particle_count;
  j["worker_count"] = r.worker_count;
  j["total_steps"] = r.total_steps;
  j["wall_seconds"] = r.wall_seconds;
  j["throughput"] = r.throughput;
  j["termination_reason"] = r.termination_reason;
  j["initial_momentum"] = {r.initial_momentum.x, r.initial_momentum.y, r.initial_momentum.z};
  j["final_momentum"] = {r.final_momentum.x, r.final_momentum.y, r.final_momentum.z};
  j["momentum_drift"] = r.momentum_drift ? nlohmann::json(*r.momentum_drift) : nlohmann::json(nullptr);
  j["contained"] = r.contained;
  std::uint32_t max_contacts = 0;
  for (const StepRow& row : r.rows) max_contacts = std::max(max_contacts, row.max_contacts);
  j["max_contacts_per_particle"] = max_contacts;
  if (!r.rows.empty() && r.rows.back().divergence_ratio)
    j["final_divergence_ratio"] = *r.rows.back().divergence_ratio;
  else
    j["final_divergence_ratio"] = nullptr;
  return j;
}

}  // namespace

void write_steps_csv(const std::string& path, const std::vector<StepRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "step,max_displacement,candidates,contacts,max_candidates,max_contacts,sqrt_calls,norm_sqrt_calls,"
         "branch_paths,wall_checks,wall_contacts,divergence_ratio,imbalance\n";
  out << std::setprecision(17);
  for (const StepRow& r : rows) {
    out << r.step << ',' << r.max_displacement << ',' << r.candidates << ',' << r.contacts << ',' << r.max_candidates
        << ',' << r.max_contacts << ',' << r.sqrt_calls << ',' << r.norm_sqrt_calls << ',' << r.branch_paths << ','
        << r.wall_checks << ',' << r.wall_contacts << ',';
    if (r.divergence_ratio) out << *r.divergence_ratio;
    out << ',' << r.imbalance << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string summary_json(const RunReport& report) { return report_json(report).dump(2) + "\n"; }

std::string comparison_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["simple"] = report_json(report.simple);
  j["practical"] = report_json(report.practical);
  j["slowdown"] = report.slowdown ? nlohmann::json(*report.slowdown) : nlohmann::json(nullptr);
  return j.dump(2) + "\n";
}

RunReport run(const RunConfig& config, const RunOptions& options) {
  Scene scene = build_scene(config);
  const std::string out_dir = options.output_dir.empty() ? config.output_dir : options.output_dir;
  if (!out_dir.empty()) ensure_dir(out_dir);

  RunReport report;
  report.model = config.sim.model;
  report.particle_count = scene.particles.count();
  report.worker_count = options.workers;
  report.initial_momentum = total_momentum(scene.particles);

  Simulation sim(config.sim, material_table(config), std::move(scene.walls), std::move(scene.particles),
                 options.workers);

  using Clock = std::chrono::steady_clock;
  Clock::duration stepping{};
  if (config.sim.max_steps == 0) {
    report.termination_reason = "max_steps";
  }
  while (config.sim.max_steps > 0) {
    const auto t0 = Clock::now();
    const StepOutcome outcome = sim.step();
    stepping += Clock::now() - t0;

    report.rows.push_back(summarize_step(outcome, options.workers));
    if (options.observer) options.observer(sim, outcome);
    if (!out_dir.empty() && config.snapshot_every > 0 && outcome.step_index % config.snapshot_every == 0) {
      write_snapshot((fs::path(out_dir) / snapshot_name(outcome.step_index)).string(),
                     {sim.particles(), sim.history(), sim.step_index()});
    }
    if (termination_check(outcome, config.sim)) {
      report.termination_reason =
          outcome.max_displacement < config.sim.termination_eps ? "displacement_below_eps" : "max_steps";
      break;
    }
  }

  report.total_steps = sim.step_index();
  report.wall_seconds = std::chrono::duration<double>(stepping).count();
  if (report.wall_seconds > 0.0 && report.total_steps > 0) {
    report.throughput = static_cast<double>(report.particle_count) * static_cast<double>(report.total_steps) /
                        report.wall_seconds;
  }
  report.final_momentum = total_momentum(sim.particles());
  const double p0 = norm(report.initial_momentum);
  if (p0 > 0.0) report.momentum_drift = norm(report.final_momentum - report.initial_momentum) / p0;
  report.contained = contained(sim.particles(), config.sim);

  if (!out_dir.empty()) {
    write_steps_csv((fs::path(out_dir) / "steps.csv").string(), report.rows);
    write_text((fs::path(out_dir) / "summary.json").string(), summary_json(report));
    write_snapshot((fs::path(out_dir) / "final.dems").string(), {sim.particles(), sim.history(), sim.step_index()});
  }
  return report;
}

ComparisonReport compare_models(const RunConfig& config, const RunOptions& options) {
  const std::string out_dir = options.output_dir.empty() ? config.output_dir : options.output_dir;
  ComparisonReport out;

  RunConfig simple = config;
  simple.sim.model = ContactModel::simple;
  RunOptions simple_opts = options;
  simple_opts.output_dir = out_dir.empty() ? "" : (fs::path(out_dir) / "simple").string();
  simple.output_dir = simple_opts.output_dir;
  out.simple = run(simple, simple_opts);

  RunConfig practical = config;
  practical.sim.model = ContactModel::practical;
  RunOptions practical_opts = options;
  practical_opts.output_dir = out_dir.empty() ? "" : (fs::path(out_dir) / "practical").string();
  practical.output_dir = practical_opts.output_dir;
  out.practical = run(practical, practical_opts);

  if (out.simple.throughput > 0.0 && out.practical.throughput > 0.0)
    out.slowdown = out.simple.throughput / out.practical.throughput;
  if (!out_dir.empty()) write_text((fs::path(out_dir) / "comparison.json").string(), comparison_json(out));
  return out;
}

}  // namespace dem
