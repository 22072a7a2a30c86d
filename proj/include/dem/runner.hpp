#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dem/config.hpp"
#include "dem/integrator.hpp"

namespace dem {

// Aggregated per-step statistics, one CSV row each.
struct StepRow {
  std::uint64_t step = 0;
  double max_displacement = 0.0;
  std::uint64_t candidates = 0;
  std::uint64_t contacts = 0;
  std::uint32_t max_candidates = 0;
  std::uint32_t max_contacts = 0;
  std::uint64_t sqrt_calls = 0;
  std::uint64_t norm_sqrt_calls = 0;
  std::uint32_t branch_paths = 0;
  std::uint64_t wall_checks = 0;
  std::uint64_t wall_contacts = 0;
  std::optional<double> divergence_ratio;  // empty when nothing was checked
  double imbalance = 1.0;                  // candidate load across workers
};

StepRow summarize_step(const StepOutcome& outcome, std::size_t worker_count);

struct RunReport {
  ContactModel model = ContactModel::practical;
  std::uint64_t particle_count = 0;
  std::size_t worker_count = 1;
  std::uint64_t total_steps = 0;
  double wall_seconds = 0.0;  // stepping only, excludes file output
  double throughput = 0.0;    // particle-steps per wall-second; 0 when nothing ran
  std::string termination_reason;
  std::vector<StepRow> rows;
  Vec3 initial_momentum;
  Vec3 final_momentum;
  std::optional<double> momentum_drift;  // |dP| / |P0|, empty when P0 = 0
  bool contained = true;                 // all particles inside the domain, above floor - r
};

struct RunOptions {
  std::size_t workers = 1;
  std::string output_dir;  // overrides config.output_dir when non-empty
  // Called after every step, between barriers.
  std::function<void(const Simulation&, const StepOutcome&)> observer;
};

// Builds the scene, steps until termination_check fires and writes
// steps.csv, summary.json and snapshots into the output directory (if any).
// Throws NumericalExplosion, IoError or ConfigError.
RunReport run(const RunConfig& config, const RunOptions& options);

struct ComparisonReport {
  RunReport simple;
  RunReport practical;
  std::optional<double> slowdown;  // simple throughput / practical throughput
};

// Same scene under both contact models. Outputs go to <dir>/simple and
// <dir>/practical.
ComparisonReport compare_models(const RunConfig& config, const RunOptions& options);

void write_steps_csv(const std::string& path, const std::vector<StepRow>& rows);
std::string summary_json(const RunReport& report);
std::string comparison_json(const ComparisonReport& report);

const char* model_name(ContactModel m);

}  // namespace dem
