#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dem/cell_grid.hpp"
#include "dem/contact_forces.hpp"
#include "dem/core_state.hpp"
#include "dem/parallel_engine.hpp"
#include "dem/profiler.hpp"

namespace dem {

struct StepOutcome {
  double max_displacement = 0.0;  // max_i |x'_i - x_i| over the step [m]
  std::uint64_t step_index = 0;   // steps completed, including this one
  StepStats stats;
};

// Semi-implicit Euler with solid-sphere inertia:
// v' = v + (F/m + g) dt, x' = x + v' dt, w' = w + T/I dt.
BodyState integrate_particle(const BodyState& p, const Vec3& force, const Vec3& torque, double dt,
                             const Vec3& gravity);

// True once the largest per-step displacement drops strictly below
// termination_eps or max_steps steps have been taken.
bool termination_check(const StepOutcome& outcome, const SimConfig& config);

// How contact candidates are found. brute_force visits every other particle
// in ascending sorted order; it exists as an oracle for the grid.
enum class Detection { grid, brute_force };

class Simulation {
 public:
  Simulation(SimConfig config, MaterialTable materials, std::vector<Wall> walls, ParticleSet initial,
             std::size_t worker_count = 1, Detection detection = Detection::grid);

  // One time step: rebuild and sort the cell map, reorder properties, then in
  // parallel gather candidates, accumulate pair and wall forces and integrate
  // each particle into the next buffer; merge history and stats; swap.
  // Throws NumericalExplosion for non-finite state or broken contact geometry.
  StepOutcome step();

  // Current state (the previous buffer between steps). Storage order is the
  // sorted order of the last completed step.
  const ParticleSet& particles() const { return buffers_.previous(); }
  const TangentialHistory& history() const { return history_; }
  const GridMaps& last_maps() const { return maps_; }
  std::uint64_t step_index() const { return step_index_; }

  const SimConfig& config() const { return config_; }
  const MaterialTable& materials() const { return materials_; }
  const std::vector<Wall>& walls() const { return walls_; }
  std::size_t worker_count() const { return engine_.worker_count(); }

  // Restores a saved state (snapshot load).
  void restore(ParticleSet particles, TangentialHistory history, std::uint64_t step_index);

  // Fills every property of the next buffer with NaN. A correct step never
  // reads it, so results are unaffected; used to check the buffer contract.
  void poison_next_buffer();

 private:
  struct Scratch {
    WorkerCounters counters;
    std::vector<std::pair<ContactKey, Vec3>> history;
    double max_displacement = 0.0;
  };

  void particle_phase(std::size_t i, Scratch& s, std::vector<std::uint32_t>& candidates,
                      std::vector<std::uint32_t>& contacts);

  SimConfig config_;
  MaterialTable materials_;
  std::vector<Wall> walls_;
  GridDims dims_;
  ParticleBuffers buffers_;
  TangentialHistory history_;
  GridMaps maps_;
  ParallelEngine engine_;
  Detection detection_;
  std::uint64_t step_index_ = 0;
};

Vec3 total_momentum(const ParticleSet& p);
double kinetic_energy(const ParticleSet& p);  // translational + rotational

}  // namespace dem
