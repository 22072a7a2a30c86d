#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dem {

// Outcome of one candidate evaluation inside the force loop. Threads of a
// lockstep group that take different outcomes serialise.
enum class BranchPath : std::uint32_t {
  no_contact = 0,
  contact = 1,
  contact_slipping = 2,  // friction cap engaged
};

// Counters one worker accumulates over its particle range.
struct WorkerCounters {
  std::uint64_t coefficient_sqrts = 0;
  std::uint64_t norm_sqrts = 0;
  std::uint64_t wall_checks = 0;
  std::uint64_t wall_contacts = 0;
  std::uint32_t path_mask = 0;

  void observe(BranchPath p) { path_mask |= 1u << static_cast<std::uint32_t>(p); }
};

// Per-step divergence metrics. Per-particle arrays follow the sorted order
// used during the step.
struct StepStats {
  std::vector<std::uint32_t> candidates_checked;
  std::vector<std::uint32_t> contacts_found;
  std::uint64_t sqrt_calls = 0;       // coefficient roots only
  std::uint64_t norm_sqrt_calls = 0;  // vector norms
  std::uint32_t branch_path_count = 0;
  std::uint64_t wall_checks = 0;
  std::uint64_t wall_contacts = 0;

  std::uint64_t total_candidates() const;
  std::uint64_t total_contacts() const;
  std::uint32_t max_contacts() const;
  std::uint32_t max_candidates() const;
};

// Merges worker counters in ascending worker order.
StepStats record_step(std::span<const WorkerCounters> workers, std::vector<std::uint32_t> candidates_checked,
                      std::vector<std::uint32_t> contacts_found);

// Closest-packed equal spheres of diameter d per L_x*L_y*L_z cell:
// (L_x/d)(L_y/(sqrt(3)d/2))(L_z/(sqrt(2/3)d)) = sqrt(2) L_x L_y L_z / d^3.
double packing_capacity(double l_x, double l_y, double l_z, double d);

// Upper estimate of candidates per particle: cells searched times per-cell capacity.
double candidate_bound(std::int64_t cells_searched, double capacity);

// Fraction of candidate checks that found a contact. Throws std::domain_error
// when nothing was checked.
double divergence_ratio(const StepStats& stats);

// Same ratio restricted to the particles selected by `mask`.
double divergence_ratio(const StepStats& stats, std::span<const bool> mask);

// Lockstep speedup limit when M distinct paths serialise within a group.
double speedup_bound(std::int64_t distinct_paths, std::int64_t warp_width);

// Equal spheres that can touch one sphere simultaneously.
inline constexpr std::uint32_t kKissingNumber = 12;

}  // namespace dem
