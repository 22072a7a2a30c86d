#include "dem/profiler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dem {

std::uint64_t StepStats::total_candidates() const {
  return std::accumulate(candidates_checked.begin(), candidates_checked.end(), std::uint64_t{0});
}

std::uint64_t StepStats::total_contacts() const {
  return std::accumulate(contacts_found.begin(), contacts_found.end(), std::uint64_t{0});
}

std::uint32_t StepStats::max_contacts() const {
  return contacts_found.empty() ? 0 : *std::max_element(contacts_found.begin(), contacts_found.end());
}

std::uint32_t StepStats::max_candidates() const {
  return candidates_checked.empty() ? 0 : *std::max_element(candidates_checked.begin(), candidates_checked.end());
}

StepStats record_step(std::span<const WorkerCounters> workers, std::vector<std::uint32_t> candidates_checked,
                      std::vector<std::uint32_t> contacts_found) {
  if (candidates_checked.size() != contacts_found.size())
    throw std::invalid_argument("record_step: per-particle counter arrays differ in length");
  StepStats s;
  s.candidates_checked = std::move(candidates_checked);
  s.contacts_found = std::move(contacts_found);
  std::uint32_t mask = 0;
  for (const WorkerCounters& w : workers) {
    s.sqrt_calls += w.coefficient_sqrts;
    s.norm_sqrt_calls += w.norm_sqrts;
    s.wall_checks += w.wall_checks;
    s.wall_contacts += w.wall_contacts;
    mask |= w.path_mask;
  }
  s.branch_path_count = static_cast<std::uint32_t>(std::popcount(mask));
  return s;
}

double packing_capacity(double l_x, double l_y, double l_z, double d) {
  if (!(l_x > 0.0 && l_y > 0.0 && l_z > 0.0 && d > 0.0))
    throw std::invalid_argument("packing_capacity: arguments must be positive");
  return std::sqrt(2.0) * l_x * l_y * l_z / (d * d * d);
}

double candidate_bound(std::int64_t cells_searched, double capacity) {
  if (cells_searched < 1) throw std::invalid_argument("candidate_bound: at least one cell must be searched");
  return static_cast<double>(cells_searched) * capacity;
}

double divergence_ratio(const StepStats& stats) {
  const std::uint64_t checked = stats.total_candidates();
  if (checked == 0) throw std::domain_error("divergence_ratio: no candidates were checked");
  return static_cast<double>(stats.total_contacts()) / static_cast<double>(checked);
}

double divergence_ratio(const StepStats& stats, std::span<const bool> mask) {
  if (mask.size() != stats.candidates_checked.size())
    throw std::invalid_argument("divergence_ratio: mask length mismatch");
  std::uint64_t checked = 0;
  std::uint64_t found = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    checked += stats.candidates_checked[i];
    found += stats.contacts_found[i];
  }
  if (checked == 0) throw std::domain_error("divergence_ratio: no candidates were checked");
  return static_cast<double>(found) / static_cast<double>(checked);
}

double speedup_bound(std::int64_t distinct_paths, std::int64_t warp_width) {
  if (distinct_paths < 1 || warp_width < distinct_paths)
    throw std::invalid_argument("speedup_bound: need 1 <= paths <= warp width");
  return static_cast<double>(warp_width) / static_cast<double>(distinct_paths);
}

}  // namespace dem
