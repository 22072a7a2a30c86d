#include "dem/cell_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dem {

namespace {

std::int64_t clamped_floor(double t, std::int64_t n) {
  if (!(t >= 0.0)) return 0;
  if (t >= static_cast<double>(n)) return n - 1;
  return std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(t)), n - 1);
}

template <typename T>
std::vector<T> gather(const std::vector<T>& src, std::span<const std::size_t> order) {
  std::vector<T> out(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) out[j] = src[order[j]];
  return out;
}

}  // namespace

CellTriple cell_triple(const Vec3& position, const SimConfig& config) {
  if (!is_finite(position)) throw std::invalid_argument("cell_index: non-finite position");
  const GridDims g = config.grid_dims();
  const Vec3 rel = position - config.domain_min;
  return {clamped_floor(rel.x / config.cell_edge.x, g.nx), clamped_floor(rel.y / config.cell_edge.y, g.ny),
          clamped_floor(rel.z / config.cell_edge.z, g.nz)};
}

CellIndex cell_index(const Vec3& position, const SimConfig& config) {
  return linearize(cell_triple(position, config), config.grid_dims());
}

std::vector<CellIndex> build_correspondence_map(const ParticleSet& particles, const SimConfig& config) {
  std::vector<CellIndex> cm(particles.count());
  for (std::size_t j = 0; j < cm.size(); ++j) cm[j] = cell_index(particles.position[j], config);
  return cm;
}

SortedMap sort_map(std::span<const CellIndex> cm) {
  SortedMap out;
  out.sccm.resize(cm.size());
  std::iota(out.sccm.begin(), out.sccm.end(), std::size_t{0});
  std::stable_sort(out.sccm.begin(), out.sccm.end(),
                   [&](std::size_t a, std::size_t b) { return cm[a] < cm[b]; });
  out.scm.resize(cm.size());
  for (std::size_t j = 0; j < cm.size(); ++j) out.scm[j] = cm[out.sccm[j]];
  return out;
}

ParticleSet reorder_properties(const ParticleSet& particles, std::span<const std::size_t> sccm) {
  const std::size_t n = particles.count();
  if (sccm.size() != n) throw std::invalid_argument("reorder_properties: permutation length mismatch");
  std::vector<unsigned char> seen(n, 0);
  for (std::size_t s : sccm) {
    if (s >= n || seen[s]) throw std::invalid_argument("reorder_properties: SCCM is not a permutation");
    seen[s] = 1;
  }

  ParticleSet out;
  out.position = gather(particles.position, sccm);
  out.velocity = gather(particles.velocity, sccm);
  out.angular_velocity = gather(particles.angular_velocity, sccm);
  out.radius = gather(particles.radius, sccm);
  out.mass = gather(particles.mass, sccm);
  out.material = gather(particles.material, sccm);
  out.id = gather(particles.id, sccm);
  out.accumulated_force = gather(particles.accumulated_force, sccm);
  out.accumulated_torque = gather(particles.accumulated_torque, sccm);
  return out;
}

CellRanges cell_ranges(std::span<const CellIndex> scm, std::int64_t cell_count) {
  const auto cells = static_cast<std::size_t>(cell_count);
  CellRanges r;
  r.start.assign(cells, 0);
  r.end.assign(cells, 0);
  for (std::size_t j = 0; j < scm.size(); ++j) {
    if (scm[j] < 0 || scm[j] >= cell_count)
      throw std::invalid_argument("cell_ranges: cell index " + std::to_string(scm[j]) + " out of range");
    if (j > 0 && scm[j] < scm[j - 1]) throw std::invalid_argument("cell_ranges: SCM is not sorted");
  }
  // Empty cells get an empty range positioned where they would sort.
  std::size_t j = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    r.start[c] = j;
    while (j < scm.size() && static_cast<std::size_t>(scm[j]) == c) ++j;
    r.end[c] = j;
  }
  return r;
}

NeighborCells neighbor_cells(const CellTriple& cell, const GridDims& dims) {
  NeighborCells out;
  // k outermost so indices come out ascending.
  for (std::int64_t n = cell.k - 1; n <= cell.k + 1; ++n) {
    if (n < 0 || n >= dims.nz) continue;
    for (std::int64_t m = cell.j - 1; m <= cell.j + 1; ++m) {
      if (m < 0 || m >= dims.ny) continue;
      for (std::int64_t l = cell.i - 1; l <= cell.i + 1; ++l) {
        if (l < 0 || l >= dims.nx) continue;
        out.cells[out.size++] = linearize({l, m, n}, dims);
      }
    }
  }
  return out;
}

std::vector<std::size_t> candidate_particles(std::size_t j, const GridMaps& maps, const GridDims& dims) {
  std::vector<std::size_t> out;
  for_each_candidate(j, maps, dims, [&](std::size_t k) { out.push_back(k); });
  return out;
}

GridMaps build_grid_maps(const ParticleSet& particles, const SimConfig& config) {
  GridMaps maps;
  maps.cm = build_correspondence_map(particles, config);
  SortedMap sorted = sort_map(maps.cm);
  maps.scm = std::move(sorted.scm);
  maps.sccm = std::move(sorted.sccm);
  CellRanges ranges = cell_ranges(maps.scm, config.grid_dims().cell_count());
  maps.cell_start = std::move(ranges.start);
  maps.cell_end = std::move(ranges.end);
  return maps;
}

}  // namespace dem
