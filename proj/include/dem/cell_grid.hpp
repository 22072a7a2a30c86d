#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dem/core_state.hpp"

namespace dem {

using CellIndex = std::int64_t;

struct CellTriple {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;
  friend bool operator==(const CellTriple&, const CellTriple&) = default;
};

inline CellIndex linearize(const CellTriple& c, const GridDims& g) { return c.i + g.nx * (c.j + g.ny * c.k); }

inline CellTriple delinearize(CellIndex c, const GridDims& g) {
  return {c % g.nx, (c / g.nx) % g.ny, c / (g.nx * g.ny)};
}

// Cell containing `position`; coordinates outside the domain clamp to the
// boundary layer. Throws std::invalid_argument for non-finite positions.
CellTriple cell_triple(const Vec3& position, const SimConfig& config);
CellIndex cell_index(const Vec3& position, const SimConfig& config);

// CM[j] = cell of particle j.
std::vector<CellIndex> build_correspondence_map(const ParticleSet& particles, const SimConfig& config);

struct SortedMap {
  std::vector<CellIndex> scm;     // CM sorted ascending
  std::vector<std::size_t> sccm;  // scm[j] == cm[sccm[j]]
};

// Stable: equal cells keep ascending original index.
SortedMap sort_map(std::span<const CellIndex> cm);

// P_sorted[j] = P[sccm[j]] for every property. Throws std::invalid_argument if
// sccm is not a permutation of 0..count-1.
ParticleSet reorder_properties(const ParticleSet& particles, std::span<const std::size_t> sccm);

struct CellRanges {
  std::vector<std::size_t> start;
  std::vector<std::size_t> end;
};

// Half-open [start[k], end[k]) slice of `scm` holding cell k. Throws
// std::invalid_argument if scm is unsorted or references a cell >= cell_count.
CellRanges cell_ranges(std::span<const CellIndex> scm, std::int64_t cell_count);

struct GridMaps {
  std::vector<CellIndex> cm;
  std::vector<CellIndex> scm;
  std::vector<std::size_t> sccm;
  std::vector<std::size_t> cell_start;
  std::vector<std::size_t> cell_end;
};

// Up to 27 in-bounds cells around a cell, in ascending linear index.
struct NeighborCells {
  std::array<CellIndex, 27> cells{};
  std::size_t size = 0;

  const CellIndex* begin() const { return cells.data(); }
  const CellIndex* end() const { return cells.data() + size; }
};

NeighborCells neighbor_cells(const CellTriple& cell, const GridDims& dims);

// Calls fn(k) for every sorted index k != j sharing a neighbor cell with the
// particle at sorted index j, in ascending order of k. `maps.scm[j]` is the
// cell of sorted particle j.
template <typename Fn>
void for_each_candidate(std::size_t j, const GridMaps& maps, const GridDims& dims, Fn&& fn) {
  // The three cells of an x-row are consecutive, so their particles form one
  // contiguous sorted range. Visiting rows with k outermost keeps k ascending.
  const CellTriple c = delinearize(maps.scm[j], dims);
  const std::int64_t l0 = c.i > 0 ? c.i - 1 : 0;
  const std::int64_t l1 = c.i + 1 < dims.nx ? c.i + 1 : dims.nx - 1;
  for (std::int64_t n = c.k - 1; n <= c.k + 1; ++n) {
    if (n < 0 || n >= dims.nz) continue;
    for (std::int64_t m = c.j - 1; m <= c.j + 1; ++m) {
      if (m < 0 || m >= dims.ny) continue;
      const std::size_t start = maps.cell_start[static_cast<std::size_t>(linearize({l0, m, n}, dims))];
      const std::size_t stop = maps.cell_end[static_cast<std::size_t>(linearize({l1, m, n}, dims))];
      for (std::size_t k = start; k < stop; ++k) {
        if (k != j) fn(k);
      }
    }
  }
}

std::vector<std::size_t> candidate_particles(std::size_t j, const GridMaps& maps, const GridDims& dims);

// Rebuilds the maps for `particles` and returns them. Used with
// reorder_properties, this is steps 2 to 4 of a time step.
GridMaps build_grid_maps(const ParticleSet& particles, const SimConfig& config);

}  // namespace dem
