#pragma once

#include <cstdint>
#include <vector>

#include "dem/config.hpp"
#include "dem/core_state.hpp"

namespace dem {

struct Scene {
  ParticleSet particles;
  std::vector<Wall> walls;
};

// Builds the initial particles and walls for config.scene.
//   box_slit   - jittered lattice inside an elevated box whose bottom is two
//                plates flanking a centred slit; floor and domain side walls
//   two_body   - two particles on a head-on course along x, no walls
//   random_gas - uniform random non-overlapping placement, random velocities
//   stack      - vertical column resting above the floor
// Throws ConfigError for geometry that cannot hold the requested particles.
Scene build_scene(const RunConfig& config);

// One material for everything, taken from config.material.
MaterialTable material_table(const RunConfig& config);

// Unbounded walls on the floor and four sides of the domain.
std::vector<Wall> domain_walls(const SimConfig& sim);

// Smallest surface gap between any two particles (negative when they
// overlap); +inf with fewer than two particles. O(N^2).
double min_pair_gap(const ParticleSet& p);

double sphere_mass(double radius, double density);

}  // namespace dem
