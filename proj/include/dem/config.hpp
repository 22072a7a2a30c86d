#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dem/core_state.hpp"

namespace dem {

enum class SceneKind { box_slit, random_gas, two_body, stack };
enum class WallSet { none, domain };

// Everything a run needs. Parsed from a flat `key = value` file; vectors are
// comma-separated triples and `#` starts a comment.
struct RunConfig {
  SimConfig sim;
  bool cell_edge_from_file = false;  // otherwise the particle diameter

  SceneKind scene = SceneKind::box_slit;
  std::uint64_t particle_count = 0;
  std::uint64_t seed = 1;
  std::string output_dir;
  std::uint64_t snapshot_every = 0;  // 0 disables periodic snapshots

  PairMaterial material;  // particle-particle and particle-wall
  double radius = 0.01;    // [m]
  double density = 2500.0; // [kg/m^3]

  // box_slit
  Vec3 box_min;
  Vec3 box_max;
  double slit_width = 0.0;        // [m], centred in x, spans the box in y
  double lattice_spacing = 1.05;  // centre spacing in diameters
  double jitter = 0.02;           // max per-axis offset in diameters

  double approach_speed = 1.0;  // two_body [m/s]
  double gas_speed = 0.0;       // random_gas, per-component bound [m/s]
  WallSet walls = WallSet::domain;
};

// Throws ConfigError on syntax errors, unknown or duplicate keys, and values
// that violate their ranges. Keys not present keep the RunConfig defaults.
RunConfig parse_config(std::string_view text);

// Throws IoError when the file cannot be read.
RunConfig load_config(const std::string& path);

// Scales the box_slit scene to 2^17 particles: box, slit and domain lengths
// (measured from domain_min) grow by the cube root of the count ratio.
void scale_to_full(RunConfig& config);

inline constexpr std::uint64_t kFullParticleCount = 131072;

}  // namespace dem
