#include "dem/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dem/errors.hpp"

namespace dem {

namespace {

// Portable [0, 1) double from the top 53 bits; std distributions differ
// between standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

Wall plate(const Vec3& center, const Vec3& normal, const Vec3& u, double half_u, const Vec3& v, double half_v) {
  Wall w;
  w.point = center;
  w.outward_normal = normal;
  w.extent = WallExtent{u, v, half_u, half_v};
  return w;
}

void add_box_slit(const RunConfig& c, Scene& scene) {
  const double r = c.radius;
  const double d = 2.0 * r;
  const SimConfig& sim = c.sim;
  for (int a = 0; a < 3; ++a) {
    if (!(c.box_max[a] > c.box_min[a])) throw ConfigError("box_max must exceed box_min on every axis");
    if (c.box_min[a] < sim.domain_min[a] || c.box_max[a] > sim.domain_max[a])
      throw ConfigError("box must lie inside the domain");
  }
  if (!(c.box_min.z > sim.domain_min.z + d)) throw ConfigError("box bottom must be at least one diameter above the floor");
  const double width_x = c.box_max.x - c.box_min.x;
  if (!(c.slit_width > d)) throw ConfigError("slit width must exceed the particle diameter");
  if (!(c.slit_width < width_x)) throw ConfigError("slit must be narrower than the box");
  if (!(c.lattice_spacing > 1.0)) throw ConfigError("lattice_spacing must exceed one diameter");
  if (!(2.0 * c.jitter < c.lattice_spacing - 1.0))
    throw ConfigError("jitter too large for the lattice spacing; particles could overlap");

  // Walls: floor and domain sides, box sides, and two bottom plates.
  scene.walls = domain_walls(sim);
  const Vec3 ex{1, 0, 0}, ey{0, 1, 0}, ez{0, 0, 1};
  const Vec3 mid = (c.box_min + c.box_max) * 0.5;
  const Vec3 half = (c.box_max - c.box_min) * 0.5;
  scene.walls.push_back(plate({c.box_min.x, mid.y, mid.z}, ex, ey, half.y, ez, half.z));
  scene.walls.push_back(plate({c.box_max.x, mid.y, mid.z}, -ex, ey, half.y, ez, half.z));
  scene.walls.push_back(plate({mid.x, c.box_min.y, mid.z}, ey, ex, half.x, ez, half.z));
  scene.walls.push_back(plate({mid.x, c.box_max.y, mid.z}, -ey, ex, half.x, ez, half.z));
  const double slit_lo = mid.x - 0.5 * c.slit_width;
  const double slit_hi = mid.x + 0.5 * c.slit_width;
  scene.walls.push_back(
      plate({0.5 * (c.box_min.x + slit_lo), mid.y, c.box_min.z}, ez, ex, 0.5 * (slit_lo - c.box_min.x), ey, half.y));
  scene.walls.push_back(
      plate({0.5 * (slit_hi + c.box_max.x), mid.y, c.box_min.z}, ez, ex, 0.5 * (c.box_max.x - slit_hi), ey, half.y));

  // Lattice sites, filled bottom layer first.
  const double s = c.lattice_spacing * d;
  const double margin = r + 0.5 * (s - d);
  const auto sites = [&](int a) {
    const double room = c.box_max[a] - c.box_min[a] - 2.0 * margin;
    return room < 0.0 ? std::int64_t{0} : static_cast<std::int64_t>(std::floor(room / s)) + 1;
  };
  const std::int64_t nx = sites(0), ny = sites(1), nz = sites(2);
  const auto capacity = static_cast<std::uint64_t>(nx * ny * nz);
  if (c.particle_count > capacity)
    throw ConfigError("box holds at most " + std::to_string(capacity) + " particles on the lattice, " +
                      std::to_string(c.particle_count) + " requested");

  std::mt19937_64 rng(c.seed);
  const double m = sphere_mass(r, c.density);
  const double jit = c.jitter * d;
  for (std::uint64_t n = 0; n < c.particle_count; ++n) {
    const auto layer = static_cast<std::int64_t>(n) / (nx * ny);
    const auto in_layer = static_cast<std::int64_t>(n) % (nx * ny);
    const Vec3 site{c.box_min.x + margin + static_cast<double>(in_layer % nx) * s,
                    c.box_min.y + margin + static_cast<double>(in_layer / nx) * s,
                    c.box_min.z + margin + static_cast<double>(layer) * s};
    const Vec3 offset{uniform(rng, -jit, jit), uniform(rng, -jit, jit), uniform(rng, -jit, jit)};
    scene.particles.add(site + offset, r, m);
  }
}

void add_random_gas(const RunConfig& c, Scene& scene) {
  const double r = c.radius;
  const double d = 2.0 * r;
  const SimConfig& sim = c.sim;
  const Vec3 lo = sim.domain_min + Vec3{r, r, r};
  const Vec3 hi = sim.domain_max - Vec3{r, r, r};
  for (int a = 0; a < 3; ++a) {
    if (!(hi[a] > lo[a])) throw ConfigError("domain too small for one particle");
  }
  std::mt19937_64 rng(c.seed);
  const double m = sphere_mass(r, c.density);
  const std::uint64_t max_attempts = 1000 * std::max<std::uint64_t>(c.particle_count, 1);
  std::uint64_t attempts = 0;
  while (scene.particles.count() < c.particle_count) {
    if (++attempts > max_attempts)
      throw ConfigError("could not place " + std::to_string(c.particle_count) + " non-overlapping particles");
    const Vec3 x{uniform(rng, lo.x, hi.x), uniform(rng, lo.y, hi.y), uniform(rng, lo.z, hi.z)};
    const bool clear = std::none_of(scene.particles.position.begin(), scene.particles.position.end(),
                                    [&](const Vec3& y) { return dot(x - y, x - y) <= d * d; });
    if (!clear) continue;
    const double u = c.gas_speed;
    const Vec3 v{uniform(rng, -u, u), uniform(rng, -u, u), uniform(rng, -u, u)};
    scene.particles.add(x, r, m, 0, v);
  }
  if (c.walls == WallSet::domain) scene.walls = domain_walls(sim);
}

void add_stack(const RunConfig& c, Scene& scene) {
  const double r = c.radius;
  const double s = c.lattice_spacing * 2.0 * r;
  const SimConfig& sim = c.sim;
  const Vec3 mid = (sim.domain_min + sim.domain_max) * 0.5;
  const double top = sim.domain_min.z + r + s * static_cast<double>(c.particle_count);
  if (c.particle_count > 0 && top - s > sim.domain_max.z - r)
    throw ConfigError("stack of " + std::to_string(c.particle_count) + " particles exceeds the domain height");
  const double m = sphere_mass(r, c.density);
  for (std::uint64_t n = 0; n < c.particle_count; ++n) {
    scene.particles.add({mid.x, mid.y, sim.domain_min.z + r + s * static_cast<double>(n)}, r, m);
  }
  if (c.walls == WallSet::domain) scene.walls = domain_walls(sim);
}

void add_two_body(const RunConfig& c, Scene& scene) {
  const double r = c.radius;
  const Vec3 mid = (c.sim.domain_min + c.sim.domain_max) * 0.5;
  const double m = sphere_mass(r, c.density);
  scene.particles.add(mid - Vec3{3.0 * r, 0, 0}, r, m, 0, {c.approach_speed, 0, 0});
  scene.particles.add(mid + Vec3{3.0 * r, 0, 0}, r, m);
}

}  // namespace

double sphere_mass(double radius, double density) {
  return density * 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

std::vector<Wall> domain_walls(const SimConfig& sim) {
  const Vec3& lo = sim.domain_min;
  const Vec3& hi = sim.domain_max;
  std::vector<Wall> walls(5);
  walls[0].point = lo;
  walls[0].outward_normal = {0, 0, 1};
  walls[1].point = lo;
  walls[1].outward_normal = {1, 0, 0};
  walls[2].point = hi;
  walls[2].outward_normal = {-1, 0, 0};
  walls[3].point = lo;
  walls[3].outward_normal = {0, 1, 0};
  walls[4].point = hi;
  walls[4].outward_normal = {0, -1, 0};
  return walls;
}

MaterialTable material_table(const RunConfig& config) {
  MaterialTable t(1);
  t.set(0, 0, config.material);
  return t;
}

Scene build_scene(const RunConfig& config) {
  Scene scene;
  switch (config.scene) {
    case SceneKind::box_slit: add_box_slit(config, scene); break;
    case SceneKind::random_gas: add_random_gas(config, scene); break;
    case SceneKind::stack: add_stack(config, scene); break;
    case SceneKind::two_body: add_two_body(config, scene); break;
  }
  return scene;
}

double min_pair_gap(const ParticleSet& p) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.count(); ++i) {
    for (std::size_t j = i + 1; j < p.count(); ++j) {
      gap = std::min(gap, norm(p.position[j] - p.position[i]) - p.radius[i] - p.radius[j]);
    }
  }
  return gap;
}

}  // namespace dem
