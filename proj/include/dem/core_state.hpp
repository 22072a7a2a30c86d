#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dem/vec3.hpp"

namespace dem {

using MaterialId = std::uint32_t;
using ParticleId = std::uint64_t;

// Structure-of-arrays particle state. Index order is the storage order, which
// changes every step when properties are reordered along the cell map; `id`
// is the stable identity of each particle across reorderings.
struct ParticleSet {
  std::vector<Vec3> position;          // [m]
  std::vector<Vec3> velocity;          // [m/s]
  std::vector<Vec3> angular_velocity;  // [rad/s]
  std::vector<double> radius;          // [m]
  std::vector<double> mass;            // [kg]
  std::vector<MaterialId> material;
  std::vector<ParticleId> id;
  std::vector<Vec3> accumulated_force;   // [N]
  std::vector<Vec3> accumulated_torque;  // [N m]

  std::size_t count() const { return position.size(); }

  void resize(std::size_t n);

  // Appends a particle at rest with zeroed accumulators; id defaults to its index.
  void add(const Vec3& x, double r, double m, MaterialId mat = 0, const Vec3& v = {},
           const Vec3& w = {});

  bool lengths_consistent() const;

  // Throws std::invalid_argument on length mismatch or non-positive radius/mass.
  void validate() const;
};

// Solid-sphere moment of inertia.
inline double sphere_inertia(double mass, double radius) { return 0.4 * mass * radius * radius; }

struct PairMaterial {
  double c_k_t = 0.0;  // tangential spring parameter
  double c_k_n = 0.0;  // normal spring parameter
  double alpha = 0.0;  // restitution (damping) parameter
  double mu = 0.0;     // kinetic friction coefficient

  friend bool operator==(const PairMaterial&, const PairMaterial&) = default;
};

// Contact parameters keyed by material pair, stored as a dense symmetric matrix.
class MaterialTable {
 public:
  explicit MaterialTable(std::size_t material_count = 1);

  std::size_t material_count() const { return n_; }

  // Sets (i, j) and (j, i).
  void set(MaterialId i, MaterialId j, const PairMaterial& p);

  const PairMaterial& at(MaterialId i, MaterialId j) const { return entries_[i * n_ + j]; }

  // Throws std::invalid_argument when asymmetric, non-finite or negative.
  void validate() const;

 private:
  std::size_t n_;
  std::vector<PairMaterial> entries_;
};

enum class ContactModel { simple, practical };

struct SimpleConstants {
  double k_sp = 0.0;  // spring
  double k_da = 0.0;  // damping, multiplies v_i - v_j
  double k_sh = 0.0;  // shear, multiplies the tangential relative velocity
};

struct GridDims {
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::int64_t nz = 0;

  std::int64_t cell_count() const { return nx * ny * nz; }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

struct SimConfig {
  double dt = 1e-4;
  Vec3 gravity{0.0, 0.0, -9.81};
  Vec3 domain_min{0.0, 0.0, 0.0};
  Vec3 domain_max{1.0, 1.0, 1.0};
  Vec3 cell_edge{0.1, 0.1, 0.1};
  double termination_eps = 0.0;
  std::uint64_t max_steps = 0;
  ContactModel model = ContactModel::practical;
  SimpleConstants simple;

  // floor((domain_max - domain_min) / cell_edge) per axis.
  GridDims grid_dims() const;

  // Throws std::invalid_argument when any invariant fails, including a grid
  // smaller than 3 cells along an axis.
  void validate() const;
};

// In-plane rectangle limiting a wall to a finite plate. `u` and `v` are unit
// vectors orthogonal to the wall normal; the plate is centred on Wall::point.
struct WallExtent {
  Vec3 u;
  Vec3 v;
  double half_u = 0.0;
  double half_v = 0.0;
};

// A wall behaves as a static particle of infinite radius. Without an extent it
// is a one-sided half-space; with an extent it is a two-sided thin plate.
struct Wall {
  Vec3 point;
  Vec3 outward_normal{0.0, 0.0, 1.0};
  MaterialId material = 0;
  std::optional<WallExtent> extent;

  void validate() const;
};

// Previous/next pair of particle buffers. A step reads `previous()` only and
// writes each index of `next()` exactly once, marking it with mark_written().
class ParticleBuffers {
 public:
  ParticleBuffers() = default;
  explicit ParticleBuffers(ParticleSet initial);

  const ParticleSet& previous() const { return prev_; }
  ParticleSet& next() { return next_; }
  const ParticleSet& next() const { return next_; }

  std::size_t count() const { return prev_.count(); }

  // Replaces the previous buffer between steps (property reordering, snapshot
  // load). Resizes the next buffer to match and clears the write set.
  void reset_previous(ParticleSet p);

  // Distinct indices may be marked concurrently.
  void mark_written(std::size_t i) { written_[i] = 1; }
  bool fully_written() const;

  // Promotes the next buffer to previous and zeroes the accumulators of the
  // new next buffer. Throws std::logic_error if some index was not written.
  void swap_buffers();

 private:
  ParticleSet prev_;
  ParticleSet next_;
  std::vector<unsigned char> written_;
};

}  // namespace dem
