#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>

#include "dem/core_state.hpp"

namespace dem {

// Square-root evaluations, split the way the profiler reports them: the two
// stiffness/damping coefficient roots versus vector norms.
struct SqrtTally {
  std::uint64_t coefficient = 0;
  std::uint64_t norm = 0;
};

struct ContactGeometry {
  Vec3 n;                // unit vector from i toward j
  double overlap = 0.0;  // r_i + r_j - |x_j - x_i|, clamped at 0
  bool contact_exists = false;
};

// Throws GeometryError for coincident centers.
ContactGeometry contact_geometry(const Vec3& x_i, const Vec3& x_j, double r_i, double r_j,
                                 SqrtTally* tally = nullptr);

// Simple spring/damper/shear model. Force on i; no torque, no history.
Vec3 simple_contact_force(const ContactGeometry& geom, const Vec3& v_rel, const SimpleConstants& c);

struct Stiffness {
  double k_t = 0.0;
  double k_n = 0.0;
};

// C_k * sqrt(overlap / (1/r_i + 1/r_j)); r_j may be +inf (wall). One root.
Stiffness stiffness_coeffs(const PairMaterial& mat, double r_i, double r_j, double overlap,
                           SqrtTally* tally = nullptr);

// alpha * sqrt(k_n / (1/m_i + 1/m_j)); m_j may be +inf (wall). One root.
double damping_coeff(double alpha, double k_n, double m_i, double m_j, SqrtTally* tally = nullptr);

// v - (v.n)n + (r_i w_i + r_j w_j) x n with v = v_i - v_j.
Vec3 tangential_velocity(const Vec3& v_i, const Vec3& v_j, const Vec3& w_i, const Vec3& w_j, double r_i,
                         double r_j, const Vec3& n);

// Rotates the stored displacement into the current tangent plane and adds v_t dt.
Vec3 update_tangential_displacement(const Vec3& delta_t_old, const Vec3& n, const Vec3& v_t, double dt);

// Coulomb limit: rescales F_t to length mu|F_n| when it exceeds it.
Vec3 friction_cap(const Vec3& f_t, const Vec3& f_n, double mu, SqrtTally* tally = nullptr);

struct PairForceResult {
  Vec3 force;        // on particle i
  Vec3 torque;       // on particle i
  Vec3 new_delta_t;  // tangential displacement in i's frame
  bool slipping = false;  // friction cap engaged
};

struct BodyState {
  Vec3 x;
  Vec3 v;
  Vec3 w;
  double r = 0.0;
  double m = 0.0;
};

// Practical model on a precomputed contact. delta_t_old is in i's frame (the
// negation of j's).
PairForceResult practical_pair_force(const ContactGeometry& geom, const BodyState& i, const BodyState& j,
                                     const PairMaterial& mat, const Vec3& delta_t_old, double dt,
                                     SqrtTally* tally = nullptr);

// Convenience overload computing the geometry. Throws GeometryError if the
// pair is not in contact or the centers coincide.
PairForceResult practical_pair_force(const BodyState& i, const BodyState& j, const PairMaterial& mat,
                                     const Vec3& delta_t_old, double dt, SqrtTally* tally = nullptr);

// Contact between a particle and a wall, as seen from the particle: n points
// from the particle toward the wall surface. Unbounded walls throw
// GeometryError when the particle is entirely behind the plane; plates throw
// when the center lies on the plate.
ContactGeometry wall_contact_geometry(const Vec3& x, double r, const Wall& wall);

// Practical model against a static wall: r_j = m_j = inf, v_j = w_j = 0.
PairForceResult wall_pair_force(const ContactGeometry& geom, const BodyState& p, const PairMaterial& mat,
                                const Vec3& delta_t_old, double dt, SqrtTally* tally = nullptr);

PairForceResult wall_pair_force(const BodyState& p, const Wall& wall, const PairMaterial& mat,
                                const Vec3& delta_t_old, double dt, SqrtTally* tally = nullptr);

// Unordered contact key. Particle pairs store (min id, max id); wall contacts
// store (particle id, wall index) with the wall flag set.
struct ContactKey {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  bool wall = false;

  static ContactKey particles(ParticleId p, ParticleId q) {
    return p < q ? ContactKey{p, q, false} : ContactKey{q, p, false};
  }
  static ContactKey particle_wall(ParticleId p, std::size_t wall_index) { return {p, wall_index, true}; }

  friend bool operator==(const ContactKey&, const ContactKey&) = default;
  friend auto operator<=>(const ContactKey&, const ContactKey&) = default;
};

struct ContactKeyHash {
  std::size_t operator()(const ContactKey& k) const noexcept {
    std::uint64_t h = k.a * 0x9E3779B97F4A7C15ull;
    h ^= (k.b + (k.wall ? 0x632BE59BD9B4E019ull : 0ull)) + 0x7F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Stored tangential displacement per contact, in the frame of the lower-id
// particle (always the particle for wall contacts).
class TangentialHistory {
 public:
  using Map = std::unordered_map<ContactKey, Vec3, ContactKeyHash>;

  // Zero when the contact is new.
  Vec3 lookup(const ContactKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? Vec3{} : it->second;
  }

  void set(const ContactKey& key, const Vec3& delta) { entries_[key] = delta; }
  bool contains(const ContactKey& key) const { return entries_.count(key) != 0; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  void clear() { entries_.clear(); }
  void reserve(std::size_t n) { entries_.reserve(n); }

  const Map& entries() const { return entries_; }

 private:
  Map entries_;
};

// Keeps entries for persisting contacts verbatim, zero-initialises new ones
// and drops the rest.
TangentialHistory history_prune(const TangentialHistory& history, std::span<const ContactKey> contacts);

}  // namespace dem
