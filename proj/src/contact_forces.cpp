#include "dem/contact_forces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dem/errors.hpp"

namespace dem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double counted_sqrt(double x, std::uint64_t SqrtTally::*field, SqrtTally* tally) {
  if (tally) ++(tally->*field);
  return std::sqrt(x);
}

}  // namespace

ContactGeometry contact_geometry(const Vec3& x_i, const Vec3& x_j, double r_i, double r_j, SqrtTally* tally) {
  const Vec3 d = x_j - x_i;
  const double dist = counted_sqrt(dot(d, d), &SqrtTally::norm, tally);
  if (dist == 0.0) throw GeometryError("contact_geometry: coincident particle centers");
  ContactGeometry g;
  g.n = d / dist;
  g.overlap = std::max(0.0, r_i + r_j - dist);
  g.contact_exists = g.overlap > 0.0;
  return g;
}

Vec3 simple_contact_force(const ContactGeometry& geom, const Vec3& v_rel, const SimpleConstants& c) {
  const Vec3 delta_n = -geom.overlap * geom.n;
  const Vec3 v_t = v_rel - dot(v_rel, geom.n) * geom.n;
  return c.k_sp * delta_n + c.k_da * v_rel + c.k_sh * v_t;
}

Stiffness stiffness_coeffs(const PairMaterial& mat, double r_i, double r_j, double overlap, SqrtTally* tally) {
  // Both coefficients share the same root.
  const double root = counted_sqrt(overlap / (1.0 / r_i + 1.0 / r_j), &SqrtTally::coefficient, tally);
  return {mat.c_k_t * root, mat.c_k_n * root};
}

double damping_coeff(double alpha, double k_n, double m_i, double m_j, SqrtTally* tally) {
  return alpha * counted_sqrt(k_n / (1.0 / m_i + 1.0 / m_j), &SqrtTally::coefficient, tally);
}

Vec3 tangential_velocity(const Vec3& v_i, const Vec3& v_j, const Vec3& w_i, const Vec3& w_j, double r_i,
                         double r_j, const Vec3& n) {
  const Vec3 v = v_i - v_j;
  return v - dot(v, n) * n + cross(r_i * w_i + r_j * w_j, n);
}

Vec3 update_tangential_displacement(const Vec3& delta_t_old, const Vec3& n, const Vec3& v_t, double dt) {
  return delta_t_old - dot(delta_t_old, n) * n + v_t * dt;
}

Vec3 friction_cap(const Vec3& f_t, const Vec3& f_n, double mu, SqrtTally* tally) {
  const double ft = counted_sqrt(dot(f_t, f_t), &SqrtTally::norm, tally);
  const double limit = mu * counted_sqrt(dot(f_n, f_n), &SqrtTally::norm, tally);
  if (ft > limit) return (limit / ft) * f_t;
  return f_t;
}

namespace {

// Shared body of the particle and wall paths. v_t is precomputed because the
// wall drops the r_j w_j term.
PairForceResult practical_core(const ContactGeometry& geom, const Vec3& v, const Vec3& v_t, double r_i,
                               double r_j, double m_i, double m_j, const PairMaterial& mat,
                               const Vec3& delta_t_old, double dt, SqrtTally* tally) {
  const Stiffness k = stiffness_coeffs(mat, r_i, r_j, geom.overlap, tally);
  const double eta = damping_coeff(mat.alpha, k.k_n, m_i, m_j, tally);
  const Vec3& n = geom.n;

  const Vec3 v_n = dot(v, n) * n;
  const Vec3 delta_t = update_tangential_displacement(delta_t_old, n, v_t, dt);

  // Compression along n pushes i away from j.
  const Vec3 f_n = -k.k_n * geom.overlap * n - eta * v_n;
  const Vec3 f_t_spring = -k.k_t * delta_t - eta * v_t;
  const Vec3 f_t = friction_cap(f_t_spring, f_n, mat.mu, tally);

  PairForceResult out;
  out.force = f_t + f_n;
  out.torque = r_i * cross(n, f_t);
  out.slipping = !(f_t == f_t_spring);
  // While sliding, keep only the spring extension the capped force can hold.
  out.new_delta_t = out.slipping && k.k_t > 0.0 ? -(f_t + eta * v_t) / k.k_t : delta_t;
  return out;
}

}  // namespace

PairForceResult practical_pair_force(const ContactGeometry& geom, const BodyState& i, const BodyState& j,
                                     const PairMaterial& mat, const Vec3& delta_t_old, double dt,
                                     SqrtTally* tally) {
  const Vec3 v = i.v - j.v;
  const Vec3 v_t = tangential_velocity(i.v, j.v, i.w, j.w, i.r, j.r, geom.n);
  return practical_core(geom, v, v_t, i.r, j.r, i.m, j.m, mat, delta_t_old, dt, tally);
}

PairForceResult practical_pair_force(const BodyState& i, const BodyState& j, const PairMaterial& mat,
                                     const Vec3& delta_t_old, double dt, SqrtTally* tally) {
  const ContactGeometry geom = contact_geometry(i.x, j.x, i.r, j.r, tally);
  if (!geom.contact_exists) throw GeometryError("practical_pair_force: particles are not in contact");
  return practical_pair_force(geom, i, j, mat, delta_t_old, dt, tally);
}

ContactGeometry wall_contact_geometry(const Vec3& x, double r, const Wall& wall) {
  const Vec3 rel = x - wall.point;
  const double s = dot(rel, wall.outward_normal);
  ContactGeometry g;

  if (!wall.extent) {
    if (s < -r) throw GeometryError("wall_contact_geometry: particle tunneled through wall");
    g.n = -wall.outward_normal;
    g.overlap = std::max(0.0, r - s);
    g.contact_exists = g.overlap > 0.0;
    return g;
  }

  // The distance to a plate is at least the distance to its plane.
  if (std::abs(s) >= r) return g;
  const WallExtent& e = *wall.extent;
  const double a = dot(rel, e.u);
  const double b = dot(rel, e.v);
  if (std::abs(a) <= e.half_u && std::abs(b) <= e.half_v) {
    // Face region: the plate acts as a plane on whichever side x lies.
    if (s == 0.0) throw GeometryError("wall_contact_geometry: particle center lies on a wall plate");
    g.n = s > 0.0 ? -wall.outward_normal : wall.outward_normal;
    g.overlap = std::max(0.0, r - std::abs(s));
    g.contact_exists = g.overlap > 0.0;
    return g;
  }

  // Edge or corner region: nearest point on the rectangle boundary.
  const Vec3 closest = wall.point + std::clamp(a, -e.half_u, e.half_u) * e.u + std::clamp(b, -e.half_v, e.half_v) * e.v;
  const Vec3 d = closest - x;
  const double dist = norm(d);
  if (dist == 0.0) throw GeometryError("wall_contact_geometry: particle center lies on a plate edge");
  g.n = d / dist;
  g.overlap = std::max(0.0, r - dist);
  g.contact_exists = g.overlap > 0.0;
  return g;
}

PairForceResult wall_pair_force(const ContactGeometry& geom, const BodyState& p, const PairMaterial& mat,
                                const Vec3& delta_t_old, double dt, SqrtTally* tally) {
  // Rigid static surface: the r_j w_j term is defined as zero.
  const Vec3 v_t = tangential_velocity(p.v, {}, p.w, {}, p.r, 0.0, geom.n);
  return practical_core(geom, p.v, v_t, p.r, kInf, p.m, kInf, mat, delta_t_old, dt, tally);
}

PairForceResult wall_pair_force(const BodyState& p, const Wall& wall, const PairMaterial& mat,
                                const Vec3& delta_t_old, double dt, SqrtTally* tally) {
  const ContactGeometry geom = wall_contact_geometry(p.x, p.r, wall);
  if (!geom.contact_exists) return {{}, {}, {}};
  return wall_pair_force(geom, p, mat, delta_t_old, dt, tally);
}

TangentialHistory history_prune(const TangentialHistory& history, std::span<const ContactKey> contacts) {
  TangentialHistory out;
  out.reserve(contacts.size());
  for (const ContactKey& key : contacts) out.set(key, history.lookup(key));
  return out;
}

}  // namespace dem
