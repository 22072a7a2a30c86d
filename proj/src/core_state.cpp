#include "dem/core_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace dem {

void ParticleSet::resize(std::size_t n) {
  position.resize(n);
  velocity.resize(n);
  angular_velocity.resize(n);
  radius.resize(n);
  mass.resize(n);
  material.resize(n);
  id.resize(n);
  accumulated_force.resize(n);
  accumulated_torque.resize(n);
}

void ParticleSet::add(const Vec3& x, double r, double m, MaterialId mat, const Vec3& v,
                      const Vec3& w) {
  id.push_back(position.size());
  position.push_back(x);
  velocity.push_back(v);
  angular_velocity.push_back(w);
  radius.push_back(r);
  mass.push_back(m);
  material.push_back(mat);
  accumulated_force.push_back({});
  accumulated_torque.push_back({});
}

bool ParticleSet::lengths_consistent() const {
  const std::size_t n = position.size();
  return velocity.size() == n && angular_velocity.size() == n && radius.size() == n &&
         mass.size() == n && material.size() == n && id.size() == n &&
         accumulated_force.size() == n && accumulated_torque.size() == n;
}

void ParticleSet::validate() const {
  if (!lengths_consistent()) throw std::invalid_argument("particle property arrays differ in length");
  for (std::size_t i = 0; i < count(); ++i) {
    if (!(radius[i] > 0.0) || !std::isfinite(radius[i]))
      throw std::invalid_argument("particle " + std::to_string(i) + " has non-positive radius");
    if (!(mass[i] > 0.0) || !std::isfinite(mass[i]))
      throw std::invalid_argument("particle " + std::to_string(i) + " has non-positive mass");
  }
}

MaterialTable::MaterialTable(std::size_t material_count)
    : n_(material_count), entries_(material_count * material_count) {
  if (material_count == 0) throw std::invalid_argument("material table needs at least one material");
}

void MaterialTable::set(MaterialId i, MaterialId j, const PairMaterial& p) {
  if (i >= n_ || j >= n_) throw std::out_of_range("material id out of range");
  entries_[i * n_ + j] = p;
  entries_[j * n_ + i] = p;
}

void MaterialTable::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const PairMaterial& p = entries_[i * n_ + j];
      if (!(p == entries_[j * n_ + i])) throw std::invalid_argument("material table is not symmetric");
      for (double v : {p.c_k_t, p.c_k_n, p.alpha, p.mu}) {
        if (!std::isfinite(v) || v < 0.0)
          throw std::invalid_argument("material parameters must be finite and non-negative");
      }
    }
  }
}

GridDims SimConfig::grid_dims() const {
  const Vec3 extent = domain_max - domain_min;
  return {static_cast<std::int64_t>(std::floor(extent.x / cell_edge.x)),
          static_cast<std::int64_t>(std::floor(extent.y / cell_edge.y)),
          static_cast<std::int64_t>(std::floor(extent.z / cell_edge.z))};
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!is_finite(gravity)) throw std::invalid_argument("gravity must be finite");
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(domain_min[a]) || !std::isfinite(domain_max[a]) || !(domain_max[a] > domain_min[a]))
      throw std::invalid_argument("domain_max must exceed domain_min on every axis");
    if (!(cell_edge[a] > 0.0) || !std::isfinite(cell_edge[a]))
      throw std::invalid_argument("cell_edge must be positive on every axis");
  }
  const GridDims g = grid_dims();
  if (g.nx < 3 || g.ny < 3 || g.nz < 3)
    throw std::invalid_argument("grid needs at least 3 cells along every axis");
  if (!(termination_eps >= 0.0)) throw std::invalid_argument("termination_eps must be non-negative");
  if (!(simple.k_sp >= 0.0) || !std::isfinite(simple.k_da) || !std::isfinite(simple.k_sh))
    throw std::invalid_argument("simple-model constants must be finite and k_sp non-negative");
}

void Wall::validate() const {
  if (!is_finite(point)) throw std::invalid_argument("wall point must be finite");
  if (std::abs(norm(outward_normal) - 1.0) > 1e-12)
    throw std::invalid_argument("wall normal must be a unit vector");
  if (extent) {
    const WallExtent& e = *extent;
    if (std::abs(norm(e.u) - 1.0) > 1e-12 || std::abs(norm(e.v) - 1.0) > 1e-12)
      throw std::invalid_argument("wall extent axes must be unit vectors");
    if (std::abs(dot(e.u, outward_normal)) > 1e-12 || std::abs(dot(e.v, outward_normal)) > 1e-12 ||
        std::abs(dot(e.u, e.v)) > 1e-12)
      throw std::invalid_argument("wall extent axes must be orthogonal to each other and the normal");
    if (!(e.half_u > 0.0) || !(e.half_v > 0.0))
      throw std::invalid_argument("wall extent half-lengths must be positive");
  }
}

ParticleBuffers::ParticleBuffers(ParticleSet initial) { reset_previous(std::move(initial)); }

void ParticleBuffers::reset_previous(ParticleSet p) {
  if (!p.lengths_consistent()) throw std::invalid_argument("particle property arrays differ in length");
  prev_ = std::move(p);
  next_.resize(prev_.count());
  written_.assign(prev_.count(), 0);
}

bool ParticleBuffers::fully_written() const {
  return std::all_of(written_.begin(), written_.end(), [](unsigned char w) { return w != 0; });
}

void ParticleBuffers::swap_buffers() {
  // A partial write set means some particle would carry stale state forward.
  // An untouched next buffer is a plain exchange.
  const auto n_written = std::count(written_.begin(), written_.end(), 1);
  if (n_written != 0 && static_cast<std::size_t>(n_written) != written_.size())
    throw std::logic_error("swap_buffers: next buffer written for " + std::to_string(n_written) +
                           " of " + std::to_string(written_.size()) + " particles");
  std::swap(prev_, next_);
  std::fill(next_.accumulated_force.begin(), next_.accumulated_force.end(), Vec3{});
  std::fill(next_.accumulated_torque.begin(), next_.accumulated_torque.end(), Vec3{});
  std::fill(written_.begin(), written_.end(), 0);
}

}  // namespace dem
