#include "dem/integrator.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

#include "dem/errors.hpp"

namespace dem {

BodyState integrate_particle(const BodyState& p, const Vec3& force, const Vec3& torque, double dt,
                             const Vec3& gravity) {
  BodyState out = p;
  out.v = p.v + (force / p.m + gravity) * dt;
  out.x = p.x + out.v * dt;
  out.w = p.w + torque / sphere_inertia(p.m, p.r) * dt;
  return out;
}

bool termination_check(const StepOutcome& outcome, const SimConfig& config) {
  return outcome.max_displacement < config.termination_eps || outcome.step_index >= config.max_steps;
}

Simulation::Simulation(SimConfig config, MaterialTable materials, std::vector<Wall> walls, ParticleSet initial,
                       std::size_t worker_count, Detection detection)
    : config_(std::move(config)),
      materials_(std::move(materials)),
      walls_(std::move(walls)),
      engine_(worker_count),
      detection_(detection) {
  config_.validate();
  materials_.validate();
  for (const Wall& w : walls_) {
    w.validate();
    if (w.material >= materials_.material_count()) throw std::invalid_argument("wall material out of range");
  }
  initial.validate();
  for (MaterialId m : initial.material) {
    if (m >= materials_.material_count()) throw std::invalid_argument("particle material out of range");
  }
  dims_ = config_.grid_dims();
  buffers_.reset_previous(std::move(initial));
}

void Simulation::restore(ParticleSet particles, TangentialHistory history, std::uint64_t step_index) {
  particles.validate();
  buffers_.reset_previous(std::move(particles));
  history_ = std::move(history);
  step_index_ = step_index;
  maps_ = {};
}

void Simulation::poison_next_buffer() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Vec3 bad{nan, nan, nan};
  ParticleSet& next = buffers_.next();
  std::fill(next.position.begin(), next.position.end(), bad);
  std::fill(next.velocity.begin(), next.velocity.end(), bad);
  std::fill(next.angular_velocity.begin(), next.angular_velocity.end(), bad);
  std::fill(next.radius.begin(), next.radius.end(), nan);
  std::fill(next.mass.begin(), next.mass.end(), nan);
  std::fill(next.accumulated_force.begin(), next.accumulated_force.end(), bad);
  std::fill(next.accumulated_torque.begin(), next.accumulated_torque.end(), bad);
}

void Simulation::particle_phase(std::size_t i, Scratch& s, std::vector<std::uint32_t>& candidates,
                                std::vector<std::uint32_t>& contacts) {
  const ParticleSet& prev = buffers_.previous();
  const bool practical = config_.model == ContactModel::practical;
  const BodyState self{prev.position[i], prev.velocity[i], prev.angular_velocity[i], prev.radius[i], prev.mass[i]};
  const ParticleId self_id = prev.id[i];
  const MaterialId self_mat = prev.material[i];

  SqrtTally tally;
  Vec3 force;
  Vec3 torque;
  std::uint32_t n_candidates = 0;
  std::uint32_t n_contacts = 0;

  const auto visit = [&](std::size_t k) {
    ++n_candidates;
    const ContactGeometry geom = contact_geometry(self.x, prev.position[k], self.r, prev.radius[k], &tally);
    if (!geom.contact_exists) {
      s.counters.observe(BranchPath::no_contact);
      return;
    }
    ++n_contacts;
    if (!practical) {
      force += simple_contact_force(geom, self.v - prev.velocity[k], config_.simple);
      s.counters.observe(BranchPath::contact);
      return;
    }
    const BodyState other{prev.position[k], prev.velocity[k], prev.angular_velocity[k], prev.radius[k],
                          prev.mass[k]};
    const ParticleId other_id = prev.id[k];
    const ContactKey key = ContactKey::particles(self_id, other_id);
    // Stored displacement belongs to the lower id; the other side sees its negation.
    const Vec3 stored = history_.lookup(key);
    const Vec3 delta_old = self_id < other_id ? stored : -stored;
    const PairForceResult r =
        practical_pair_force(geom, self, other, materials_.at(self_mat, prev.material[k]), delta_old, config_.dt, &tally);
    force += r.force;
    torque += r.torque;
    if (self_id < other_id) s.history.emplace_back(key, r.new_delta_t);
    s.counters.observe(r.slipping ? BranchPath::contact_slipping : BranchPath::contact);
  };

  if (detection_ == Detection::grid) {
    for_each_candidate(i, maps_, dims_, visit);
  } else {
    for (std::size_t k = 0; k < prev.count(); ++k) {
      if (k != i) visit(k);
    }
  }

  for (std::size_t w = 0; w < walls_.size(); ++w) {
    ++s.counters.wall_checks;
    const ContactGeometry geom = wall_contact_geometry(self.x, self.r, walls_[w]);
    if (!geom.contact_exists) continue;
    ++s.counters.wall_contacts;
    if (!practical) {
      force += simple_contact_force(geom, self.v, config_.simple);
      continue;
    }
    const ContactKey key = ContactKey::particle_wall(self_id, w);
    const PairForceResult r = wall_pair_force(geom, self, materials_.at(self_mat, walls_[w].material),
                                              history_.lookup(key), config_.dt, &tally);
    force += r.force;
    torque += r.torque;
    s.history.emplace_back(key, r.new_delta_t);
  }

  const BodyState moved = integrate_particle(self, force, torque, config_.dt, config_.gravity);
  if (!is_finite(force) || !is_finite(torque) || !is_finite(moved.x) || !is_finite(moved.v) || !is_finite(moved.w))
    throw NumericalExplosion(self_id, step_index_ + 1, "non-finite force or state");

  ParticleSet& next = buffers_.next();
  next.position[i] = moved.x;
  next.velocity[i] = moved.v;
  next.angular_velocity[i] = moved.w;
  next.radius[i] = self.r;
  next.mass[i] = self.m;
  next.material[i] = self_mat;
  next.id[i] = self_id;
  next.accumulated_force[i] = force;
  next.accumulated_torque[i] = torque;
  buffers_.mark_written(i);

  s.max_displacement = std::max(s.max_displacement, norm(moved.x - self.x));
  s.counters.coefficient_sqrts += tally.coefficient;
  s.counters.norm_sqrts += tally.norm;
  candidates[i] = n_candidates;
  contacts[i] = n_contacts;
}

StepOutcome Simulation::step() {
  const std::size_t n = buffers_.count();
  StepOutcome outcome;
  if (n == 0) {
    outcome.step_index = ++step_index_;
    return outcome;
  }

  maps_ = build_grid_maps(buffers_.previous(), config_);
  buffers_.reset_previous(reorder_properties(buffers_.previous(), maps_.sccm));

  std::vector<std::uint32_t> candidates(n, 0);
  std::vector<std::uint32_t> contacts(n, 0);
  std::vector<Scratch> scratch;
  try {
    scratch = engine_.for_particles<Scratch>(
        n, [&](std::size_t i, Scratch& s) { particle_phase(i, s, candidates, contacts); });
  } catch (const PhaseError& e) {
    try {
      std::rethrow_exception(e.cause());
    } catch (const NumericalExplosion&) {
      throw;
    } catch (const std::exception& cause) {
      throw NumericalExplosion(buffers_.previous().id[e.index()], step_index_ + 1, cause.what());
    }
  }

  // Single-threaded merge in worker order. Only contacts seen this step
  // survive, which prunes separated pairs.
  std::vector<WorkerCounters> counters;
  counters.reserve(scratch.size());
  std::size_t n_history = 0;
  for (const Scratch& s : scratch) n_history += s.history.size();
  TangentialHistory merged;
  merged.reserve(n_history);
  for (const Scratch& s : scratch) {
    counters.push_back(s.counters);
    outcome.max_displacement = std::max(outcome.max_displacement, s.max_displacement);
    for (const auto& [key, delta] : s.history) merged.set(key, delta);
  }
  history_ = std::move(merged);

  buffers_.swap_buffers();
  outcome.step_index = ++step_index_;
  outcome.stats = record_step(counters, std::move(candidates), std::move(contacts));
  return outcome;
}

Vec3 total_momentum(const ParticleSet& p) {
  Vec3 sum;
  for (std::size_t i = 0; i < p.count(); ++i) sum += p.mass[i] * p.velocity[i];
  return sum;
}

double kinetic_energy(const ParticleSet& p) {
  double e = 0.0;
  for (std::size_t i = 0; i < p.count(); ++i) {
    e += 0.5 * p.mass[i] * dot(p.velocity[i], p.velocity[i]);
    e += 0.5 * sphere_inertia(p.mass[i], p.radius[i]) * dot(p.angular_velocity[i], p.angular_velocity[i]);
  }
  return e;
}

}  // namespace dem
