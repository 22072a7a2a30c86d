#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dem {

// Malformed or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite force or position during a step (CLI exit code 3).
class NumericalExplosion : public std::runtime_error {
 public:
  NumericalExplosion(std::uint64_t particle_id, std::uint64_t step, const std::string& what)
      : std::runtime_error("numerical explosion at step " + std::to_string(step) + ", particle " +
                           std::to_string(particle_id) + ": " + what),
        particle_id_(particle_id),
        step_(step) {}

  std::uint64_t particle_id() const { return particle_id_; }
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t particle_id_;
  std::uint64_t step_;
};

// Snapshot/report read or write failure (CLI exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contact geometry that cannot be evaluated: coincident centers, tunneled walls.
class GeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace dem
