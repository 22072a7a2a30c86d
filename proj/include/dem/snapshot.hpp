#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dem/contact_forces.hpp"
#include "dem/core_state.hpp"

namespace dem {

// Binary particle snapshot, all integers and floats little-endian.
//
//   offset  size          field
//   0       4             magic "DEMS"
//   4       4   u32       version (1)
//   8       8   u64       count N
//   16      24N f64       position      (x, y, z per particle)
//           24N f64       velocity
//           24N f64       angular_velocity
//           8N  f64       radius
//           8N  f64       mass
//   -- resume block --
//           8   u64       step index
//           4N  u32       material id
//           8N  u64       particle id
//           8   u64       history entry count H
//           H x 41 bytes  u64 a, u64 b, u8 wall flag, f64 dx, dy, dz
//
// Particles are written in storage order; history entries are sorted by key.
// The resume block makes a loaded snapshot step bit-identically to the run it
// was taken from.
struct Snapshot {
  ParticleSet particles;
  TangentialHistory history;
  std::uint64_t step_index = 0;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<unsigned char> encode_snapshot(const Snapshot& s);

// Throws IoError on bad magic, unsupported version or truncated data.
Snapshot decode_snapshot(const std::vector<unsigned char>& bytes);

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

}  // namespace dem
