#include "dem/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dem/errors.hpp"

namespace dem {

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_little(v);
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void put_vec(const Vec3& v) {
    put(v.x);
    put(v.y);
    put(v.z);
  }
  std::vector<unsigned char> take() { return std::move(out_); }

 private:
  std::vector<unsigned char> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& in) : in_(in) {}

  template <typename T>
  T get() {
    if (in_.size() - pos_ < sizeof(T)) throw IoError("snapshot is truncated");
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  Vec3 get_vec() {
    const double x = get<double>();
    const double y = get<double>();
    const double z = get<double>();
    return {x, y, z};
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  const std::vector<unsigned char>& in_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[4] = {'D', 'E', 'M', 'S'};

}  // namespace

std::vector<unsigned char> encode_snapshot(const Snapshot& s) {
  const ParticleSet& p = s.particles;
  Writer w;
  for (char c : kMagic) w.put(static_cast<unsigned char>(c));
  w.put(kSnapshotVersion);
  w.put(static_cast<std::uint64_t>(p.count()));
  for (const Vec3& v : p.position) w.put_vec(v);
  for (const Vec3& v : p.velocity) w.put_vec(v);
  for (const Vec3& v : p.angular_velocity) w.put_vec(v);
  for (double v : p.radius) w.put(v);
  for (double v : p.mass) w.put(v);

  w.put(s.step_index);
  for (MaterialId m : p.material) w.put(m);
  for (ParticleId id : p.id) w.put(id);
  std::vector<std::pair<ContactKey, Vec3>> entries(s.history.entries().begin(), s.history.entries().end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  w.put(static_cast<std::uint64_t>(entries.size()));
  for (const auto& [key, delta] : entries) {
    w.put(key.a);
    w.put(key.b);
    w.put(static_cast<std::uint8_t>(key.wall ? 1 : 0));
    w.put_vec(delta);
  }
  return w.take();
}

Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.get<unsigned char>() != static_cast<unsigned char>(c)) throw IoError("not a snapshot (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kSnapshotVersion) throw IoError("unsupported snapshot version " + std::to_string(version));
  const auto n = r.get<std::uint64_t>();
  // Fixed per-particle payload: 11 doubles, one u32, one u64.
  if (n > r.remaining() / (11 * 8 + 4 + 8)) throw IoError("snapshot is truncated");

  Snapshot s;
  ParticleSet& p = s.particles;
  p.resize(n);
  for (auto& v : p.position) v = r.get_vec();
  for (auto& v : p.velocity) v = r.get_vec();
  for (auto& v : p.angular_velocity) v = r.get_vec();
  for (auto& v : p.radius) v = r.get<double>();
  for (auto& v : p.mass) v = r.get<double>();
  s.step_index = r.get<std::uint64_t>();
  for (auto& m : p.material) m = r.get<MaterialId>();
  for (auto& id : p.id) id = r.get<ParticleId>();
  const auto entries = r.get<std::uint64_t>();
  if (entries > r.remaining() / 41) throw IoError("snapshot is truncated");
  s.history.reserve(entries);
  for (std::uint64_t e = 0; e < entries; ++e) {
    ContactKey key;
    key.a = r.get<std::uint64_t>();
    key.b = r.get<std::uint64_t>();
    key.wall = r.get<std::uint8_t>() != 0;
    s.history.set(key, r.get_vec());
  }
  if (r.remaining() != 0) throw IoError("snapshot has trailing bytes");
  return s;
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  const std::vector<unsigned char> bytes = encode_snapshot(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace dem
