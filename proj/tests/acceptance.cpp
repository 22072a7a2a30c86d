// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dem/cell_grid.hpp"
#include "dem/config.hpp"
#include "dem/contact_forces.hpp"
#include "dem/integrator.hpp"
#include "dem/profiler.hpp"
#include "dem/runner.hpp"
#include "dem/scene.hpp"
#include "dem/snapshot.hpp"
#include "oracles.hpp"

using namespace dem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s  %2d  %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig benchmark_config() {
  RunConfig c = load_config(DEM_SOURCE_DIR "/configs/benchmark.cfg");
  c.output_dir.clear();
  return c;
}

Simulation make_simulation(const RunConfig& c, std::size_t workers) {
  Scene s = build_scene(c);
  return Simulation(c.sim, material_table(c), s.walls, s.particles, workers);
}

template <typename T>
std::string_view bytes_of(const std::vector<T>& v) {
  return {reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T)};
}

std::size_t state_hash(const ParticleSet& p) {
  std::size_t h = 0;
  for (const std::string_view b : {bytes_of(p.position), bytes_of(p.velocity), bytes_of(p.angular_velocity),
                                   bytes_of(p.id), bytes_of(p.accumulated_force), bytes_of(p.accumulated_torque)}) {
    h = h * 1000003u ^ std::hash<std::string_view>{}(b);
  }
  return h;
}

// ---------------------------------------------------------------------------

void oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> unit(0, 1), sym(-1, 1), rad(0.006, 0.01);
  const double side = 0.2;
  const double r_max = 0.01;
  std::size_t pairs_seen = 0;
  std::size_t mismatches = 0;

  for (int scene = 0; scene < 100; ++scene) {
    SimConfig c;
    c.dt = 1e-4;
    c.domain_max = {side, side, side};
    c.cell_edge = {2 * r_max, 2 * r_max, 2 * r_max};
    c.model = scene % 2 == 0 ? ContactModel::practical : ContactModel::simple;
    c.simple = {2e3, -1.0, -0.5};
    MaterialTable m(1);
    m.set(0, 0, {2e5, 4e5, 0.4, 0.5});

    ParticleSet p;
    for (int i = 0; i < 1000; ++i) {
      const double r = rad(rng);
      p.add({r + (side - 2 * r) * unit(rng), r + (side - 2 * r) * unit(rng), r + (side - 2 * r) * unit(rng)}, r,
            sphere_mass(r, 2500), 0, {0.5 * sym(rng), 0.5 * sym(rng), 0.5 * sym(rng)},
            {20 * sym(rng), 20 * sym(rng), 20 * sym(rng)});
    }
    Simulation sim(c, m, {}, p);

    for (int step = 0; step < 2; ++step) {
      const ParticleSet before = sim.particles();
      const TangentialHistory history = sim.history();
      const StepOutcome o = sim.step();
      const ParticleSet s = reorder_properties(before, sim.last_maps().sccm);
      const ParticleSet& after = sim.particles();
      std::set<ContactKey> oracle_pairs;

      // O(N^2): every other particle in ascending storage order.
      for (std::size_t i = 0; i < s.count(); ++i) {
        const BodyState self{s.position[i], s.velocity[i], s.angular_velocity[i], s.radius[i], s.mass[i]};
        Vec3 force, torque;
        std::uint32_t contacts = 0;
        for (std::size_t k = 0; k < s.count(); ++k) {
          if (k == i) continue;
          const ContactGeometry g = contact_geometry(self.x, s.position[k], self.r, s.radius[k]);
          if (!g.contact_exists) continue;
          ++contacts;
          if (c.model == ContactModel::simple) {
            force += simple_contact_force(g, self.v - s.velocity[k], c.simple);
            continue;
          }
          const BodyState other{s.position[k], s.velocity[k], s.angular_velocity[k], s.radius[k], s.mass[k]};
          const ContactKey key = ContactKey::particles(s.id[i], s.id[k]);
          const Vec3 stored = history.lookup(key);
          const PairForceResult r =
              practical_pair_force(g, self, other, m.at(0, 0), s.id[i] < s.id[k] ? stored : -stored, c.dt);
          force += r.force;
          torque += r.torque;
          oracle_pairs.insert(key);
        }
        pairs_seen += contacts;
        if (after.id[i] != s.id[i] || after.accumulated_force[i] != force || after.accumulated_torque[i] != torque ||
            o.stats.contacts_found[i] != contacts)
          ++mismatches;
      }
      if (c.model == ContactModel::practical) {
        std::set<ContactKey> grid_pairs;
        for (const auto& [key, delta] : sim.history().entries()) grid_pairs.insert(key);
        if (grid_pairs != oracle_pairs) ++mismatches;
      }
    }
  }
  const double t = seconds_since(t0);
  report(1, mismatches == 0 && pairs_seen > 0 && t < 60, "oracle equivalence",
         fmt("100 scenes x 1000 particles x 2 steps, %zu contacts, %zu mismatches, %.1f s (limit 60)", pairs_seen / 2,
             mismatches, t));
}

void sort_identities() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1002);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 10000)(rng);
    const CellIndex cells = std::uniform_int_distribution<CellIndex>(1, 5000)(rng);
    std::uniform_int_distribution<CellIndex> cell(0, cells - 1);
    std::vector<CellIndex> cm(n);
    for (auto& k : cm) k = cell(rng);
    const SortedMap s = sort_map(cm);
    bool ok = s.scm.size() == n && oracle::is_permutation(s.sccm);
    for (std::size_t j = 0; ok && j < n; ++j) ok = s.scm[j] == cm[s.sccm[j]];
    for (std::size_t j = 1; ok && j < n; ++j) {
      ok = s.scm[j - 1] < s.scm[j] || (s.scm[j - 1] == s.scm[j] && s.sccm[j - 1] < s.sccm[j]);
    }
    if (!ok) ++bad;
  }
  const double t = seconds_since(t0);
  report(2, bad == 0 && t < 10, "sort identities",
         fmt("1000 maps of length 0-10000, %zu failures, %.2f s (limit 10)", bad, t));
}

void friction_law() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> sym(-1, 1), unit(0, 1);
  std::size_t bad = 0;
  double worst_excess = -INFINITY;
  for (int t = 0; t < 100000; ++t) {
    const double ft_scale = std::pow(10.0, 6 * unit(rng) - 3);
    const double fn_scale = std::pow(10.0, 6 * unit(rng) - 3);
    const Vec3 f_t{ft_scale * sym(rng), ft_scale * sym(rng), ft_scale * sym(rng)};
    const Vec3 f_n{fn_scale * sym(rng), fn_scale * sym(rng), fn_scale * sym(rng)};
    const double mu = 2 * unit(rng);
    const Vec3 capped = friction_cap(f_t, f_n, mu);
    const double excess = norm(capped) - (mu * norm(f_n) + 1e-12);
    worst_excess = std::max(worst_excess, excess);
    const bool parallel = norm(cross(capped, f_t)) <= 1e-12 * norm(capped) * norm(f_t) && dot(capped, f_t) >= 0;
    if (excess > 0 || !parallel) ++bad;
  }
  const double t = seconds_since(t0);
  report(3, bad == 0 && t < 5, "friction law",
         fmt("1e5 inputs, %zu violations, max |Ft'| - (mu|Fn| + 1e-12) = %.3g, %.2f s (limit 5)", bad, worst_excess,
             t));
}

void third_law() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> sym(-1, 1), unit(0, 1);
  std::size_t bad = 0;
  double worst = 0;
  for (int t = 0; t < 10000; ++t) {
    const double ri = 0.005 + 0.01 * unit(rng);
    const double rj = 0.005 + 0.01 * unit(rng);
    Vec3 dir{sym(rng), sym(rng), sym(rng)};
    dir = dir / norm(dir);
    const double dist = (ri + rj) * (1 - 0.1 * unit(rng) - 1e-9);
    const BodyState i{{0, 0, 0}, {sym(rng), sym(rng), sym(rng)}, {20 * sym(rng), 20 * sym(rng), 20 * sym(rng)}, ri,
                      0.01 + unit(rng)};
    const BodyState j{dir * dist, {sym(rng), sym(rng), sym(rng)}, {20 * sym(rng), 20 * sym(rng), 20 * sym(rng)}, rj,
                      0.01 + unit(rng)};
    const PairMaterial m{1e5 + 1e6 * unit(rng), 1e5 + 1e6 * unit(rng), unit(rng), unit(rng)};
    const Vec3 delta{1e-5 * sym(rng), 1e-5 * sym(rng), 1e-5 * sym(rng)};
    const PairForceResult a = practical_pair_force(i, j, m, delta, 1e-4);
    const PairForceResult b = practical_pair_force(j, i, m, -delta, 1e-4);
    const double rel = norm(a.force + b.force) / norm(a.force);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-12)) ++bad;
  }
  const double t = seconds_since(t0);
  report(4, bad == 0 && t < 5, "third law",
         fmt("1e4 pairs, max |F_ij + F_ji| / |F_ij| = %.3g (limit 1e-12), %.2f s (limit 5)", worst, t));
}

double momentum_drift(ParticleSet p, std::uint64_t steps) {
  SimConfig c;
  c.dt = 1e-5;
  c.gravity = {};
  c.domain_max = {1, 1, 1};
  c.cell_edge = {0.04, 0.04, 0.04};
  MaterialTable m(1);
  m.set(0, 0, {2e5, 4e5, 0.5, 0.5});
  Simulation sim(c, m, {}, std::move(p));
  const Vec3 p0 = total_momentum(sim.particles());
  double worst = 0;
  for (std::uint64_t s = 0; s < steps; ++s) {
    sim.step();
    worst = std::max(worst, norm(total_momentum(sim.particles()) - p0) / norm(p0));
  }
  return worst;
}

void momentum_conservation() {
  const auto t0 = Clock::now();
  ParticleSet two;
  const double m = sphere_mass(0.02, 2500);
  two.add({0.45, 0.5, 0.5}, 0.02, m, 0, {0.8, 0.05, 0}, {0, 0, 3});
  two.add({0.52, 0.51, 0.5}, 0.02, m, 0, {-0.3, 0, 0.1});
  const double d2 = momentum_drift(two, 10000);

  // 100 bodies in a loose cluster with a net drift so |P0| is well away from zero.
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> pos(0.35, 0.65), sym(-1, 1);
  ParticleSet many;
  while (many.count() < 100) {
    const Vec3 x{pos(rng), pos(rng), pos(rng)};
    bool clear = true;
    for (const Vec3& y : many.position) clear = clear && norm(x - y) > 0.04;
    if (clear) many.add(x, 0.02, m, 0, {0.1 + 0.5 * sym(rng), 0.5 * sym(rng), 0.5 * sym(rng)});
  }
  // Pull everything toward the centre so collisions keep happening.
  for (std::size_t i = 0; i < many.count(); ++i) many.velocity[i] += (Vec3{0.5, 0.5, 0.5} - many.position[i]) * 3.0;
  const double d100 = momentum_drift(many, 10000);
  const double t = seconds_since(t0);
  report(5, d2 <= 1e-8 && d100 <= 1e-8 && t < 30, "momentum conservation",
         fmt("1e4 steps, max relative drift two-body %.3g, 100-body %.3g (limit 1e-8), %.1f s (limit 30)", d2, d100,
             t));
}

struct Bounce {
  double rebound_ratio = 0;
  int contact_steps = 0;
};

Bounce head_on(double alpha) {
  SimConfig c;
  c.dt = 1e-6;
  c.gravity = {};
  c.domain_max = {1, 1, 1};
  c.cell_edge = {0.04, 0.04, 0.04};
  MaterialTable m(1);
  m.set(0, 0, {0, 1e5, alpha, 0});
  const double v = 0.5;
  ParticleSet p;
  p.add({0.47, 0.5, 0.5}, 0.02, 0.01, 0, {v, 0, 0});
  p.add({0.53, 0.5, 0.5}, 0.02, 0.01, 0, {-v, 0, 0});
  Simulation sim(c, m, {}, p);
  Bounce b;
  for (int s = 0; s < 1000000; ++s) {
    const StepOutcome o = sim.step();
    if (o.stats.total_contacts() > 0) ++b.contact_steps;
    if (b.contact_steps > 0 && o.stats.total_contacts() == 0) break;
  }
  const ParticleSet& q = sim.particles();
  b.rebound_ratio = std::abs(q.velocity[1].x - q.velocity[0].x) / (2 * v);
  return b;
}

void restitution() {
  const auto t0 = Clock::now();
  const Bounce elastic = head_on(0.0);
  const Bounce damped = head_on(1.0);
  const double t = seconds_since(t0);
  report(6,
         elastic.contact_steps >= 100 && elastic.rebound_ratio >= 0.98 && damped.rebound_ratio < elastic.rebound_ratio &&
             t < 10,
         "restitution",
         fmt("alpha=0 returns %.4f of approach speed over %d contact steps; alpha=1 returns %.4f; %.2f s (limit 10)",
             elastic.rebound_ratio, elastic.contact_steps, damped.rebound_ratio, t));
}

void wall_limit() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1007);
  std::uniform_real_distribution<double> sym(-1, 1), unit(0.05, 0.95);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    Vec3 n{sym(rng), sym(rng), sym(rng)};
    n = n / norm(n);
    Wall wall;
    wall.point = {sym(rng), sym(rng), sym(rng)};
    wall.outward_normal = n;
    const double r = 0.005 + 0.01 * unit(rng);
    const double s = r * (1 - 0.2 * unit(rng));  // centre height above the plane
    // Random point on the plane, then lift by s.
    Vec3 a = cross(n, Vec3{1, 0, 0});
    if (norm(a) < 0.1) a = cross(n, Vec3{0, 1, 0});
    a = a / norm(a);
    const Vec3 foot = wall.point + a * sym(rng);
    const BodyState p{foot + n * s, {sym(rng), sym(rng), sym(rng)}, {10 * sym(rng), 10 * sym(rng), 10 * sym(rng)}, r,
                      0.01 * unit(rng)};
    const PairMaterial m{2e5 * unit(rng), 4e5 * unit(rng), unit(rng), unit(rng)};
    Vec3 old{1e-4 * sym(rng), 1e-4 * sym(rng), 1e-4 * sym(rng)};
    old = old - n * dot(old, n);
    const PairForceResult w = wall_pair_force(p, wall, m, old, 1e-4);
    const double big = 1e6 * r;
    const BodyState giant{foot - n * big, {}, {}, big, 1e18 * p.m};
    const PairForceResult g = practical_pair_force(p, giant, m, old, 1e-4);
    worst = std::max(worst, norm(w.force - g.force) / norm(g.force));
  }
  const double t = seconds_since(t0);
  report(7, worst <= 1e-3 && t < 5, "wall limit",
         fmt("100 configurations, max relative difference to R = 1e6 r particle %.3g (limit 1e-3), %.3f s", worst, t));
}

void packing_spot_value() {
  const double d = 0.02;
  const double err = std::abs(packing_capacity(d, d, d, d) - std::sqrt(2.0));
  report(8, err <= 1e-12, "packing capacity", fmt("|capacity(d,d,d,d) - sqrt 2| = %.3g (limit 1e-12)", err));
}

// ---------------------------------------------------------------------------
// Benchmark runs

struct BenchmarkTrace {
  std::vector<std::size_t> hashes;
  ParticleSet final_state;
  std::uint64_t steps = 0;
  double seconds = 0;
  std::uint32_t max_contacts = 0;
  double dense_min = INFINITY;
  double dense_max = -INFINITY;
  std::uint64_t dense_particles = 0;  // summed over the sampled steps
  Snapshot snapshot;                  // taken at snapshot_step
  ParticleSet after_snapshot;         // state one step later
  TangentialHistory history_after_snapshot;
};

constexpr std::uint64_t kDenseWindow = 100;
constexpr std::uint64_t kSnapshotStep = 3000;

BenchmarkTrace run_benchmark(std::size_t workers) {
  const RunConfig c = benchmark_config();
  const double d = 2 * c.radius;
  const double dense_threshold = 0.5 * candidate_bound(27, packing_capacity(d, d, d, d));
  const std::uint64_t dense_from = c.sim.max_steps > kDenseWindow ? c.sim.max_steps - kDenseWindow : 0;

  BenchmarkTrace trace;
  RunOptions o;
  o.workers = workers;
  o.observer = [&](const Simulation& sim, const StepOutcome& out) {
    trace.hashes.push_back(state_hash(sim.particles()));
    trace.max_contacts = std::max(trace.max_contacts, out.stats.max_contacts());
    if (out.step_index == kSnapshotStep) trace.snapshot = {sim.particles(), sim.history(), sim.step_index()};
    if (out.step_index == kSnapshotStep + 1) {
      trace.after_snapshot = sim.particles();
      trace.history_after_snapshot = sim.history();
    }
    if (workers == 1 && out.step_index > dense_from) {
      std::vector<char> mask(out.stats.candidates_checked.size());
      std::uint64_t selected = 0;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = out.stats.candidates_checked[i] >= dense_threshold;
        selected += mask[i];
      }
      if (selected == 0) return;
      trace.dense_particles += selected;
      const double ratio = divergence_ratio(out.stats, {reinterpret_cast<const bool*>(mask.data()), mask.size()});
      trace.dense_min = std::min(trace.dense_min, ratio);
      trace.dense_max = std::max(trace.dense_max, ratio);
    }
    if (termination_check(out, c.sim)) trace.final_state = sim.particles();
  };
  const RunReport r = run(c, o);
  trace.steps = r.total_steps;
  trace.seconds = r.wall_seconds;
  return trace;
}

BenchmarkTrace benchmark_criteria() {
  const auto t0 = Clock::now();
  const BenchmarkTrace serial = run_benchmark(1);
  const RunConfig c = benchmark_config();

  report(9, serial.max_contacts <= kKissingNumber && serial.steps == c.sim.max_steps, "kissing bound",
         fmt("box_slit, %zu particles, %llu steps, max contacts per particle per step %u (limit 12)",
             static_cast<std::size_t>(c.particle_count), static_cast<unsigned long long>(serial.steps),
             serial.max_contacts));

  report(10, serial.dense_particles > 0 && serial.dense_min >= 0.1 && serial.dense_max <= 0.5, "divergence band",
         fmt("last %llu steps, particles with at least half the candidate bound (%.2f) in view: ratio in [%.3f, %.3f] "
             "(band [0.1, 0.5]), %.0f particles per step",
             static_cast<unsigned long long>(kDenseWindow), 0.5 * candidate_bound(27, std::sqrt(2.0)),
             serial.dense_min, serial.dense_max,
             static_cast<double>(serial.dense_particles) / static_cast<double>(kDenseWindow)));

  // Determinism across worker counts.
  bool identical = true;
  std::string timings = fmt("1 worker %.1f s", serial.seconds);
  double t8 = 0;
  for (std::size_t w : {2u, 4u, 8u}) {
    const BenchmarkTrace t = run_benchmark(w);
    identical = identical && t.hashes == serial.hashes && oracle::same_state(t.final_state, serial.final_state);
    timings += fmt(", %zu workers %.1f s", w, t.seconds);
    if (w == 8) t8 = t.seconds;
  }
  const double total = seconds_since(t0);
  const unsigned hw = std::thread::hardware_concurrency();
  const double speedup = serial.seconds / t8;
  std::string speed_note;
  bool speed_ok = true;
  if (hw >= 8) {
    speed_ok = speedup >= 2.0;
    speed_note = fmt("speedup %.2f (limit 2)", speedup);
  } else {
    speed_note = fmt("speedup %.2f, not assessed on %u hardware thread(s)", speedup, hw);
  }
  report(11, identical && speed_ok && total < 600, "determinism and parallel speedup",
         fmt("%llu steps, workers {1,2,4,8} %s; %s; %s; %.0f s total (limit 600)",
             static_cast<unsigned long long>(serial.steps), identical ? "bitwise identical" : "DIFFER",
             timings.c_str(), speed_note.c_str(), total));

  return serial;
}

void snapshot_round_trip(const BenchmarkTrace& serial) {
  const RunConfig c = benchmark_config();
  const std::filesystem::path file = std::filesystem::temp_directory_path() / "dem_acceptance_snapshot.dems";
  write_snapshot(file.string(), serial.snapshot);
  Snapshot loaded = read_snapshot(file.string());
  std::filesystem::remove(file);
  Simulation resumed = make_simulation(c, 1);
  resumed.restore(std::move(loaded.particles), std::move(loaded.history), loaded.step_index);
  resumed.step();
  const bool same = oracle::same_state(resumed.particles(), serial.after_snapshot) &&
                    resumed.history().entries() == serial.history_after_snapshot.entries();
  report(13, same, "snapshot round trip",
         fmt("saved at step %llu, load and step once vs continue one step: %s",
             static_cast<unsigned long long>(kSnapshotStep), same ? "bitwise identical" : "DIFFER"));
}

void model_cost() {
  RunConfig c = benchmark_config();
  c.sim.max_steps = 1500;  // still packed in the box
  RunOptions o;
  o.workers = 1;
  const ComparisonReport r = compare_models(c, o);
  const bool ok = r.practical.throughput < r.simple.throughput;
  report(12, ok, "model cost direction",
         fmt("dense benchmark, %llu steps: simple %.0f, practical %.0f particle-steps/s (slowdown %.2f)",
             static_cast<unsigned long long>(c.sim.max_steps), r.simple.throughput, r.practical.throughput,
             r.slowdown.value_or(0.0)));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  oracle_equivalence();
  sort_identities();
  friction_law();
  third_law();
  momentum_conservation();
  restitution();
  wall_limit();
  packing_spot_value();
  const BenchmarkTrace serial = benchmark_criteria();
  model_cost();
  snapshot_round_trip(serial);
  std::printf("%d failing, %.0f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
