#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include "dem/errors.hpp"
#include "dem/integrator.hpp"
#include "dem/parallel_engine.hpp"
#include "oracles.hpp"

using namespace dem;

TEST_CASE("contiguous partitions are disjoint and cover the range") {
  for (std::size_t n : {0u, 1u, 7u, 1000u}) {
    for (std::size_t w : {1u, 2u, 3u, 8u}) {
      const ExecutionPlan p = ExecutionPlan::contiguous(n, w);
      REQUIRE(p.partition.size() == w);
      std::size_t expect = 0;
      for (const IndexRange& r : p.partition) {
        CHECK(r.begin == expect);
        expect = r.end;
      }
      CHECK(expect == n);
    }
  }
  CHECK_THROWS_AS(ExecutionPlan::contiguous(10, 0), std::invalid_argument);
}

TEST_CASE("every index runs exactly once") {
  for (std::size_t w : {1u, 2u, 4u, 8u}) {
    ParallelEngine e(w);
    std::vector<std::atomic<int>> hits(1000);
    const auto scratch = e.for_particles<std::size_t>(hits.size(), [&](std::size_t i, std::size_t& s) {
      hits[i].fetch_add(1);
      ++s;
    });
    for (const auto& h : hits) CHECK(h.load() == 1);
    std::size_t total = 0;
    for (std::size_t s : scratch) total += s;
    CHECK(total == hits.size());
    CHECK(scratch.size() == w);
  }
}

TEST_CASE("one worker matches a plain loop") {
  ParallelEngine e(1);
  std::vector<std::size_t> order;
  e.for_particles<int>(5, [&](std::size_t i, int&) { order.push_back(i); });
  CHECK(order == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("empty range invokes nothing") {
  ParallelEngine e(4);
  int calls = 0;
  e.for_particles<int>(0, [&](std::size_t, int&) { ++calls; });
  CHECK(calls == 0);
}

TEST_CASE("a failing body reports the lowest failing index") {
  ParallelEngine e(4);
  try {
    e.for_particles<int>(100, [](std::size_t i, int&) {
      if (i == 37 || i == 80) throw std::runtime_error("boom");
    });
    FAIL("expected PhaseError");
  } catch (const PhaseError& err) {
    CHECK(err.index() == 37);
  }
  // The pool stays usable afterwards.
  int sum = 0;
  for (int s : e.for_particles<int>(10, [](std::size_t, int& x) { ++x; })) sum += s;
  CHECK(sum == 10);
}

TEST_CASE("worker count from the environment") {
  ::setenv("DEM_WORKERS", "3", 1);
  CHECK(workers_from_env() == 3);
  ::setenv("DEM_WORKERS", "0", 1);
  CHECK_THROWS_AS(workers_from_env(), ConfigError);
  ::setenv("DEM_WORKERS", "two", 1);
  CHECK_THROWS_AS(workers_from_env(), ConfigError);
  ::unsetenv("DEM_WORKERS");
  CHECK(workers_from_env() >= 1);
}

TEST_CASE("load histogram") {
  const std::vector<std::uint64_t> uniform(16, 5);
  CHECK(load_histogram(uniform, 4).imbalance == 1.0);

  std::vector<std::uint64_t> one(10, 0);
  one[3] = 47;
  const LoadHistogram single = load_histogram(one, 1);
  CHECK(single.imbalance == 1.0);
  CHECK(single.histogram[47] == 1);
  CHECK(single.histogram[0] == 9);

  const LoadHistogram skewed = load_histogram(std::vector<std::uint64_t>{10, 0, 0, 0}, 4);
  CHECK(skewed.imbalance == doctest::Approx(10.0 / (10.0 / 4.0)));
  CHECK(skewed.worker_load == std::vector<std::uint64_t>{10, 0, 0, 0});

  CHECK(load_histogram(std::vector<std::uint64_t>{}, 2).imbalance == 1.0);
}

TEST_CASE("trajectories are identical for any worker count") {
  std::mt19937_64 rng(53);
  SimConfig c;
  c.dt = 1e-4;
  c.gravity = {0, 0, -9.8};
  c.domain_max = {1, 1, 1};
  c.cell_edge = {0.05, 0.05, 0.05};
  MaterialTable m(1);
  m.set(0, 0, {1e4, 2e4, 0.4, 0.5});
  const ParticleSet p = oracle::random_particles(rng, 1000, 0, 1, 0.025, 0.5);

  Simulation serial(c, m, {}, p, 1);
  std::vector<ParticleSet> reference;
  for (int s = 0; s < 5; ++s) {
    serial.step();
    reference.push_back(serial.particles());
  }
  for (std::size_t w : {2u, 4u, 8u}) {
    Simulation par(c, m, {}, p, w);
    for (int s = 0; s < 5; ++s) {
      par.step();
      CHECK(oracle::same_state(par.particles(), reference[s]));
    }
  }
}
