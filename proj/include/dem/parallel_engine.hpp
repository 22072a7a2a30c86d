#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dem {

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Static contiguous partition of [0, count) over the workers. Worker w owns
// [w*count/W, (w+1)*count/W).
struct ExecutionPlan {
  std::size_t worker_count = 1;
  std::vector<IndexRange> partition;

  static ExecutionPlan contiguous(std::size_t count, std::size_t worker_count);
};

// A phase body failed. index() is the lowest failing particle index; cause()
// is the original exception.
class PhaseError : public std::runtime_error {
 public:
  PhaseError(std::size_t index, std::exception_ptr cause, const std::string& what)
      : std::runtime_error("phase failed at index " + std::to_string(index) + ": " + what),
        index_(index),
        cause_(std::move(cause)) {}

  std::size_t index() const { return index_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  std::size_t index_;
  std::exception_ptr cause_;
};

// Persistent fork/join pool. run() executes task(w) for every worker w and
// returns once all have finished; worker 0 is the calling thread.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return workers_; }
  void run(const std::function<void(std::size_t)>& task);

 private:
  void loop(std::size_t w);

  std::size_t workers_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::uint64_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
};

// Barrier-phased data parallelism over particle indices. Each worker owns a
// contiguous range and a private Scratch; scratches come back in worker order.
class ParallelEngine {
 public:
  explicit ParallelEngine(std::size_t worker_count);

  std::size_t worker_count() const { return pool_.size(); }
  ExecutionPlan plan(std::size_t count) const { return ExecutionPlan::contiguous(count, worker_count()); }

  // body(index, scratch) is called once per index in [0, count). If any call
  // throws, the phase still joins and a PhaseError for the lowest failing
  // index is thrown.
  template <typename Scratch, typename Body>
  std::vector<Scratch> for_particles(std::size_t count, Body&& body, const Scratch& init = Scratch{}) {
    const ExecutionPlan p = plan(count);
    std::vector<Scratch> scratch(p.worker_count, init);
    std::vector<std::size_t> failed_at(p.worker_count, std::numeric_limits<std::size_t>::max());
    std::vector<std::exception_ptr> failure(p.worker_count);

    const std::function<void(std::size_t)> task = [&](std::size_t w) {
      const IndexRange r = p.partition[w];
      std::size_t i = r.begin;
      try {
        for (; i < r.end; ++i) body(i, scratch[w]);
      } catch (...) {
        failed_at[w] = i;
        failure[w] = std::current_exception();
      }
    };
    if (count > 0) pool_.run(task);

    std::size_t worst = p.worker_count;
    for (std::size_t w = 0; w < p.worker_count; ++w) {
      if (failure[w] && (worst == p.worker_count || failed_at[w] < failed_at[worst])) worst = w;
    }
    if (worst != p.worker_count) {
      std::string what = "unknown error";
      try {
        std::rethrow_exception(failure[worst]);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      throw PhaseError(failed_at[worst], failure[worst], what);
    }
    return scratch;
  }

 private:
  WorkerPool pool_;
};

// DEM_WORKERS if set (must be a positive integer), otherwise the hardware
// concurrency (at least 1). Throws ConfigError for malformed values.
std::size_t workers_from_env();

struct LoadHistogram {
  std::vector<std::uint64_t> histogram;    // histogram[c] = particles with c units of work
  std::vector<std::uint64_t> worker_load;  // summed work per contiguous partition
  double imbalance = 1.0;                  // max worker load / mean worker load
};

// Imbalance is 1.0 when there is no work at all.
LoadHistogram load_histogram(std::span<const std::uint64_t> work, std::size_t worker_count);

}  // namespace dem
