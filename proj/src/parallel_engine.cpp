#include "dem/parallel_engine.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <numeric>

#include "dem/errors.hpp"

namespace dem {

ExecutionPlan ExecutionPlan::contiguous(std::size_t count, std::size_t worker_count) {
  if (worker_count == 0) throw std::invalid_argument("worker_count must be at least 1");
  ExecutionPlan p;
  p.worker_count = worker_count;
  p.partition.resize(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    p.partition[w] = {w * count / worker_count, (w + 1) * count / worker_count};
  }
  return p;
}

WorkerPool::WorkerPool(std::size_t workers) : workers_(workers) {
  if (workers == 0) throw std::invalid_argument("worker pool needs at least one worker");
  threads_.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) threads_.emplace_back([this, w] { loop(w); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(const std::function<void(std::size_t)>& task) {
  if (workers_ == 1) {
    task(0);
    return;
  }
  {
    std::lock_guard lock(mu_);
    task_ = &task;
    pending_ = workers_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();
  task(0);
  std::unique_lock lock(mu_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  task_ = nullptr;
}

void WorkerPool::loop(std::size_t w) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t)>* task = nullptr;
    {
      std::unique_lock lock(mu_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      task = task_;
    }
    (*task)(w);
    {
      std::lock_guard lock(mu_);
      --pending_;
    }
    done_cv_.notify_one();
  }
}

ParallelEngine::ParallelEngine(std::size_t worker_count) : pool_(worker_count) {}

std::size_t workers_from_env() {
  if (const char* env = std::getenv("DEM_WORKERS"); env != nullptr && *env != '\0') {
    const std::string_view s(env);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || ptr != s.data() + s.size() || n == 0)
      throw ConfigError("DEM_WORKERS must be a positive integer, got '" + std::string(s) + "'");
    return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

LoadHistogram load_histogram(std::span<const std::uint64_t> work, std::size_t worker_count) {
  LoadHistogram out;
  const std::uint64_t peak = work.empty() ? 0 : *std::max_element(work.begin(), work.end());
  out.histogram.assign(work.empty() ? 0 : peak + 1, 0);
  for (std::uint64_t c : work) ++out.histogram[c];

  const ExecutionPlan plan = ExecutionPlan::contiguous(work.size(), worker_count);
  out.worker_load.resize(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) {
    const IndexRange r = plan.partition[w];
    out.worker_load[w] = std::accumulate(work.begin() + r.begin, work.begin() + r.end, std::uint64_t{0});
  }
  const std::uint64_t total = std::accumulate(out.worker_load.begin(), out.worker_load.end(), std::uint64_t{0});
  if (total == 0) return out;
  const double mean = static_cast<double>(total) / static_cast<double>(worker_count);
  out.imbalance = static_cast<double>(*std::max_element(out.worker_load.begin(), out.worker_load.end())) / mean;
  return out;
}

}  // namespace dem
