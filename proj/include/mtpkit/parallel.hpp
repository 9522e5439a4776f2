#pragma once

// Minimal fork-join helper: run a task body over an index range on a fixed
// number of threads, handing out indices through a shared atomic counter so
// uneven tasks balance themselves. Callers own all shared state; results
// must not depend on which worker ran which index.

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace mtpkit {

/// Worker count to use when the caller does not pin one: the MTPKIT_JOBS
/// environment variable if set to a positive integer, otherwise the number
/// of available cores.
inline unsigned default_jobs() {
  if (const char* env = std::getenv("MTPKIT_JOBS")) {
    const long parsed = std::atol(env);
    if (parsed > 0) return static_cast<unsigned>(parsed);
  }
  const unsigned cores = std::thread::hardware_concurrency();
  return cores > 0 ? cores : 1;
}

inline unsigned resolve_jobs(unsigned jobs) { return jobs > 0 ? jobs : default_jobs(); }

/// Invoke body(task_index, worker_index) once for every task_index in
/// [0, task_count), on `jobs` workers (0 = default_jobs()). Worker indices
/// are in [0, jobs) and let the body keep per-worker accumulators. The
/// first exception thrown by any body is rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t task_count, unsigned jobs, Body&& body) {
  jobs = resolve_jobs(jobs);
  if (task_count == 0) return;
  if (jobs == 1 || task_count == 1) {
    for (std::size_t i = 0; i < task_count; ++i) body(i, 0u);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  const auto run = [&](unsigned worker) {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= task_count || failed.load(std::memory_order_relaxed)) return;
      try {
        body(i, worker);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  const unsigned spawned = static_cast<unsigned>(
      std::min<std::size_t>(jobs, task_count) - 1);
  threads.reserve(spawned);
  for (unsigned w = 1; w <= spawned; ++w) threads.emplace_back(run, w);
  run(0);
  for (std::thread& t : threads) t.join();
  if (failed.load()) std::rethrow_exception(failure);
}

}  // namespace mtpkit
