#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace liplearn {

/// Runs fn(0), ..., fn(num_jobs-1) across `workers` threads. Jobs are claimed
/// from an atomic counter, so callers must store results indexed by job for
/// output independent of scheduling. The first exception (lowest job index)
/// is rethrown after all threads join.
template <class Fn>
void run_jobs(int num_jobs, int workers, Fn&& fn) {
  if (num_jobs < 0) throw std::invalid_argument("run_jobs: negative job count");
  if (workers < 1) workers = 1;
  if (workers == 1 || num_jobs <= 1) {
    for (int j = 0; j < num_jobs; ++j) fn(j);
    return;
  }

  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  int first_error_job = num_jobs;

  const auto worker = [&] {
    while (true) {
      const int j = next.fetch_add(1);
      if (j >= num_jobs) return;
      try {
        fn(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (j < first_error_job) {
          first_error_job = j;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace liplearn
