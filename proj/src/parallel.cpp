#include "gausslm/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gausslm {

int worker_count() {
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("GAUSSLM_THREADS")) {
    try {
      const int limit = std::stoi(cap);
      if (limit >= 1) workers = std::min(workers, limit);
    } catch (const std::exception&) {
      // unparsable cap: ignore
    }
  }
  return workers;
}

void parallel_for(std::int64_t tasks, const std::function<void(std::int64_t)>& body) {
  if (tasks <= 0) return;
  const auto workers = static_cast<std::int64_t>(std::min<std::int64_t>(worker_count(), tasks));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < tasks; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::int64_t i = next++; i < tasks; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::int64_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gausslm
