#include "jpec/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace jpec {
namespace {

std::size_t from_environment() {
  const char* raw = std::getenv("JPEC_THREADS");
  if (raw == nullptr || *raw == '\0') {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  try {
    const long parsed = std::stol(raw);
    return parsed <= 1 ? 1 : static_cast<std::size_t>(parsed);
  } catch (const std::exception&) {
    return 1;
  }
}

std::atomic<std::size_t> override_workers{0};

}  // namespace

std::size_t worker_count() {
  const std::size_t forced = override_workers.load();
  if (forced != 0) return forced;
  static const std::size_t env_workers = from_environment();
  return env_workers;
}

void set_worker_count(std::size_t workers) { override_workers.store(workers); }

void parallel_rows(std::size_t n, std::size_t min_work, std::size_t work_per_row,
                   const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1 || n * std::max<std::size_t>(work_per_row, 1) < min_work) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> failures((n + chunk - 1) / chunk);
  {
    std::vector<std::jthread> pool;
    pool.reserve(failures.size());
    for (std::size_t begin = 0, slot = 0; begin < n; begin += chunk, ++slot) {
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back([&body, &failures, slot, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          failures[slot] = std::current_exception();
        }
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

}  // namespace jpec
