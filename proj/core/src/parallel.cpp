#include "eotbench/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace eotbench {

namespace {

std::size_t default_threads() {
  if (const char* env = std::getenv("EOTBENCH_THREADS")) {
    try {
      const long parsed = std::stol(env);
      if (parsed > 0) return static_cast<std::size_t>(parsed);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

thread_local bool in_parallel_region = false;

std::atomic<std::size_t>& configured_threads() {
  static std::atomic<std::size_t> threads{default_threads()};
  return threads;
}

// Dynamic scheduling over chunks; results are index-addressed so the order in
// which workers claim chunks is irrelevant.
void run_chunks(std::size_t count, std::size_t chunk,
                const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t chunks = (count + chunk - 1) / chunk;
  // Nested loops run inline on the calling worker.
  const std::size_t workers = in_parallel_region ? 1 : std::min(thread_count(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c * chunk, std::min(count, (c + 1) * chunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    in_parallel_region = true;
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        body(c * chunk, std::min(count, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::size_t thread_count() { return configured_threads().load(); }

void set_thread_count(std::size_t threads) { configured_threads().store(std::max<std::size_t>(1, threads)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t chunk = std::max<std::size_t>(1, count / (thread_count() * 8 + 1));
  run_chunks(count, chunk, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

void parallel_blocks(std::size_t count,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  run_chunks(count, kReductionBlock, [&](std::size_t begin, std::size_t end) {
    body(begin / kReductionBlock, begin, end);
  });
}

}  // namespace eotbench
