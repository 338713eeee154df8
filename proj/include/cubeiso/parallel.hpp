#pragma once

// Chunked work-stealing over an index range with an ordered merge.
//
// Chunks are claimed from a shared atomic counter, but each chunk's result is
// stored at its own slot, so the caller always folds results in chunk order
// and the outcome does not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cubeiso {

inline int default_threads() {
  if (const char* env = std::getenv("ISO_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// f(begin, end) -> R for every chunk [begin, end) of [0, total).
template <class R, class F>
std::vector<R> parallel_chunks(std::uint64_t total, std::uint64_t chunk, int threads, F&& f) {
  chunk = std::max<std::uint64_t>(chunk, 1);
  const std::uint64_t nchunks = (total + chunk - 1) / chunk;
  std::vector<R> results(nchunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      try {
        const std::uint64_t begin = c * chunk;
        results[c] = f(begin, std::min(total, begin + chunk));
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = nchunks;
        return;
      }
    }
  };

  const auto nthreads = static_cast<std::uint64_t>(std::max(1, threads));
  if (nthreads == 1 || nchunks <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::uint64_t t = 0; t < std::min(nthreads, nchunks); ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace cubeiso
