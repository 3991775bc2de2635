#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace rcfield {

/// Worker count from RCFIELD_THREADS, defaulting to the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("RCFIELD_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// body(chunk_index, begin, end). Chunk boundaries depend only on n and the
/// worker count, so per-chunk partial results reduced in chunk order are
/// reproducible for a fixed thread count.
template <typename Body>
void parallel_chunks(std::uint64_t n, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(n / 4096, 1)));
  if (workers <= 1) {
    body(0u, std::uint64_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const std::uint64_t step = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min<std::uint64_t>(n, w * step);
    const std::uint64_t end = std::min<std::uint64_t>(n, begin + step);
    threads.emplace_back([&, w, begin, end] {
      try {
        body(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline unsigned chunk_count(std::uint64_t n) {
  return static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(n / 4096, 1)));
}

}  // namespace rcfield
