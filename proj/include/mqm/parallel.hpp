#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mqm {

/// Splits [0, count) into `chunks` contiguous ranges and runs
/// fn(chunk_index, begin, end) for each one, on up to `workers` threads.
/// Chunk boundaries depend only on (count, chunks), never on `workers`, so
/// callers that merge per-chunk results in chunk order are deterministic.
/// The first exception thrown by any chunk is rethrown on the caller.
template <class Fn>
void parallel_chunks(std::size_t count, std::size_t chunks, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  chunks = std::max<std::size_t>(1, std::min(chunks, count));
  auto bounds = [&](std::size_t c) { return std::pair{count * c / chunks, count * (c + 1) / chunks}; };
  if (workers <= 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = bounds(c);
      fn(c, b, e);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> pool;
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < chunks; c += n_threads) {
        try {
          auto [b, e] = bounds(c);
          fn(c, b, e);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace mqm
