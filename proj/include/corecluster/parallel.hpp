#pragma once

#include <exception>
#include <thread>
#include <vector>

namespace corecluster::detail {

/// Runs `body(w)` for w in [0, threads). With threads <= 1 the body runs
/// inline; otherwise one std::thread per worker. The first exception thrown
/// by any worker is rethrown after all workers have joined.
///
/// Work units must key their randomness by identity (see RngStream), never
/// by worker index, so any partition of units over workers gives the same
/// results.
template <typename Body>
void run_workers(int threads, const Body& body) {
  if (threads <= 1) {
    body(0);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        body(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace corecluster::detail
