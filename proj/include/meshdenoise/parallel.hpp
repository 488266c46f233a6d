#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mdn {

inline unsigned resolve_workers(unsigned workers) {
  if (workers == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
  return workers;
}

// Splits [0, n) into contiguous chunks and calls body(begin, end) once per
// chunk. Bodies must write only to outputs owned by their own indices, which
// makes the result independent of the worker count.
template <class Body>
void parallel_for_chunks(std::size_t n, unsigned workers, Body&& body) {
  const std::size_t count = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (count <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> threads;
  threads.reserve(count);
  const std::size_t step = (n + count - 1) / count;
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t begin = std::min(n, t * step);
    const std::size_t end = std::min(n, begin + step);
    threads.emplace_back([&, t, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  parallel_for_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace mdn
