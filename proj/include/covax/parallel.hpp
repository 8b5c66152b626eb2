#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace covax {

/// Worker cap from COVAX_THREADS; 0 or unset means the machine default.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("COVAX_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  try {
    const unsigned long v = std::stoul(env);
    return v == 0 ? hw : static_cast<unsigned>(v);
  } catch (...) {
    return hw;
  }
}

/// Splits [0, count) into contiguous chunks, one per worker. fn(begin, end)
/// must only touch state owned by its range.
template <typename Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(threads, count);
  const std::size_t step = (count + chunks - 1) / chunks;
  std::vector<std::jthread> workers;
  workers.reserve(chunks - 1);
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t begin = c * step;
    const std::size_t end = std::min(count, begin + step);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(count, step));
}

}  // namespace covax
