#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace smoothset {

/// Worker count: explicit value if positive, else SMOOTHSET_WORKERS, else 1.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SMOOTHSET_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

int default_workers();
void set_default_workers(int workers);

/// Splits [0, count) into fixed chunks that do not depend on the worker
/// count, runs fn(chunk, begin, end) for each, and returns the chunk count.
/// Callers reduce per-chunk results in chunk order, which keeps every
/// reduction independent of scheduling.
inline std::size_t parallel_chunks(std::size_t count, std::size_t chunkSize,
                                   const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                                   int workers = 0) {
  chunkSize = std::max<std::size_t>(chunkSize, 1);
  const std::size_t chunks = (count + chunkSize - 1) / chunkSize;
  const int w = std::min<int>(workers > 0 ? workers : default_workers(), static_cast<int>(std::max<std::size_t>(chunks, 1)));
  auto run = [&](std::size_t c) { fn(c, c * chunkSize, std::min(count, (c + 1) * chunkSize)); };
  if (w <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return chunks;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t c = static_cast<std::size_t>(t); c < chunks; c += static_cast<std::size_t>(w)) run(c);
    });
  for (auto& th : pool) th.join();
  return chunks;
}

}  // namespace smoothset
