#include "smoothset/parallel.hpp"

#include <atomic>

namespace smoothset {

namespace {
std::atomic<int> g_workers{0};
}

int default_workers() {
  const int w = g_workers.load();
  return w > 0 ? w : resolve_workers(0);
}

void set_default_workers(int workers) { g_workers.store(workers); }

}  // namespace smoothset
