#include "levy/parallel.hpp"

#include <cstdlib>
#include <string>

namespace levy {

namespace detail {
thread_local bool inside_parallel_region = false;
}

int worker_count() {
  if (const char* env = std::getenv("LEVY_INVENTORY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) {
      return static_cast<int>(v > 512 ? 512 : v);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace levy
