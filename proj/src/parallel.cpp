#include "rif/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rif {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("RI3D_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace rif
