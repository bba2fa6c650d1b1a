#include "frogld/core/parallel.hpp"

#include <cstdlib>

namespace frogld {

int default_threads() {
    if (const char* env = std::getenv("FROGLD_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace frogld
