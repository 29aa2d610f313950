#include "voxmesh/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace voxmesh {

int thread_count() {
    if (const char* env = std::getenv("VOXMESH_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t count, const std::function<void(size_t, size_t)>& body) {
    if (count == 0) return;
    const size_t threads = std::min<size_t>(thread_count(), count);
    if (threads <= 1) {
        body(0, count);
        return;
    }
    const size_t chunk = (count + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t) {
        size_t begin = t * chunk;
        size_t end = std::min(begin + chunk, count);
        if (begin >= end) break;
        pool.emplace_back(body, begin, end);
    }
    for (auto& th : pool) th.join();
}

}  // namespace voxmesh
