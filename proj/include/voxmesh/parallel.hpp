// Static-partition parallel for. Thread count comes from the VOXMESH_THREADS
// environment variable, falling back to the hardware count. Work items must
// write to disjoint slots; partitioning is deterministic, so results do not
// depend on the thread count.
#pragma once

#include <cstddef>
#include <functional>

namespace voxmesh {

int thread_count();

void parallel_for(size_t count, const std::function<void(size_t begin, size_t end)>& body);

}  // namespace voxmesh
