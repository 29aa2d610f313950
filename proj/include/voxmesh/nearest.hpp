// Exact nearest neighbors between two point sets, in both directions.
// Distance ties break toward the lowest index, so the accelerated spatial
// grid returns the same indices as the brute-force scan.
#pragma once

#include <vector>

#include "voxmesh/geometry.hpp"

namespace voxmesh {

enum class NnMode { brute, accelerated };

struct NearestNeighborMap {
    std::vector<int> p_to_q;  // p_to_q[i] = argmin_j |P[i] - Q[j]|
    std::vector<int> q_to_p;
};

NearestNeighborMap nearest_neighbors(const std::vector<Vec3>& p, const std::vector<Vec3>& q,
                                     NnMode mode = NnMode::accelerated);

}  // namespace voxmesh
