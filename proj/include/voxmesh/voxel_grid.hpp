// Batched voxel occupancy grid: N x D x H x W probabilities in [0, 1],
// indexed (n, z, y, x) with x fastest.
#pragma once

#include <cstdint>
#include <vector>

namespace voxmesh {

struct VoxelGrid {
    int n{0}, d{0}, h{0}, w{0};
    std::vector<float> values;  // size n*d*h*w

    VoxelGrid() = default;
    VoxelGrid(int n_, int d_, int h_, int w_)
        : n(n_), d(d_), h(h_), w(w_), values(static_cast<size_t>(n_) * d_ * h_ * w_, 0.0f) {}

    size_t cell_count() const { return static_cast<size_t>(n) * d * h * w; }
    size_t index(int bn, int z, int y, int x) const {
        return ((static_cast<size_t>(bn) * d + z) * h + y) * w + x;
    }
    float at(int bn, int z, int y, int x) const { return values[index(bn, z, y, x)]; }
    float& at(int bn, int z, int y, int x) { return values[index(bn, z, y, x)]; }
};

// Throws std::invalid_argument unless dims are positive, the value array has
// matching length, and every value lies in [0, 1].
void validate_grid(const VoxelGrid& grid);

}  // namespace voxmesh
