#include "voxmesh/voxel_grid.hpp"

#include <stdexcept>
#include <string>

namespace voxmesh {

void validate_grid(const VoxelGrid& grid) {
    if (grid.n <= 0 || grid.d <= 0 || grid.h <= 0 || grid.w <= 0) {
        throw std::invalid_argument("validate_grid: dims must be positive");
    }
    if (grid.values.size() != grid.cell_count()) {
        throw std::invalid_argument("validate_grid: value count " +
                                    std::to_string(grid.values.size()) + " does not match dims");
    }
    for (size_t i = 0; i < grid.values.size(); ++i) {
        float v = grid.values[i];
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw std::invalid_argument("validate_grid: value at flat index " + std::to_string(i) +
                                        " outside [0, 1]");
        }
    }
}

}  // namespace voxmesh
