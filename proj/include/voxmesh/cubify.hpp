// Voxel occupancy grids to watertight triangle meshes.
//
// A cell (n, z, y, x) with value strictly greater than the threshold is
// occupied and contributes a unit cuboid spanning lattice corners
// (x..x+1, y..y+1, z..z+1); grid axes map to world axes as x->X, y->Y, z->Z.
// Cuboid sides facing an occupied neighbor are dropped, coincident lattice
// vertices are merged, and vertices left without any face are discarded.
// World coordinates are origin + voxel_size * lattice, computed identically
// on both code paths so outputs compare exactly.
//
// cubify_naive is the per-voxel reference loop; cubify produces canonically
// equal meshes from whole-grid mask arithmetic and runs much faster on large
// batches.
#pragma once

#include <array>
#include <vector>

#include "voxmesh/geometry.hpp"
#include "voxmesh/voxel_grid.hpp"

namespace voxmesh {

struct CubifyConfig {
    double threshold{0.2};
    double voxel_size{1.0};
    Vec3 origin{0.0, 0.0, 0.0};
};

// The 8 corners and 12 triangles of the unit cuboid, triangles grouped two
// per side in the order back (-z), front (+z), top (-y), bottom (+y),
// left (-x), right (+x). Winding is counterclockwise seen from outside.
// Side diagonals run through corners 0 (back/top/left) and 6
// (front/bottom/right); any fixed choice yields watertight output because
// each boundary square is emitted by exactly one cuboid.
struct UnitCubeTemplate {
    static const std::array<std::array<int, 3>, 8>& corners();
    static const std::array<Face, 12>& faces();
};

void validate_cubify_config(const CubifyConfig& cfg);

// Literal per-voxel transcription: visit every cell, add the unit cuboid,
// drop sides whose axis neighbor is occupied (out-of-bounds neighbors count
// as empty), then merge shared vertices by exact lattice coordinate.
std::vector<TriangleMesh> cubify_naive(const VoxelGrid& grid, const CubifyConfig& cfg);

// Vectorized path: binarize once, derive the six per-side keep masks by
// shifted comparisons of the whole grid, then emit faces and merge vertices
// with flat index arithmetic. Canonically equal to cubify_naive.
std::vector<TriangleMesh> cubify(const VoxelGrid& grid, const CubifyConfig& cfg);

}  // namespace voxmesh
