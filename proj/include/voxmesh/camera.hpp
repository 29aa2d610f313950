// Pinhole camera geometry: projection, the frustum transform between world
// and prediction space, and depth-extent normalization.
//
// Prediction space keeps linear z as its third coordinate: the forward
// transform maps (x, y, z) -> (fx*x/z + cx, fy*y/z + cy, z), so axis-aligned
// boxes in prediction space correspond to frustum-shaped cells in world
// space. All operations require z > 0 (points in front of the camera).
#pragma once

#include <vector>

#include "voxmesh/geometry.hpp"

namespace voxmesh {

struct CameraIntrinsics {
    double fx{1.0}, fy{1.0};  // focal lengths, pixels
    double cx{0.0}, cy{0.0};  // principal point, pixels
};

// Throws std::invalid_argument on nonpositive focal lengths.
void validate_intrinsics(const CameraIntrinsics& K);

// (u, v) = (fx*x/z + cx, fy*y/z + cy). Throws naming the first point with
// z <= 0.
std::vector<Vec2> project_points(const CameraIntrinsics& K, const std::vector<Vec3>& points);

std::vector<Vec3> frustum_transform(const CameraIntrinsics& K, const std::vector<Vec3>& points);
std::vector<Vec3> inverse_frustum_transform(const CameraIntrinsics& K,
                                            const std::vector<Vec3>& points);

// Scale-normalized depth extent: dz_bar = (dz / z_c) * (f / h), with h the
// object's box height in pixels. The _log pair additionally maps through
// log/exp and therefore requires dz > 0.
double normalize_depth_extent(double dz, double z_c, double f, double h);
double denormalize_depth_extent(double dz_bar, double z_c, double f, double h);
double normalize_depth_extent_log(double dz, double z_c, double f, double h);
double denormalize_depth_extent_log(double log_dz_bar, double z_c, double f, double h);

}  // namespace voxmesh
