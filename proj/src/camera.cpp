#include "voxmesh/camera.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace voxmesh {

void validate_intrinsics(const CameraIntrinsics& K) {
    if (!(K.fx > 0.0) || !(K.fy > 0.0)) {
        throw std::invalid_argument("validate_intrinsics: focal lengths must be positive");
    }
}

namespace {
void require_positive_z(const std::vector<Vec3>& points, const char* fn) {
    for (size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].z > 0.0)) {
            throw std::invalid_argument(std::string(fn) + ": point " + std::to_string(i) +
                                        " has nonpositive z");
        }
    }
}
}  // namespace

std::vector<Vec2> project_points(const CameraIntrinsics& K, const std::vector<Vec3>& points) {
    validate_intrinsics(K);
    require_positive_z(points, "project_points");
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const Vec3& p : points) {
        out.push_back({K.fx * p.x / p.z + K.cx, K.fy * p.y / p.z + K.cy});
    }
    return out;
}

std::vector<Vec3> frustum_transform(const CameraIntrinsics& K, const std::vector<Vec3>& points) {
    validate_intrinsics(K);
    require_positive_z(points, "frustum_transform");
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const Vec3& p : points) {
        out.push_back({K.fx * p.x / p.z + K.cx, K.fy * p.y / p.z + K.cy, p.z});
    }
    return out;
}

std::vector<Vec3> inverse_frustum_transform(const CameraIntrinsics& K,
                                            const std::vector<Vec3>& points) {
    validate_intrinsics(K);
    require_positive_z(points, "inverse_frustum_transform");
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const Vec3& p : points) {
        out.push_back({(p.x - K.cx) * p.z / K.fx, (p.y - K.cy) * p.z / K.fy, p.z});
    }
    return out;
}

namespace {
void require_depth_args(double z_c, double f, double h, const char* fn) {
    if (!(z_c > 0.0)) throw std::invalid_argument(std::string(fn) + ": z_c must be positive");
    if (!(f > 0.0)) throw std::invalid_argument(std::string(fn) + ": f must be positive");
    if (!(h > 0.0)) throw std::invalid_argument(std::string(fn) + ": h must be positive");
}
}  // namespace

double normalize_depth_extent(double dz, double z_c, double f, double h) {
    require_depth_args(z_c, f, h, "normalize_depth_extent");
    return (dz / z_c) * (f / h);
}

double denormalize_depth_extent(double dz_bar, double z_c, double f, double h) {
    require_depth_args(z_c, f, h, "denormalize_depth_extent");
    return dz_bar * z_c * h / f;
}

double normalize_depth_extent_log(double dz, double z_c, double f, double h) {
    if (!(dz > 0.0)) {
        throw std::invalid_argument("normalize_depth_extent_log: dz must be positive");
    }
    return std::log(normalize_depth_extent(dz, z_c, f, h));
}

double denormalize_depth_extent_log(double log_dz_bar, double z_c, double f, double h) {
    return denormalize_depth_extent(std::exp(log_dz_bar), z_c, f, h);
}

}  // namespace voxmesh
