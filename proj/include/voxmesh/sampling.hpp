// Uniform surface sampling with gradient flow back to vertex positions.
//
// Face selection is inverse-CDF over the area distribution; the point inside
// a face f = (v1, v2, v3) is p = w1*v1 + w2*v2 + w3*v3 with
//   w1 = 1 - sqrt(xi1), w2 = (1 - xi2) * sqrt(xi1), w3 = xi2 * sqrt(xi1),
// xi1, xi2 uniform in [0, 1). Sample i draws from rng counters 3i, 3i+1,
// 3i+2 of the given seed, so output is bitwise reproducible and samples are
// independent of each other.
//
// Treating the face draw and (xi1, xi2) as constants, p is linear in the
// vertices, so dL/dv_k accumulates w_k * dL/dp per sample (reparameterized
// gradient).
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "voxmesh/geometry.hpp"

namespace voxmesh {

struct SampleProvenance {
    int face{-1};
    double w[3]{0.0, 0.0, 0.0};  // barycentric weights, nonnegative, sum 1
};

struct PointSampleSet {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;  // unit face normals
    std::optional<std::vector<SampleProvenance>> provenance;

    size_t size() const { return points.size(); }
};

// |normals| = |points|, unit length within 1e-6; barycentric weights
// nonnegative and summing to 1 within 1e-9 when provenance is present.
void validate_samples(const PointSampleSet& set);

struct FaceAreaDistribution {
    std::vector<double> areas;          // 0.5 * |(v2-v1) x (v3-v1)| per face
    std::vector<double> probabilities;  // areas / total; 0 for degenerate faces
    double total_area{0.0};
};

// Throws when the mesh has no faces or every face is degenerate.
FaceAreaDistribution face_areas(const TriangleMesh& mesh);

PointSampleSet sample_points(const TriangleMesh& mesh, int count, uint64_t seed);

// dL/dV from per-sample dL/dp; requires provenance indexing into mesh.faces.
// Gradients of vertices no sample touches are zero.
std::vector<Vec3> sample_gradient(const TriangleMesh& mesh, const PointSampleSet& samples,
                                  const std::vector<Vec3>& point_gradients);

}  // namespace voxmesh
