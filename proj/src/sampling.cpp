#include "voxmesh/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "voxmesh/parallel.hpp"
#include "voxmesh/rng.hpp"

namespace voxmesh {

void validate_samples(const PointSampleSet& set) {
    if (set.normals.size() != set.points.size()) {
        throw std::invalid_argument("validate_samples: normal count does not match point count");
    }
    for (size_t i = 0; i < set.normals.size(); ++i) {
        if (std::abs(set.normals[i].norm() - 1.0) > 1e-6) {
            throw std::invalid_argument("validate_samples: normal " + std::to_string(i) +
                                        " is not unit length");
        }
    }
    if (set.provenance) {
        if (set.provenance->size() != set.points.size()) {
            throw std::invalid_argument("validate_samples: provenance count mismatch");
        }
        for (size_t i = 0; i < set.provenance->size(); ++i) {
            const SampleProvenance& p = (*set.provenance)[i];
            double sum = p.w[0] + p.w[1] + p.w[2];
            if (p.w[0] < 0 || p.w[1] < 0 || p.w[2] < 0 || std::abs(sum - 1.0) > 1e-9) {
                throw std::invalid_argument("validate_samples: bad barycentric weights at " +
                                            std::to_string(i));
            }
        }
    }
}

FaceAreaDistribution face_areas(const TriangleMesh& mesh) {
    validate_mesh(mesh);
    if (mesh.faces.empty()) {
        throw std::invalid_argument("face_areas: mesh has no faces");
    }
    FaceAreaDistribution dist;
    dist.areas.reserve(mesh.faces.size());
    for (const Face& f : mesh.faces) {
        const Vec3& v1 = mesh.vertices[f[0]];
        const Vec3& v2 = mesh.vertices[f[1]];
        const Vec3& v3 = mesh.vertices[f[2]];
        double area = 0.5 * (v2 - v1).cross(v3 - v1).norm();
        dist.areas.push_back(area);
        dist.total_area += area;
    }
    if (!(dist.total_area > 0.0)) {
        throw std::invalid_argument("face_areas: every face is degenerate");
    }
    dist.probabilities.reserve(dist.areas.size());
    for (double a : dist.areas) dist.probabilities.push_back(a / dist.total_area);
    return dist;
}

namespace {

// First face whose cumulative probability exceeds u; zero-area faces carry
// zero measure and are skipped past.
int pick_face(const std::vector<double>& cdf, const std::vector<double>& areas, double u) {
    int lo = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    lo = std::min(lo, static_cast<int>(cdf.size()) - 1);
    while (areas[lo] <= 0.0 && lo + 1 < static_cast<int>(cdf.size())) ++lo;
    while (areas[lo] <= 0.0 && lo > 0) --lo;
    return lo;
}

}  // namespace

PointSampleSet sample_points(const TriangleMesh& mesh, int count, uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_points: count must be >= 1");
    FaceAreaDistribution dist = face_areas(mesh);

    std::vector<double> cdf(dist.probabilities.size());
    double acc = 0.0;
    for (size_t i = 0; i < dist.probabilities.size(); ++i) {
        acc += dist.probabilities[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::vector<Vec3> face_normals(mesh.faces.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        face_normals[f] = dist.areas[f] > 0.0 ? face_normal(mesh, static_cast<int>(f))
                                              : Vec3{0, 0, 1};
    }

    PointSampleSet set;
    set.points.resize(count);
    set.normals.resize(count);
    set.provenance.emplace(count);
    parallel_for(count, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const uint64_t c = static_cast<uint64_t>(i) * 3;
            const int f = pick_face(cdf, dist.areas, rng_uniform(seed, c));
            const double xi1 = rng_uniform(seed, c + 1);
            const double xi2 = rng_uniform(seed, c + 2);
            const double r = std::sqrt(xi1);
            SampleProvenance prov;
            prov.face = f;
            prov.w[0] = 1.0 - r;
            prov.w[1] = (1.0 - xi2) * r;
            prov.w[2] = xi2 * r;
            const Face& face = mesh.faces[f];
            set.points[i] = prov.w[0] * mesh.vertices[face[0]] +
                            prov.w[1] * mesh.vertices[face[1]] +
                            prov.w[2] * mesh.vertices[face[2]];
            set.normals[i] = face_normals[f];
            (*set.provenance)[i] = prov;
        }
    });
    return set;
}

std::vector<Vec3> sample_gradient(const TriangleMesh& mesh, const PointSampleSet& samples,
                                  const std::vector<Vec3>& point_gradients) {
    if (!samples.provenance) {
        throw std::invalid_argument("sample_gradient: samples carry no provenance");
    }
    if (point_gradients.size() != samples.points.size()) {
        throw std::invalid_argument("sample_gradient: gradient count does not match samples");
    }
    std::vector<Vec3> grad(mesh.vertices.size(), Vec3{0, 0, 0});
    // Accumulation order is fixed (sample order) so the result is bitwise
    // reproducible.
    for (size_t i = 0; i < samples.points.size(); ++i) {
        const SampleProvenance& p = (*samples.provenance)[i];
        if (p.face < 0 || p.face >= static_cast<int>(mesh.faces.size())) {
            throw std::invalid_argument("sample_gradient: sample " + std::to_string(i) +
                                        " has no valid face provenance");
        }
        const Face& face = mesh.faces[p.face];
        for (int k = 0; k < 3; ++k) {
            grad[face[k]] += p.w[k] * point_gradients[i];
        }
    }
    return grad;
}

}  // namespace voxmesh
