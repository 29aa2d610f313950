#include "voxmesh/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "voxmesh/rng.hpp"

namespace voxmesh {

void validate_weights(const LossWeights& w) {
    if (w.voxel < 0 || w.chamfer < 0 || w.normal < 0 || w.edge < 0) {
        throw std::invalid_argument("validate_weights: loss weights must be nonnegative");
    }
}

ChamferResult chamfer(const PointSampleSet& p, const PointSampleSet& q, NnMode mode) {
    if (p.points.empty() || q.points.empty()) {
        throw std::invalid_argument("chamfer: point sets must be nonempty");
    }
    return chamfer(p, q, nearest_neighbors(p.points, q.points, mode));
}

ChamferResult chamfer(const PointSampleSet& p, const PointSampleSet& q,
                      const NearestNeighborMap& nn) {
    ChamferResult res;
    res.grad_p.assign(p.points.size(), Vec3{0, 0, 0});
    res.grad_q.assign(q.points.size(), Vec3{0, 0, 0});
    const double inv_p = 1.0 / static_cast<double>(p.points.size());
    const double inv_q = 1.0 / static_cast<double>(q.points.size());
    for (size_t i = 0; i < p.points.size(); ++i) {
        const Vec3 diff = p.points[i] - q.points[nn.p_to_q[i]];
        res.value += inv_p * diff.squared_norm();
        res.grad_p[i] += (2.0 * inv_p) * diff;
        res.grad_q[nn.p_to_q[i]] -= (2.0 * inv_p) * diff;
    }
    for (size_t j = 0; j < q.points.size(); ++j) {
        const Vec3 diff = q.points[j] - p.points[nn.q_to_p[j]];
        res.value += inv_q * diff.squared_norm();
        res.grad_q[j] += (2.0 * inv_q) * diff;
        res.grad_p[nn.q_to_p[j]] -= (2.0 * inv_q) * diff;
    }
    return res;
}

double normal_distance(const PointSampleSet& p, const PointSampleSet& q, NnMode mode) {
    if (p.points.empty() || q.points.empty()) {
        throw std::invalid_argument("normal_distance: point sets must be nonempty");
    }
    return normal_distance(p, q, nearest_neighbors(p.points, q.points, mode));
}

double normal_distance(const PointSampleSet& p, const PointSampleSet& q,
                       const NearestNeighborMap& nn) {
    validate_samples(p);
    validate_samples(q);
    double sum_p = 0.0, sum_q = 0.0;
    for (size_t i = 0; i < p.points.size(); ++i) {
        sum_p += std::abs(p.normals[i].dot(q.normals[nn.p_to_q[i]]));
    }
    for (size_t j = 0; j < q.points.size(); ++j) {
        sum_q += std::abs(q.normals[j].dot(p.normals[nn.q_to_p[j]]));
    }
    return -sum_p / static_cast<double>(p.points.size()) -
           sum_q / static_cast<double>(q.points.size());
}

EdgeLossResult edge_loss(const TriangleMesh& mesh) {
    const std::vector<Edge> edges = mesh_edges(mesh);
    if (edges.empty()) {
        throw std::invalid_argument("edge_loss: mesh has no edges");
    }
    EdgeLossResult res;
    res.grad.assign(mesh.vertices.size(), Vec3{0, 0, 0});
    const double inv_e = 1.0 / static_cast<double>(edges.size());
    for (const Edge& e : edges) {
        const Vec3 diff = mesh.vertices[e.first] - mesh.vertices[e.second];
        res.value += inv_e * diff.squared_norm();
        res.grad[e.first] += (2.0 * inv_e) * diff;
        res.grad[e.second] -= (2.0 * inv_e) * diff;
    }
    return res;
}

double laplacian_loss(const TriangleMesh& mesh) {
    const std::vector<std::vector<int>> adj = vertex_adjacency(mesh);
    bool any_edge = false;
    double sum = 0.0;
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        if (adj[i].empty()) continue;
        any_edge = true;
        Vec3 mean{0, 0, 0};
        for (int j : adj[i]) mean += mesh.vertices[j];
        mean = mean * (1.0 / static_cast<double>(adj[i].size()));
        sum += (mesh.vertices[i] - mean).squared_norm();
    }
    if (!any_edge) {
        throw std::invalid_argument("laplacian_loss: mesh has no edges");
    }
    return sum / static_cast<double>(mesh.vertices.size());
}

double voxel_loss(const VoxelGrid& predicted, const VoxelGrid& target) {
    validate_grid(predicted);
    validate_grid(target);
    if (predicted.n != target.n || predicted.d != target.d || predicted.h != target.h ||
        predicted.w != target.w) {
        throw std::invalid_argument("voxel_loss: grid dims mismatch");
    }
    constexpr double kEps = 1e-7;
    double sum = 0.0;
    for (size_t i = 0; i < predicted.values.size(); ++i) {
        const double t = target.values[i];
        if (t != 0.0 && t != 1.0) {
            throw std::invalid_argument("voxel_loss: target value at flat index " +
                                        std::to_string(i) + " is not binary");
        }
        double pr = std::min(1.0 - kEps, std::max(kEps, static_cast<double>(predicted.values[i])));
        sum += t > 0.5 ? -std::log(pr) : -std::log(1.0 - pr);
    }
    return sum / static_cast<double>(predicted.values.size());
}

MeshLossResult mesh_loss(const std::vector<TriangleMesh>& stages, const PointSampleSet& gt,
                         const LossWeights& weights, int sample_count, uint64_t seed) {
    if (stages.empty()) {
        throw std::invalid_argument("mesh_loss: at least one stage required");
    }
    validate_weights(weights);
    MeshLossResult res;
    res.stages.reserve(stages.size());
    for (size_t i = 0; i < stages.size(); ++i) {
        StageLoss sl;
        // Sampling and the two pointcloud terms are skipped entirely when
        // both weights are zero, so edge-only configurations work on meshes
        // that cannot be sampled.
        if (weights.chamfer > 0.0 || weights.normal > 0.0) {
            const PointSampleSet pi =
                sample_points(stages[i], sample_count, derive_seed(seed, i));
            if (weights.chamfer > 0.0) sl.chamfer = chamfer(pi, gt).value;
            if (weights.normal > 0.0) sl.normal = normal_distance(pi, gt);
        }
        if (weights.edge > 0.0) sl.edge = edge_loss(stages[i]).value;
        sl.weighted =
            weights.chamfer * sl.chamfer + weights.normal * sl.normal + weights.edge * sl.edge;
        res.total += sl.weighted;
        res.stages.push_back(sl);
    }
    res.total /= static_cast<double>(stages.size());
    return res;
}

namespace {

FitTrace fit_losses(const TriangleMesh& mesh, const PointSampleSet& target,
                    const LossWeights& weights, int sample_count, uint64_t step_seed,
                    std::vector<Vec3>* grad_out) {
    const PointSampleSet samples = sample_points(mesh, sample_count, step_seed);
    const ChamferResult cham = chamfer(samples, target);
    const EdgeLossResult edge = edge_loss(mesh);
    FitTrace t;
    t.chamfer = cham.value;
    t.edge = edge.value;
    t.total = weights.chamfer * cham.value + weights.edge * edge.value;
    if (grad_out) {
        std::vector<Vec3> grad = sample_gradient(mesh, samples, cham.grad_p);
        for (size_t v = 0; v < grad.size(); ++v) {
            grad[v] = weights.chamfer * grad[v] + weights.edge * edge.grad[v];
        }
        *grad_out = std::move(grad);
    }
    return t;
}

}  // namespace

FitResult optimize_vertices(const TriangleMesh& init, const PointSampleSet& target,
                            const LossWeights& weights, int steps, double step_size,
                            int sample_count, uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("optimize_vertices: steps must be >= 1");
    validate_weights(weights);
    FitResult res;
    res.mesh = init;
    res.trace.reserve(steps);
    for (int s = 0; s < steps; ++s) {
        std::vector<Vec3> grad;
        res.trace.push_back(
            fit_losses(res.mesh, target, weights, sample_count, derive_seed(seed, s), &grad));
        for (size_t v = 0; v < res.mesh.vertices.size(); ++v) {
            res.mesh.vertices[v] -= step_size * grad[v];
        }
    }
    res.final = fit_losses(res.mesh, target, weights, sample_count, derive_seed(seed, steps),
                           nullptr);
    return res;
}

}  // namespace voxmesh
