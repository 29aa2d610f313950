// Shape losses with analytic gradients: chamfer and normal distances over
// sampled point sets, edge and Laplacian mesh regularizers, voxel BCE, the
// per-stage weighted mesh loss, and a plain gradient-descent vertex
// optimizer that exercises the sample -> loss -> vertex gradient chain.
//
// Gradients treat nearest-neighbor assignments and the sampler's face/xi
// draws as constants (the usual subgradient choice).
#pragma once

#include <cstdint>
#include <vector>

#include "voxmesh/geometry.hpp"
#include "voxmesh/nearest.hpp"
#include "voxmesh/sampling.hpp"
#include "voxmesh/voxel_grid.hpp"

namespace voxmesh {

struct LossWeights {
    double voxel{1.0};
    double chamfer{1.0};
    double normal{0.0};
    double edge{0.2};

    // Presets used for the two benchmark setups.
    static LossWeights shapenet() { return {1.0, 1.0, 0.0, 0.2}; }
    static LossWeights pix3d() { return {3.0, 1.0, 0.1, 1.0}; }
};

void validate_weights(const LossWeights& w);

struct ChamferResult {
    double value{0.0};
    std::vector<Vec3> grad_p;
    std::vector<Vec3> grad_q;
};

// L = |P|^-1 sum |p - nn_Q(p)|^2 + |Q|^-1 sum |q - nn_P(q)|^2. The overload
// taking a NearestNeighborMap reuses precomputed assignments.
ChamferResult chamfer(const PointSampleSet& p, const PointSampleSet& q,
                      NnMode mode = NnMode::accelerated);
ChamferResult chamfer(const PointSampleSet& p, const PointSampleSet& q,
                      const NearestNeighborMap& nn);

// L = -|P|^-1 sum |u_p . u_q| - |Q|^-1 sum |u_q . u_p|, in [-2, 0].
double normal_distance(const PointSampleSet& p, const PointSampleSet& q,
                       NnMode mode = NnMode::accelerated);
double normal_distance(const PointSampleSet& p, const PointSampleSet& q,
                       const NearestNeighborMap& nn);

struct EdgeLossResult {
    double value{0.0};
    std::vector<Vec3> grad;
};

// Mean squared edge length over the unique undirected edge set.
EdgeLossResult edge_loss(const TriangleMesh& mesh);

// |V|^-1 sum_v |v - mean(neighbors(v))|^2 with uniform weights; vertices
// without neighbors contribute zero.
double laplacian_loss(const TriangleMesh& mesh);

// Mean binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7];
// target must be exactly 0/1 valued and the dims must match.
double voxel_loss(const VoxelGrid& predicted, const VoxelGrid& target);

struct StageLoss {
    double chamfer{0.0};
    double normal{0.0};
    double edge{0.0};
    double weighted{0.0};
};

struct MeshLossResult {
    double total{0.0};  // mean of weighted stage losses
    std::vector<StageLoss> stages;
};

// Per stage i: lambda_cham * L_cham(P_i, gt) + lambda_norm * L_norm +
// lambda_edge * L_edge, with P_i freshly sampled from stage i using seed
// stream i. Returns the mean across stages plus the breakdown.
MeshLossResult mesh_loss(const std::vector<TriangleMesh>& stages, const PointSampleSet& gt,
                         const LossWeights& weights, int sample_count, uint64_t seed);

struct FitTrace {
    double chamfer{0.0};
    double edge{0.0};
    double total{0.0};
};

struct FitResult {
    TriangleMesh mesh;
    std::vector<FitTrace> trace;  // trace[s] = loss at the start of step s
    FitTrace final;               // loss after the last update (seed stream = steps)
};

// Plain gradient descent of lambda_cham * chamfer + lambda_edge * edge over
// vertex positions. The predicted mesh is resampled each step with seed
// stream s, and chamfer gradients flow to vertices through sample_gradient.
// Topology is unchanged.
FitResult optimize_vertices(const TriangleMesh& init, const PointSampleSet& target,
                            const LossWeights& weights, int steps, double step_size,
                            int sample_count, uint64_t seed);

}  // namespace voxmesh
