// Forward-pass operators of the mesh refinement branch, plus icosphere
// construction and face subdivision for the sphere-initialized baselines.
// Weights are supplied externally (file container or seeded random init);
// nothing here is trained.
//
// A refinement stage computes, in order:
//   1. aligned = vert_align(maps, K, vertices)          -> |V| x A
//   2. proj    = aligned * W_proj^T                     -> |V| x F (no nonlinearity)
//   3. g       = [prev_features?; vertices; proj]       -> |V| x (F?+3+F)
//   4. graph convolutions, wired per style:
//      - light:    h = gc(g); then conv k >= 2 takes [vertices; h]
//      - residual: blocks of two convolutions with an additive skip,
//                  linearly projected when the block changes width
//   5. vertex_refine: v' = v + tanh(W_vert [h_i; v_i])
// Stage output features are the last convolution output (|V| x F).
//
// Ordered weight layout per stage (see StageConfig::weights):
//   proj, then per convolution W0, W1, with a residual block's skip
//   projection (when its input and output widths differ) following that
//   block's two convolutions, and W_vert last.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "voxmesh/camera.hpp"
#include "voxmesh/feature_map.hpp"
#include "voxmesh/geometry.hpp"
#include "voxmesh/matrix.hpp"

namespace voxmesh {

// Bilinear feature lookup at each projected vertex, concatenated across
// maps. Pixel coordinates scale to each map by (map_width / image_width) and
// (map_height / image_height); all vertices must have z > 0.
Matrix vert_align(const std::vector<FeatureMap>& maps, const CameraIntrinsics& K,
                  const std::vector<Vec3>& vertices, int image_width, int image_height);

// f'_i = relu(W0 f_i + sum_{j in N(i)} W1 f_j) over the undirected 1-ring.
Matrix graph_conv(const Matrix& features, const std::vector<std::vector<int>>& adjacency,
                  const Matrix& w0, const Matrix& w1);

struct VertexRefineResult {
    std::vector<Vec3> vertices;
    std::vector<Vec3> displacements;  // tanh outputs, each coordinate in (-1, 1)
};

// v'_i = v_i + tanh(W_vert [f_i; v_i]); W_vert is 3 x (feature_dim + 3).
VertexRefineResult vertex_refine(const std::vector<Vec3>& vertices, const Matrix& features,
                                 const Matrix& w_vert);

enum class StageStyle { residual, light };

struct StageConfig {
    StageStyle style{StageStyle::light};
    int conv_count{3};    // residual style requires an even count (two per block)
    int feature_dim{128};
    bool subdivide_input{false};  // split faces before vert_align (sphere baselines)
    std::vector<Matrix> weights;  // ordered layout documented above
};

// Shape-checks cfg.weights against (aligned_dim, has_prev_features); throws
// std::invalid_argument with the offending entry.
void validate_stage_config(const StageConfig& cfg, int aligned_dim, bool has_prev_features);

struct StageResult {
    TriangleMesh mesh;
    Matrix features;  // |V| x feature_dim
};

StageResult refinement_stage(const TriangleMesh& mesh, const Matrix* prev_features,
                             const std::vector<FeatureMap>& maps, const CameraIntrinsics& K,
                             int image_width, int image_height, const StageConfig& cfg);

// Chains stages, threading vertex features, and returns every intermediate
// mesh (stage i's output at index i).
std::vector<TriangleMesh> refine_mesh(const TriangleMesh& initial,
                                      const std::vector<FeatureMap>& maps,
                                      const CameraIntrinsics& K, int image_width,
                                      int image_height, const std::vector<StageConfig>& stages);

// Regular icosahedron subdivided `level` times with every vertex projected
// onto the unit sphere. Level 0 is 12/30/20 vertices/edges/faces; each level
// quadruples the face count.
TriangleMesh make_icosphere(int level);

// Splits each face into four via edge midpoints; shared midpoints are
// merged, so |V'| = |V| + |E| and |F'| = 4 |F|.
TriangleMesh subdivide_faces(const TriangleMesh& mesh);

// Random weights (uniform +-1/sqrt(fan_in)) for one stage, drawn from seed
// streams per matrix. Used for fixtures; no pretrained weights exist here.
StageConfig random_stage_config(StageStyle style, int conv_count, int feature_dim,
                                int aligned_dim, bool has_prev_features, uint64_t seed);

}  // namespace voxmesh
