// Shape evaluation protocol: rescaling conventions, F1 at distance
// thresholds, normal consistency, the combined per-pair metric report, box
// IoU, and mesh average precision with the detection gating rules.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "voxmesh/geometry.hpp"
#include "voxmesh/nearest.hpp"
#include "voxmesh/sampling.hpp"

namespace voxmesh {

enum class RescaleMode {
    none,            // meshes are compared as posed
    factor_057,      // multiply coordinates by 0.57
    longest_edge_10  // scale both meshes so the ground-truth bbox's longest edge is 10
};

struct EvalConfig {
    RescaleMode rescale_mode{RescaleMode::longest_edge_10};
    int sample_count{10000};
    std::vector<double> tau{0.1, 0.3, 0.5};
    bool squared_tau{false};   // compare tau against squared distances
    double f1_threshold{0.5};  // fraction; a true positive needs F1 > 100 * this
    double iou_gate{0.3};      // detections with max box IoU <= this are ignored
    bool require_f1{true};     // false turns ap_mesh into a box-only AP
};

void validate_eval_config(const EvalConfig& cfg);

// Scale factor implied by the mode and the ground-truth mesh (1.0 for none,
// 0.57 for factor_057, 10 / longest gt bbox edge for longest_edge_10, which
// throws on zero-extent ground truth).
double rescale_factor(const TriangleMesh& ground_truth, RescaleMode mode);

// Uniform scale about the origin by the mode's factor; for longest_edge_10
// pass the ground-truth mesh of the pair as `reference` (the same factor
// must be applied to both meshes).
TriangleMesh rescale_mesh(const TriangleMesh& mesh, RescaleMode mode,
                          const TriangleMesh& reference);

struct FScore {
    double precision{0.0};  // percent of P within tau of Q
    double recall{0.0};     // percent of Q within tau of P
    double f1{0.0};         // harmonic mean, 0 when precision + recall = 0
};

FScore f_score(const std::vector<Vec3>& p, const std::vector<Vec3>& q, double tau,
               bool squared = false);
FScore f_score(const std::vector<Vec3>& p, const std::vector<Vec3>& q, double tau, bool squared,
               const NearestNeighborMap& nn);

// Mean of |u_p . u_q| over both nearest-neighbor directions; 1 for identical
// aligned clouds, 0 for orthogonal normals.
double normal_consistency(const PointSampleSet& p, const PointSampleSet& q);

struct MetricReport {
    double chamfer{0.0};
    double normal_consistency{0.0};
    std::vector<std::pair<double, FScore>> f1;  // one entry per requested tau, input order
};

// Rescales both meshes per cfg, samples cfg.sample_count points from each
// (gt on seed stream 0, pred on stream 1), and computes every metric.
MetricReport chamfer_metric(const TriangleMesh& ground_truth, const TriangleMesh& predicted,
                            const EvalConfig& cfg, uint64_t seed);

struct Box2D {
    double x0{0}, y0{0}, x1{0}, y1{0};

    double area() const { return (x1 - x0) * (y1 - y0); }
};

double box_iou(const Box2D& a, const Box2D& b);

struct Detection {
    std::string category;
    double score{0.0};
    Box2D box;
    TriangleMesh mesh;
};

struct GroundTruthInstance {
    std::string category;
    Box2D box;
    TriangleMesh mesh;
};

struct ApImage {
    std::vector<Detection> detections;
    std::vector<GroundTruthInstance> ground_truth;
};

struct ApResult {
    std::map<std::string, double> per_category;  // percent
    double mean{0.0};
};

// Detections whose best box IoU against any ground-truth box in their image
// is <= cfg.iou_gate are dropped outright. Survivors are ranked by score per
// category; each greedily claims the unclaimed same-category ground truth
// with the highest IoU (which must itself clear the gate) and counts as a
// true positive iff F1 at tau[0] of its mesh against that ground truth
// exceeds 100 * cfg.f1_threshold. AP is the area under the precision
// envelope; the mean runs over categories with ground truth. Unknown
// detection categories throw.
ApResult ap_mesh(const std::vector<ApImage>& images, const EvalConfig& cfg, uint64_t seed);

}  // namespace voxmesh
