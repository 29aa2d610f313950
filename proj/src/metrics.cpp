#include "voxmesh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "voxmesh/losses.hpp"
#include "voxmesh/nearest.hpp"
#include "voxmesh/rng.hpp"

namespace voxmesh {

void validate_eval_config(const EvalConfig& cfg) {
    if (cfg.sample_count < 1) {
        throw std::invalid_argument("validate_eval_config: sample_count must be >= 1");
    }
    if (cfg.tau.empty()) {
        throw std::invalid_argument("validate_eval_config: at least one tau required");
    }
    for (double t : cfg.tau) {
        if (!(t > 0.0)) {
            throw std::invalid_argument("validate_eval_config: thresholds must be positive");
        }
    }
}

double rescale_factor(const TriangleMesh& ground_truth, RescaleMode mode) {
    switch (mode) {
        case RescaleMode::none:
            return 1.0;
        case RescaleMode::factor_057:
            return 0.57;
        case RescaleMode::longest_edge_10: {
            auto [lo, hi] = bounding_box(ground_truth);
            double longest = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
            if (!(longest > 0.0)) {
                throw std::invalid_argument(
                    "rescale_factor: ground-truth bounding box has zero extent");
            }
            return 10.0 / longest;
        }
    }
    throw std::invalid_argument("rescale_factor: unknown mode");
}

TriangleMesh rescale_mesh(const TriangleMesh& mesh, RescaleMode mode,
                          const TriangleMesh& reference) {
    const double s = rescale_factor(reference, mode);
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = v * s;
    return out;
}

FScore f_score(const std::vector<Vec3>& p, const std::vector<Vec3>& q, double tau, bool squared) {
    if (p.empty() || q.empty()) {
        throw std::invalid_argument("f_score: point sets must be nonempty");
    }
    return f_score(p, q, tau, squared, nearest_neighbors(p, q));
}

FScore f_score(const std::vector<Vec3>& p, const std::vector<Vec3>& q, double tau, bool squared,
               const NearestNeighborMap& nn) {
    auto within = [&](const Vec3& a, const Vec3& b) {
        const double d2 = (a - b).squared_norm();
        return squared ? d2 <= tau : d2 <= tau * tau;
    };
    size_t hit_p = 0, hit_q = 0;
    for (size_t i = 0; i < p.size(); ++i) hit_p += within(p[i], q[nn.p_to_q[i]]);
    for (size_t j = 0; j < q.size(); ++j) hit_q += within(q[j], p[nn.q_to_p[j]]);
    FScore s;
    s.precision = 100.0 * static_cast<double>(hit_p) / static_cast<double>(p.size());
    s.recall = 100.0 * static_cast<double>(hit_q) / static_cast<double>(q.size());
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

double normal_consistency(const PointSampleSet& p, const PointSampleSet& q) {
    return -0.5 * normal_distance(p, q);
}

MetricReport chamfer_metric(const TriangleMesh& ground_truth, const TriangleMesh& predicted,
                            const EvalConfig& cfg, uint64_t seed) {
    validate_eval_config(cfg);
    const TriangleMesh gt = rescale_mesh(ground_truth, cfg.rescale_mode, ground_truth);
    const TriangleMesh pred = rescale_mesh(predicted, cfg.rescale_mode, ground_truth);
    const PointSampleSet gt_samples = sample_points(gt, cfg.sample_count, derive_seed(seed, 0));
    const PointSampleSet pred_samples =
        sample_points(pred, cfg.sample_count, derive_seed(seed, 1));

    // One nearest-neighbor round serves chamfer, normal consistency, and
    // every F1 threshold.
    const NearestNeighborMap nn = nearest_neighbors(pred_samples.points, gt_samples.points);
    MetricReport report;
    report.chamfer = chamfer(pred_samples, gt_samples, nn).value;
    report.normal_consistency = -0.5 * normal_distance(pred_samples, gt_samples, nn);
    report.f1.reserve(cfg.tau.size());
    for (double t : cfg.tau) {
        report.f1.emplace_back(t, f_score(pred_samples.points, gt_samples.points, t,
                                          cfg.squared_tau, nn));
    }
    return report;
}

double box_iou(const Box2D& a, const Box2D& b) {
    if (!(a.area() > 0.0) || !(b.area() > 0.0)) {
        throw std::invalid_argument("box_iou: boxes must have positive area");
    }
    const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
    const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
    const double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

namespace {

// Area under the precision envelope over the ranked detections, in percent.
double average_precision(const std::vector<char>& is_tp, size_t gt_count) {
    if (gt_count == 0) return 0.0;
    std::vector<double> precision, recall;
    size_t tp = 0, fp = 0;
    for (char t : is_tp) {
        t ? ++tp : ++fp;
        precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(gt_count));
    }
    for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i) {
        precision[i] = std::max(precision[i], precision[i + 1]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (size_t i = 0; i < precision.size(); ++i) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    return 100.0 * ap;
}

}  // namespace

ApResult ap_mesh(const std::vector<ApImage>& images, const EvalConfig& cfg, uint64_t seed) {
    validate_eval_config(cfg);

    std::set<std::string> categories;
    std::map<std::string, size_t> gt_counts;
    for (const ApImage& img : images) {
        for (const GroundTruthInstance& gt : img.ground_truth) {
            categories.insert(gt.category);
            ++gt_counts[gt.category];
        }
    }
    for (const ApImage& img : images) {
        for (const Detection& det : img.detections) {
            if (!categories.count(det.category)) {
                throw std::invalid_argument("ap_mesh: unknown category '" + det.category + "'");
            }
        }
    }

    struct Ranked {
        double score;
        size_t image;
        size_t det;
    };
    std::map<std::string, std::vector<Ranked>> per_category;
    for (size_t i = 0; i < images.size(); ++i) {
        const ApImage& img = images[i];
        for (size_t d = 0; d < img.detections.size(); ++d) {
            const Detection& det = img.detections[d];
            // Gate against every annotated region regardless of category;
            // predictions on unannotated objects are not penalized.
            double best_iou = 0.0;
            for (const GroundTruthInstance& gt : img.ground_truth) {
                best_iou = std::max(best_iou, box_iou(det.box, gt.box));
            }
            if (best_iou <= cfg.iou_gate) continue;
            per_category[det.category].push_back({det.score, i, d});
        }
    }

    ApResult result;
    uint64_t pair_stream = 0;
    for (const std::string& category : categories) {
        auto& ranked = per_category[category];
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
        std::map<size_t, std::vector<char>> claimed;  // image -> per-gt flag
        std::vector<char> is_tp;
        for (const Ranked& r : ranked) {
            const ApImage& img = images[r.image];
            const Detection& det = img.detections[r.det];
            auto& taken = claimed[r.image];
            taken.resize(img.ground_truth.size(), 0);
            int best_gt = -1;
            double best_iou = cfg.iou_gate;  // a claimable gt must clear the gate
            for (size_t g = 0; g < img.ground_truth.size(); ++g) {
                if (img.ground_truth[g].category != category || taken[g]) continue;
                double iou = box_iou(det.box, img.ground_truth[g].box);
                if (iou > best_iou) {
                    best_iou = iou;
                    best_gt = static_cast<int>(g);
                }
            }
            bool tp = false;
            if (best_gt >= 0) {
                tp = true;
                if (cfg.require_f1) {
                    const TriangleMesh& gt_mesh = img.ground_truth[best_gt].mesh;
                    const TriangleMesh gt_scaled =
                        rescale_mesh(gt_mesh, cfg.rescale_mode, gt_mesh);
                    const TriangleMesh pred_scaled =
                        rescale_mesh(det.mesh, cfg.rescale_mode, gt_mesh);
                    const uint64_t pair_seed = derive_seed(seed, pair_stream++);
                    const PointSampleSet gt_pts =
                        sample_points(gt_scaled, cfg.sample_count, derive_seed(pair_seed, 0));
                    const PointSampleSet pred_pts =
                        sample_points(pred_scaled, cfg.sample_count, derive_seed(pair_seed, 1));
                    const FScore f = f_score(pred_pts.points, gt_pts.points, cfg.tau.front(),
                                             cfg.squared_tau);
                    tp = f.f1 > 100.0 * cfg.f1_threshold;
                }
                if (tp) taken[best_gt] = 1;
            }
            is_tp.push_back(tp ? 1 : 0);
        }
        result.per_category[category] = average_precision(is_tp, gt_counts[category]);
    }

    for (const auto& [cat, ap] : result.per_category) result.mean += ap;
    if (!result.per_category.empty()) {
        result.mean /= static_cast<double>(result.per_category.size());
    }
    return result;
}

}  // namespace voxmesh
