// voxmesh command-line tool: voxel-to-mesh conversion, surface sampling,
// mesh comparison metrics, direct vertex fitting, refinement forward passes,
// and mesh average-precision evaluation over JSONL detection files.
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxmesh/cubify.hpp"
#include "voxmesh/io.hpp"
#include "voxmesh/losses.hpp"
#include "voxmesh/metrics.hpp"
#include "voxmesh/refine.hpp"
#include "voxmesh/rng.hpp"

namespace {

using namespace voxmesh;

// Exit codes, also listed in --help: 0 success, 2 bad usage or flags,
// 3 unreadable or unwritable file, 4 file format violation, 5 invalid input
// values.
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr int kExitDomain = 5;

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument(flag + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(flag + ": empty list");
    return out;
}

RescaleMode parse_rescale(const std::string& name) {
    if (name == "longest10") return RescaleMode::longest_edge_10;
    if (name == "factor057") return RescaleMode::factor_057;
    if (name == "none") return RescaleMode::none;
    throw std::invalid_argument("--rescale: expected longest10, factor057, or none, got '" +
                                name + "'");
}

std::string with_batch_suffix(const std::string& path, int index) {
    const size_t dot = path.rfind('.');
    if (dot == std::string::npos) return path + "_" + std::to_string(index);
    return path.substr(0, dot) + "_" + std::to_string(index) + path.substr(dot);
}

void cmd_cubify(const std::string& in, double tau, double voxel_size,
                const std::string& origin_csv, bool naive, const std::string& out) {
    const VoxelGrid grid = read_voxels(in);
    CubifyConfig cfg;
    cfg.threshold = tau;
    cfg.voxel_size = voxel_size;
    const std::vector<double> o = parse_double_list(origin_csv, "--origin");
    if (o.size() != 3) throw std::invalid_argument("--origin: expected x,y,z");
    cfg.origin = {o[0], o[1], o[2]};
    const std::vector<TriangleMesh> meshes = naive ? cubify_naive(grid, cfg) : cubify(grid, cfg);
    for (size_t i = 0; i < meshes.size(); ++i) {
        const std::string path = meshes.size() == 1 ? out
                                                    : with_batch_suffix(out, static_cast<int>(i));
        write_obj(meshes[i], path);
        std::printf("mesh %zu: %zu vertices, %zu faces -> %s\n", i, meshes[i].vertices.size(),
                    meshes[i].faces.size(), path.c_str());
    }
}

void cmd_sample(const std::string& in, int count, uint64_t seed, const std::string& out) {
    const TriangleMesh mesh = read_obj(in);
    const PointSampleSet samples = sample_points(mesh, count, seed);
    std::ostringstream text;
    char buf[160];
    for (size_t i = 0; i < samples.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g\n",
                      samples.points[i].x, samples.points[i].y, samples.points[i].z,
                      samples.normals[i].x, samples.normals[i].y, samples.normals[i].z);
        text << buf;
    }
    write_text_atomic(out, text.str());
    std::printf("wrote %d samples to %s\n", count, out.c_str());
}

void cmd_compare(const std::string& gt_path, const std::string& pred_path,
                 const std::string& rescale, const std::string& tau_csv, int samples,
                 uint64_t seed, bool squared, bool as_json) {
    EvalConfig cfg;
    cfg.rescale_mode = parse_rescale(rescale);
    cfg.tau = parse_double_list(tau_csv, "--tau");
    cfg.sample_count = samples;
    cfg.squared_tau = squared;
    const TriangleMesh gt = read_obj(gt_path);
    const TriangleMesh pred = read_obj(pred_path);
    const MetricReport report = chamfer_metric(gt, pred, cfg, seed);
    if (as_json) {
        nlohmann::json j;
        j["chamfer"] = report.chamfer;
        j["normal_consistency"] = report.normal_consistency;
        for (const auto& [tau, f] : report.f1) {
            char key[32];
            std::snprintf(key, sizeof(key), "%g", tau);
            j["f1"][key] = {{"precision", f.precision}, {"recall", f.recall}, {"f1", f.f1}};
        }
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("chamfer             %.6f\n", report.chamfer);
        std::printf("normal_consistency  %.6f\n", report.normal_consistency);
        for (const auto& [tau, f] : report.f1) {
            std::printf("f1@%-6g            %.2f (precision %.2f, recall %.2f)\n", tau, f.f1,
                        f.precision, f.recall);
        }
    }
}

TriangleMesh parse_init_mesh(const std::string& init) {
    if (init.rfind("icosphere:", 0) == 0) {
        return make_icosphere(std::stoi(init.substr(10)));
    }
    return read_obj(init);
}

void cmd_fit(const std::string& init, const std::string& target_path, int steps, double lr,
             double lambda_cham, double lambda_edge, int samples, uint64_t seed,
             const std::string& out, const std::string& trace_path) {
    const TriangleMesh start = parse_init_mesh(init);
    const TriangleMesh target = read_obj(target_path);
    const PointSampleSet target_samples = sample_points(target, samples, derive_seed(seed, ~0ull));
    LossWeights weights;
    weights.chamfer = lambda_cham;
    weights.edge = lambda_edge;
    const FitResult fit =
        optimize_vertices(start, target_samples, weights, steps, lr, samples, seed);
    write_obj(fit.mesh, out);
    if (!trace_path.empty()) {
        std::ostringstream text;
        text << "step,chamfer,edge,total\n";
        char buf[128];
        for (size_t s = 0; s < fit.trace.size(); ++s) {
            std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g\n", s, fit.trace[s].chamfer,
                          fit.trace[s].edge, fit.trace[s].total);
            text << buf;
        }
        write_text_atomic(trace_path, text.str());
    }
    std::printf("chamfer %.6f -> %.6f over %d steps; wrote %s\n", fit.trace.front().chamfer,
                fit.final.chamfer, steps, out.c_str());
}

void cmd_refine(const std::string& in, const std::string& features, const std::string& weights,
                const std::string& intrinsics_csv, const std::string& style_name,
                const std::string& subdivide_csv, const std::string& out) {
    const TriangleMesh mesh = read_obj(in);
    const FeatureMapBundle bundle = read_feature_maps(features);
    const WeightContainer container = read_weights(weights);
    StageStyle style;
    if (style_name == "light") {
        style = StageStyle::light;
    } else if (style_name == "residual") {
        style = StageStyle::residual;
    } else {
        throw std::invalid_argument("--style: expected light or residual");
    }
    std::vector<StageConfig> stages = stage_configs_from_weights(container, style);
    if (!subdivide_csv.empty()) {
        for (double d : parse_double_list(subdivide_csv, "--subdivide-stages")) {
            const int idx = static_cast<int>(d);
            if (idx < 0 || idx >= static_cast<int>(stages.size())) {
                throw std::invalid_argument("--subdivide-stages: stage index out of range");
            }
            stages[idx].subdivide_input = true;
        }
    }
    const std::vector<double> k = parse_double_list(intrinsics_csv, "--intrinsics");
    if (k.size() != 4) throw std::invalid_argument("--intrinsics: expected fx,fy,cx,cy");
    const CameraIntrinsics cam{k[0], k[1], k[2], k[3]};
    const std::vector<TriangleMesh> outputs = refine_mesh(
        mesh, bundle.maps, cam, bundle.image_width, bundle.image_height, stages);
    write_obj(outputs.back(), out);
    std::printf("refined through %zu stages: %zu vertices, %zu faces -> %s\n", outputs.size(),
                outputs.back().vertices.size(), outputs.back().faces.size(), out.c_str());
}

void cmd_eval_ap(const std::string& det_path, const std::string& gt_path,
                 const std::string& rescale, double tau, int samples, uint64_t seed,
                 double iou_gate, double f1_threshold, bool box_only, const std::string& out) {
    EvalConfig cfg;
    cfg.rescale_mode = parse_rescale(rescale);
    cfg.tau = {tau};
    cfg.sample_count = samples;
    cfg.iou_gate = iou_gate;
    cfg.f1_threshold = f1_threshold;
    cfg.require_f1 = !box_only;

    const std::vector<DetectionRecord> dets = read_detections_jsonl(det_path);
    const std::vector<GroundTruthRecord> gts = read_ground_truth_jsonl(gt_path);

    // Mesh paths resolve relative to their JSONL file.
    const auto resolve = [](const std::string& base, const std::string& rel) {
        std::filesystem::path p(rel);
        if (p.is_absolute()) return rel;
        return (std::filesystem::path(base).parent_path() / p).string();
    };
    std::map<std::string, ApImage> by_image;
    for (const GroundTruthRecord& g : gts) {
        GroundTruthInstance inst;
        inst.category = g.category;
        inst.box = g.box;
        inst.mesh = read_obj(resolve(gt_path, g.mesh_path));
        by_image[g.image_id].ground_truth.push_back(std::move(inst));
    }
    for (const DetectionRecord& d : dets) {
        Detection det;
        det.category = d.category;
        det.score = d.score;
        det.box = d.box;
        det.mesh = read_obj(resolve(det_path, d.mesh_path));
        by_image[d.image_id].detections.push_back(std::move(det));
    }
    std::vector<ApImage> images;
    images.reserve(by_image.size());
    for (auto& [id, img] : by_image) images.push_back(std::move(img));

    const ApResult result = ap_mesh(images, cfg, seed);
    nlohmann::json j;
    j["mean_ap"] = result.mean;
    for (const auto& [cat, ap] : result.per_category) j["per_category"][cat] = ap;
    write_text_atomic(out, j.dump(2) + "\n");
    std::printf("%s\n", j.dump(2).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxmesh: voxel-to-mesh kernels, shape losses, and evaluation metrics"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes:\n"
        "  0  success\n"
        "  2  bad usage (unknown flag or subcommand, missing argument)\n"
        "  3  unreadable or unwritable file\n"
        "  4  file format violation (bad magic, dims, payload, or parse error)\n"
        "  5  invalid input values (failed precondition)\n"
        "The VOXMESH_THREADS environment variable overrides the worker thread count.");

    // cubify
    std::string cu_in, cu_out, cu_origin = "0,0,0";
    double cu_tau = 0.2, cu_voxel = 1.0;
    bool cu_naive = false;
    auto* cubify_cmd = app.add_subcommand("cubify", "Convert a voxel grid to OBJ meshes");
    cubify_cmd->add_option("--in", cu_in, "input .voxl grid")->required();
    cubify_cmd->add_option("--tau", cu_tau, "occupancy threshold (default 0.2)");
    cubify_cmd->add_option("--voxel-size", cu_voxel, "world units per cell");
    cubify_cmd->add_option("--origin", cu_origin, "grid corner as x,y,z");
    cubify_cmd->add_flag("--naive", cu_naive, "use the reference per-voxel loop");
    cubify_cmd->add_option("--out", cu_out, "output .obj (batch index appended when N > 1)")
        ->required();

    // sample
    std::string sa_in, sa_out;
    int sa_n = 10000;
    uint64_t sa_seed = 0;
    auto* sample_cmd = app.add_subcommand("sample", "Sample surface points with normals");
    sample_cmd->add_option("--in", sa_in, "input .obj")->required();
    sample_cmd->add_option("-n", sa_n, "sample count (default 10000)");
    sample_cmd->add_option("--seed", sa_seed, "RNG seed");
    sample_cmd->add_option("--out", sa_out, "output text file: x y z nx ny nz per line")
        ->required();

    // compare
    std::string co_gt, co_pred, co_rescale = "longest10", co_tau = "0.1,0.3,0.5";
    int co_n = 10000;
    uint64_t co_seed = 0;
    bool co_json = false, co_squared = false;
    auto* compare_cmd = app.add_subcommand("compare", "Shape metrics between two meshes");
    compare_cmd->add_option("--gt", co_gt, "ground-truth .obj")->required();
    compare_cmd->add_option("--pred", co_pred, "predicted .obj")->required();
    compare_cmd->add_option("--rescale", co_rescale, "longest10|factor057|none");
    compare_cmd->add_option("--tau", co_tau, "comma-separated F1 thresholds");
    compare_cmd->add_option("-n,--samples", co_n, "points per mesh (default 10000)");
    compare_cmd->add_option("--seed", co_seed, "RNG seed");
    compare_cmd->add_flag("--squared", co_squared, "compare tau against squared distances");
    compare_cmd->add_flag("--json", co_json, "machine-readable output");

    // fit
    std::string fi_init, fi_target, fi_out, fi_trace;
    int fi_steps = 500, fi_n = 10000;
    double fi_lr = 0.01, fi_lcham = 1.0, fi_ledge = 0.2;
    uint64_t fi_seed = 0;
    auto* fit_cmd = app.add_subcommand("fit", "Gradient-descent vertex fit to a target surface");
    fit_cmd->add_option("--init", fi_init, "initial mesh: icosphere:L or a .obj path")
        ->required();
    fit_cmd->add_option("--target", fi_target, "target .obj")->required();
    fit_cmd->add_option("--steps", fi_steps, "descent steps (default 500)");
    fit_cmd->add_option("--lr", fi_lr, "step size (default 0.01)");
    fit_cmd->add_option("--lambda-cham", fi_lcham, "chamfer weight (default 1)");
    fit_cmd->add_option("--lambda-edge", fi_ledge, "edge loss weight (default 0.2)");
    fit_cmd->add_option("-n,--samples", fi_n, "points per side (default 10000)");
    fit_cmd->add_option("--seed", fi_seed, "RNG seed");
    fit_cmd->add_option("--trace", fi_trace, "optional CSV of per-step losses");
    fit_cmd->add_option("--out", fi_out, "output .obj")->required();

    // icosphere
    std::string ic_out;
    int ic_level = 0;
    auto* ico_cmd = app.add_subcommand("icosphere", "Generate a unit icosphere");
    ico_cmd->add_option("--level", ic_level, "subdivision level")->required();
    ico_cmd->add_option("--out", ic_out, "output .obj")->required();

    // subdivide
    std::string su_in, su_out;
    auto* sub_cmd = app.add_subcommand("subdivide", "Split each face into four");
    sub_cmd->add_option("--in", su_in, "input .obj")->required();
    sub_cmd->add_option("--out", su_out, "output .obj")->required();

    // refine
    std::string re_in, re_features, re_weights, re_intrinsics, re_out;
    std::string re_style = "light", re_subdiv;
    auto* refine_cmd = app.add_subcommand("refine", "Run mesh refinement stages");
    refine_cmd->add_option("--in", re_in, "input .obj")->required();
    refine_cmd->add_option("--features", re_features, "FMAP1 feature maps")->required();
    refine_cmd->add_option("--weights", re_weights, "MWTS1 stage weights")->required();
    refine_cmd->add_option("--intrinsics", re_intrinsics, "fx,fy,cx,cy")->required();
    refine_cmd->add_option("--style", re_style, "light|residual (default light)");
    refine_cmd->add_option("--subdivide-stages", re_subdiv,
                           "comma-separated stage indices that subdivide first");
    refine_cmd->add_option("--out", re_out, "output .obj (final stage)")->required();

    // eval-ap
    std::string ap_dets, ap_gt, ap_out, ap_rescale = "none";
    double ap_tau = 0.3, ap_gate = 0.3, ap_f1 = 0.5;
    int ap_n = 10000;
    uint64_t ap_seed = 0;
    bool ap_box_only = false;
    auto* ap_cmd = app.add_subcommand("eval-ap", "Mesh average precision over JSONL detections");
    ap_cmd->add_option("--detections", ap_dets, "detections .jsonl")->required();
    ap_cmd->add_option("--gt", ap_gt, "ground truth .jsonl")->required();
    ap_cmd->add_option("--tau", ap_tau, "F1 distance threshold (default 0.3)");
    ap_cmd->add_option("--rescale", ap_rescale, "none|longest10|factor057 (default none)");
    ap_cmd->add_option("-n,--samples", ap_n, "points per mesh (default 10000)");
    ap_cmd->add_option("--seed", ap_seed, "RNG seed");
    ap_cmd->add_option("--iou-gate", ap_gate, "ignore detections at or below this IoU");
    ap_cmd->add_option("--f1-threshold", ap_f1, "true positive needs F1 > 100 * this");
    ap_cmd->add_flag("--box-only", ap_box_only, "skip the mesh F1 rule (box AP)");
    ap_cmd->add_option("--out", ap_out, "output report .json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cubify_cmd->parsed()) {
            cmd_cubify(cu_in, cu_tau, cu_voxel, cu_origin, cu_naive, cu_out);
        } else if (sample_cmd->parsed()) {
            cmd_sample(sa_in, sa_n, sa_seed, sa_out);
        } else if (compare_cmd->parsed()) {
            cmd_compare(co_gt, co_pred, co_rescale, co_tau, co_n, co_seed, co_squared, co_json);
        } else if (fit_cmd->parsed()) {
            cmd_fit(fi_init, fi_target, fi_steps, fi_lr, fi_lcham, fi_ledge, fi_n, fi_seed,
                    fi_out, fi_trace);
        } else if (ico_cmd->parsed()) {
            const TriangleMesh mesh = make_icosphere(ic_level);
            write_obj(mesh, ic_out);
            std::printf("icosphere level %d: %zu vertices, %zu faces -> %s\n", ic_level,
                        mesh.vertices.size(), mesh.faces.size(), ic_out.c_str());
        } else if (sub_cmd->parsed()) {
            const TriangleMesh mesh = subdivide_faces(read_obj(su_in));
            write_obj(mesh, su_out);
            std::printf("subdivided: %zu vertices, %zu faces -> %s\n", mesh.vertices.size(),
                        mesh.faces.size(), su_out.c_str());
        } else if (refine_cmd->parsed()) {
            cmd_refine(re_in, re_features, re_weights, re_intrinsics, re_style, re_subdiv,
                       re_out);
        } else if (ap_cmd->parsed()) {
            cmd_eval_ap(ap_dets, ap_gt, ap_rescale, ap_tau, ap_n, ap_seed, ap_gate, ap_f1,
                        ap_box_only, ap_out);
        }
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFormat;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    }
    return 0;
}
