#include "voxmesh/refine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "voxmesh/rng.hpp"

namespace voxmesh {

namespace {

// out = x * w^T, i.e. out(i, r) = sum_c w(r, c) * x(i, c).
Matrix apply_linear(const Matrix& x, const Matrix& w) {
    Matrix out(x.rows, w.rows);
    for (int i = 0; i < x.rows; ++i) {
        const double* xi = &x.values[static_cast<size_t>(i) * x.cols];
        for (int r = 0; r < w.rows; ++r) {
            const double* wr = &w.values[static_cast<size_t>(r) * w.cols];
            double acc = 0.0;
            for (int c = 0; c < x.cols; ++c) acc += wr[c] * xi[c];
            out.at(i, r) = acc;
        }
    }
    return out;
}

Matrix concat_cols(const std::vector<const Matrix*>& parts) {
    int rows = parts.front()->rows;
    int cols = 0;
    for (const Matrix* p : parts) cols += p->cols;
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        int at = 0;
        for (const Matrix* p : parts) {
            for (int c = 0; c < p->cols; ++c) out.at(i, at + c) = p->at(i, c);
            at += p->cols;
        }
    }
    return out;
}

Matrix positions_matrix(const std::vector<Vec3>& vertices) {
    Matrix m(static_cast<int>(vertices.size()), 3);
    for (size_t i = 0; i < vertices.size(); ++i) {
        m.at(static_cast<int>(i), 0) = vertices[i].x;
        m.at(static_cast<int>(i), 1) = vertices[i].y;
        m.at(static_cast<int>(i), 2) = vertices[i].z;
    }
    return m;
}

// Face split with the creation order of edge midpoints reported, so callers
// can upsample per-vertex data (midpoint = mean of its edge endpoints).
TriangleMesh subdivide_with_map(const TriangleMesh& mesh, std::vector<Edge>* midpoint_edges) {
    validate_mesh(mesh);
    TriangleMesh out;
    out.vertices = mesh.vertices;
    std::map<Edge, int> midpoint;
    auto mid = [&](int a, int b) {
        Edge e{std::min(a, b), std::max(a, b)};
        auto it = midpoint.find(e);
        if (it != midpoint.end()) return it->second;
        int id = static_cast<int>(out.vertices.size());
        out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        midpoint.emplace(e, id);
        if (midpoint_edges) midpoint_edges->push_back(e);
        return id;
    };
    out.faces.reserve(mesh.faces.size() * 4);
    for (const Face& f : mesh.faces) {
        int ab = mid(f[0], f[1]);
        int bc = mid(f[1], f[2]);
        int ca = mid(f[2], f[0]);
        out.faces.push_back({f[0], ab, ca});
        out.faces.push_back({f[1], bc, ab});
        out.faces.push_back({f[2], ca, bc});
        out.faces.push_back({ab, bc, ca});
    }
    return out;
}

}  // namespace

Matrix vert_align(const std::vector<FeatureMap>& maps, const CameraIntrinsics& K,
                  const std::vector<Vec3>& vertices, int image_width, int image_height) {
    if (maps.empty()) throw std::invalid_argument("vert_align: no feature maps");
    if (image_width <= 0 || image_height <= 0) {
        throw std::invalid_argument("vert_align: image size must be positive");
    }
    for (const FeatureMap& m : maps) validate_feature_map(m);
    const std::vector<Vec2> pixels = project_points(K, vertices);

    int total_channels = 0;
    for (const FeatureMap& m : maps) total_channels += m.channels;
    Matrix out(static_cast<int>(vertices.size()), total_channels);

    for (size_t i = 0; i < pixels.size(); ++i) {
        int col = 0;
        for (const FeatureMap& m : maps) {
            double u = pixels[i].x * static_cast<double>(m.width) / image_width;
            double v = pixels[i].y * static_cast<double>(m.height) / image_height;
            u = std::clamp(u, 0.0, static_cast<double>(m.width - 1));
            v = std::clamp(v, 0.0, static_cast<double>(m.height - 1));
            const int x0 = static_cast<int>(std::floor(u));
            const int y0 = static_cast<int>(std::floor(v));
            const int x1 = std::min(x0 + 1, m.width - 1);
            const int y1 = std::min(y0 + 1, m.height - 1);
            const double fx = u - x0, fy = v - y0;
            for (int c = 0; c < m.channels; ++c) {
                const double top = (1.0 - fx) * m.at(y0, x0, c) + fx * m.at(y0, x1, c);
                const double bot = (1.0 - fx) * m.at(y1, x0, c) + fx * m.at(y1, x1, c);
                out.at(static_cast<int>(i), col + c) = (1.0 - fy) * top + fy * bot;
            }
            col += m.channels;
        }
    }
    return out;
}

Matrix graph_conv(const Matrix& features, const std::vector<std::vector<int>>& adjacency,
                  const Matrix& w0, const Matrix& w1) {
    validate_matrix(w0);
    validate_matrix(w1);
    if (w0.cols != features.cols || w1.cols != features.cols || w0.rows != w1.rows) {
        throw std::invalid_argument("graph_conv: weight shapes do not match feature dim " +
                                    std::to_string(features.cols));
    }
    if (adjacency.size() != static_cast<size_t>(features.rows)) {
        throw std::invalid_argument("graph_conv: adjacency size does not match vertex count");
    }
    // Neighbor-sum once, then two linear maps; isolated vertices have a zero
    // neighbor sum and reduce to the W0 term.
    Matrix nsum(features.rows, features.cols);
    for (int i = 0; i < features.rows; ++i) {
        for (int j : adjacency[i]) {
            for (int c = 0; c < features.cols; ++c) nsum.at(i, c) += features.at(j, c);
        }
    }
    Matrix self = apply_linear(features, w0);
    Matrix neigh = apply_linear(nsum, w1);
    Matrix out(features.rows, w0.rows);
    for (size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = std::max(0.0, self.values[i] + neigh.values[i]);
    }
    return out;
}

VertexRefineResult vertex_refine(const std::vector<Vec3>& vertices, const Matrix& features,
                                 const Matrix& w_vert) {
    validate_matrix(w_vert);
    if (features.rows != static_cast<int>(vertices.size())) {
        throw std::invalid_argument("vertex_refine: feature rows do not match vertex count");
    }
    if (w_vert.rows != 3 || w_vert.cols != features.cols + 3) {
        throw std::invalid_argument("vertex_refine: W_vert must be 3 x (feature_dim + 3), got " +
                                    std::to_string(w_vert.rows) + "x" +
                                    std::to_string(w_vert.cols));
    }
    Matrix pos = positions_matrix(vertices);
    Matrix input = concat_cols({&features, &pos});
    Matrix raw = apply_linear(input, w_vert);
    VertexRefineResult res;
    res.vertices.resize(vertices.size());
    res.displacements.resize(vertices.size());
    for (size_t i = 0; i < vertices.size(); ++i) {
        Vec3 d{std::tanh(raw.at(static_cast<int>(i), 0)), std::tanh(raw.at(static_cast<int>(i), 1)),
               std::tanh(raw.at(static_cast<int>(i), 2))};
        res.displacements[i] = d;
        res.vertices[i] = vertices[i] + d;
    }
    return res;
}

namespace {

struct StageWiring {
    const Matrix* proj{nullptr};
    struct Conv {
        const Matrix* w0;
        const Matrix* w1;
    };
    std::vector<Conv> convs;
    std::vector<const Matrix*> skips;  // residual only; nullptr = identity skip
    const Matrix* vert{nullptr};
};

int conv_input_dim(const StageConfig& cfg, int k, int g_dim) {
    if (cfg.style == StageStyle::light) {
        return k == 0 ? g_dim : cfg.feature_dim + 3;
    }
    // residual: first convolution of the first block sees g; everything else
    // runs at feature_dim.
    return k == 0 ? g_dim : cfg.feature_dim;
}

StageWiring resolve_wiring(const StageConfig& cfg, int aligned_dim, bool has_prev) {
    if (cfg.feature_dim <= 0) {
        throw std::invalid_argument("stage config: feature_dim must be positive");
    }
    if (cfg.conv_count < 1) {
        throw std::invalid_argument("stage config: conv_count must be >= 1");
    }
    if (cfg.style == StageStyle::residual && cfg.conv_count % 2 != 0) {
        throw std::invalid_argument("stage config: residual style needs an even conv_count");
    }
    const int g_dim = (has_prev ? cfg.feature_dim : 0) + 3 + cfg.feature_dim;
    StageWiring w;
    size_t at = 0;
    auto take = [&](int rows, int cols, const char* what) -> const Matrix* {
        if (at >= cfg.weights.size()) {
            throw std::invalid_argument(std::string("stage config: missing weight for ") + what);
        }
        const Matrix& m = cfg.weights[at++];
        validate_matrix(m);
        if (m.rows != rows || m.cols != cols) {
            throw std::invalid_argument(std::string("stage config: ") + what + " expects " +
                                        std::to_string(rows) + "x" + std::to_string(cols) +
                                        ", got " + std::to_string(m.rows) + "x" +
                                        std::to_string(m.cols));
        }
        return &m;
    };

    w.proj = take(cfg.feature_dim, aligned_dim, "projection");
    if (cfg.style == StageStyle::light) {
        for (int k = 0; k < cfg.conv_count; ++k) {
            int in = conv_input_dim(cfg, k, g_dim);
            StageWiring::Conv c{take(cfg.feature_dim, in, "conv W0"),
                                take(cfg.feature_dim, in, "conv W1")};
            w.convs.push_back(c);
        }
    } else {
        const int blocks = cfg.conv_count / 2;
        for (int b = 0; b < blocks; ++b) {
            int in = conv_input_dim(cfg, 2 * b, g_dim);
            w.convs.push_back({take(cfg.feature_dim, in, "conv W0"),
                               take(cfg.feature_dim, in, "conv W1")});
            w.convs.push_back({take(cfg.feature_dim, cfg.feature_dim, "conv W0"),
                               take(cfg.feature_dim, cfg.feature_dim, "conv W1")});
            w.skips.push_back(in != cfg.feature_dim
                                  ? take(cfg.feature_dim, in, "block skip projection")
                                  : nullptr);
        }
    }
    w.vert = take(3, cfg.feature_dim + 3, "vertex update");
    if (at != cfg.weights.size()) {
        throw std::invalid_argument("stage config: " + std::to_string(cfg.weights.size() - at) +
                                    " unused weight matrices");
    }
    return w;
}

}  // namespace

void validate_stage_config(const StageConfig& cfg, int aligned_dim, bool has_prev_features) {
    resolve_wiring(cfg, aligned_dim, has_prev_features);
}

StageResult refinement_stage(const TriangleMesh& mesh, const Matrix* prev_features,
                             const std::vector<FeatureMap>& maps, const CameraIntrinsics& K,
                             int image_width, int image_height, const StageConfig& cfg) {
    validate_mesh(mesh);
    TriangleMesh working = mesh;
    Matrix upsampled_prev;
    if (cfg.subdivide_input) {
        std::vector<Edge> midpoints;
        working = subdivide_with_map(mesh, &midpoints);
        if (prev_features) {
            upsampled_prev = Matrix(static_cast<int>(working.vertices.size()),
                                    prev_features->cols);
            for (int i = 0; i < prev_features->rows; ++i) {
                for (int c = 0; c < prev_features->cols; ++c) {
                    upsampled_prev.at(i, c) = prev_features->at(i, c);
                }
            }
            for (size_t k = 0; k < midpoints.size(); ++k) {
                int row = prev_features->rows + static_cast<int>(k);
                for (int c = 0; c < prev_features->cols; ++c) {
                    upsampled_prev.at(row, c) = 0.5 * (prev_features->at(midpoints[k].first, c) +
                                                       prev_features->at(midpoints[k].second, c));
                }
            }
            prev_features = &upsampled_prev;
        }
    }

    int aligned_dim = 0;
    for (const FeatureMap& m : maps) aligned_dim += m.channels;
    const StageWiring wiring = resolve_wiring(cfg, aligned_dim, prev_features != nullptr);
    if (prev_features && prev_features->rows != static_cast<int>(working.vertices.size())) {
        throw std::invalid_argument("refinement_stage: previous feature rows do not match mesh");
    }

    const Matrix aligned = vert_align(maps, K, working.vertices, image_width, image_height);
    const Matrix proj = apply_linear(aligned, *wiring.proj);
    const Matrix pos = positions_matrix(working.vertices);

    std::vector<const Matrix*> parts;
    if (prev_features) parts.push_back(prev_features);
    parts.push_back(&pos);
    parts.push_back(&proj);
    Matrix g = concat_cols(parts);

    const std::vector<std::vector<int>> adj = vertex_adjacency(working);
    Matrix h;
    if (cfg.style == StageStyle::light) {
        h = graph_conv(g, adj, *wiring.convs[0].w0, *wiring.convs[0].w1);
        for (size_t k = 1; k < wiring.convs.size(); ++k) {
            Matrix input = concat_cols({&pos, &h});
            h = graph_conv(input, adj, *wiring.convs[k].w0, *wiring.convs[k].w1);
        }
    } else {
        Matrix block_in = std::move(g);
        for (size_t b = 0; b < wiring.skips.size(); ++b) {
            Matrix a = graph_conv(block_in, adj, *wiring.convs[2 * b].w0, *wiring.convs[2 * b].w1);
            Matrix c = graph_conv(a, adj, *wiring.convs[2 * b + 1].w0, *wiring.convs[2 * b + 1].w1);
            Matrix skip = wiring.skips[b] ? apply_linear(block_in, *wiring.skips[b])
                                          : std::move(block_in);
            for (size_t i = 0; i < c.values.size(); ++i) c.values[i] += skip.values[i];
            block_in = std::move(c);
        }
        h = std::move(block_in);
    }

    VertexRefineResult refined = vertex_refine(working.vertices, h, *wiring.vert);
    StageResult res;
    res.mesh.vertices = std::move(refined.vertices);
    res.mesh.faces = working.faces;
    res.features = std::move(h);
    return res;
}

std::vector<TriangleMesh> refine_mesh(const TriangleMesh& initial,
                                      const std::vector<FeatureMap>& maps,
                                      const CameraIntrinsics& K, int image_width,
                                      int image_height, const std::vector<StageConfig>& stages) {
    if (stages.empty()) throw std::invalid_argument("refine_mesh: at least one stage required");
    std::vector<TriangleMesh> out;
    out.reserve(stages.size());
    TriangleMesh current = initial;
    Matrix features;
    for (size_t s = 0; s < stages.size(); ++s) {
        StageResult r = refinement_stage(current, s == 0 ? nullptr : &features, maps, K,
                                         image_width, image_height, stages[s]);
        current = r.mesh;
        features = std::move(r.features);
        out.push_back(std::move(r.mesh));
    }
    return out;
}

TriangleMesh make_icosphere(int level) {
    if (level < 0) throw std::invalid_argument("make_icosphere: level must be >= 0");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh mesh;
    mesh.vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    mesh.faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    auto project = [](TriangleMesh& m) {
        for (Vec3& v : m.vertices) v = v * (1.0 / v.norm());
    };
    project(mesh);
    for (int l = 0; l < level; ++l) {
        mesh = subdivide_faces(mesh);
        project(mesh);
    }
    return mesh;
}

TriangleMesh subdivide_faces(const TriangleMesh& mesh) {
    return subdivide_with_map(mesh, nullptr);
}

StageConfig random_stage_config(StageStyle style, int conv_count, int feature_dim,
                                int aligned_dim, bool has_prev_features, uint64_t seed) {
    StageConfig cfg;
    cfg.style = style;
    cfg.conv_count = conv_count;
    cfg.feature_dim = feature_dim;
    const int g_dim = (has_prev_features ? feature_dim : 0) + 3 + feature_dim;
    uint64_t stream = 0;
    auto next = [&](int rows, int cols) {
        cfg.weights.push_back(random_matrix(rows, cols, derive_seed(seed, stream++)));
    };
    next(feature_dim, aligned_dim);
    if (style == StageStyle::light) {
        for (int k = 0; k < conv_count; ++k) {
            int in = k == 0 ? g_dim : feature_dim + 3;
            next(feature_dim, in);
            next(feature_dim, in);
        }
    } else {
        for (int b = 0; b < conv_count / 2; ++b) {
            int in = b == 0 ? g_dim : feature_dim;
            next(feature_dim, in);
            next(feature_dim, in);
            next(feature_dim, feature_dim);
            next(feature_dim, feature_dim);
            if (in != feature_dim) next(feature_dim, in);
        }
    }
    next(3, feature_dim + 3);
    return cfg;
}

}  // namespace voxmesh
