#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "voxmesh/refine.hpp"
#include "voxmesh/rng.hpp"

using namespace voxmesh;

namespace {

FeatureMap random_map(int h, int w, int c, uint64_t seed) {
    FeatureMap m(h, w, c);
    for (size_t i = 0; i < m.data.size(); ++i) {
        m.data[i] = static_cast<float>(2.0 * rng_uniform(seed, i) - 1.0);
    }
    return m;
}

// Test mesh posed in front of the camera.
TriangleMesh posed_sphere(int level) {
    TriangleMesh mesh = make_icosphere(level);
    for (Vec3& v : mesh.vertices) v.z += 3.0;
    return mesh;
}

const CameraIntrinsics kCam{8.0, 8.0, 4.0, 4.0};
constexpr int kImage = 8;

// FNV-1a over printf'd coordinates, stable across platforms at 1e-9.
uint64_t mesh_hash(const TriangleMesh& mesh) {
    uint64_t h = 1469598103934665603ull;
    char buf[96];
    auto feed = [&](const char* s) {
        for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 1099511628211ull;
    };
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.9e %.9e %.9e;", v.x, v.y, v.z);
        feed(buf);
    }
    for (const Face& f : mesh.faces) {
        std::snprintf(buf, sizeof(buf), "%d %d %d;", f[0], f[1], f[2]);
        feed(buf);
    }
    return h;
}

}  // namespace

TEST_CASE("vert_align interpolation fixtures") {
    FeatureMap map(2, 2, 1);
    map.at(0, 0, 0) = 1.0f;
    map.at(0, 1, 0) = 3.0f;
    map.at(1, 0, 0) = 5.0f;
    map.at(1, 1, 0) = 7.0f;
    const CameraIntrinsics ident{1, 1, 0, 0};

    // Vertex projecting exactly onto sample (1, 0): that sample's value.
    Matrix out = vert_align({map}, ident, {{1.0, 0.0, 1.0}}, 2, 2);
    CHECK(out.at(0, 0) == 3.0);

    // Midpoint of two horizontally adjacent samples: their average.
    out = vert_align({map}, ident, {{0.5, 0.0, 1.0}}, 2, 2);
    CHECK(out.at(0, 0) == 2.0);

    // Bilinear center.
    out = vert_align({map}, ident, {{0.5, 0.5, 1.0}}, 2, 2);
    CHECK(out.at(0, 0) == 4.0);

    // Out-of-image projections clamp to the border.
    out = vert_align({map}, ident, {{-50.0, -50.0, 1.0}, {50.0, 50.0, 1.0}}, 2, 2);
    CHECK(out.at(0, 0) == 1.0);
    CHECK(out.at(1, 0) == 7.0);

    // Constant map gives constant output wherever the vertex projects.
    FeatureMap flat(5, 7, 2);
    for (auto& v : flat.data) v = 2.5f;
    out = vert_align({flat}, kCam, {{0.3, -0.2, 2.0}, {40, 40, 0.7}}, kImage, kImage);
    for (int i = 0; i < out.rows; ++i) {
        CHECK(out.at(i, 0) == 2.5);
        CHECK(out.at(i, 1) == 2.5);
    }

    // Multi-scale maps concatenate channel-wise in order.
    FeatureMap a(4, 4, 2), b(2, 2, 3);
    for (auto& v : a.data) v = 1.0f;
    for (auto& v : b.data) v = 2.0f;
    out = vert_align({a, b}, ident, {{1.0, 1.0, 1.0}}, 4, 4);
    REQUIRE(out.cols == 5);
    CHECK(out.at(0, 0) == 1.0);
    CHECK(out.at(0, 4) == 2.0);

    CHECK_THROWS_AS(vert_align({map}, ident, {{0, 0, -1}}, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(vert_align({}, ident, {{0, 0, 1}}, 2, 2), std::invalid_argument);
}

TEST_CASE("graph_conv formula fixtures") {
    // Identity W0, zero W1, nonnegative inputs: output equals input.
    Matrix f(3, 2);
    f.values = {1.0, 0.5, 2.0, 0.0, 0.25, 3.0};
    std::vector<std::vector<int>> path = {{1}, {0, 2}, {1}};
    Matrix w0(2, 2);
    w0.values = {1, 0, 0, 1};
    Matrix w1(2, 2);
    const Matrix same = graph_conv(f, path, w0, w1);
    CHECK(same.values == f.values);

    // All-zero weights: all-zero output.
    const Matrix zero = graph_conv(f, path, Matrix(2, 2), Matrix(2, 2));
    for (double v : zero.values) CHECK(v == 0.0);

    // Hand-computed 3-vertex path with asymmetric weights, evaluated scalar
    // by scalar: w0 = [[1,2],[0,1]], w1 = [[1,0],[-1,1]].
    w0.values = {1, 2, 0, 1};
    w1.values = {1, 0, -1, 1};
    const Matrix out = graph_conv(f, path, w0, w1);
    // vertex 0: neighbors {1}: w0*(1,0.5) + w1*(2,0) = (2,0.5) + (2,-2) -> relu(4,-1.5)
    CHECK(out.at(0, 0) == 4.0);
    CHECK(out.at(0, 1) == 0.0);
    // vertex 1: neighbors {0,2}: sum f = (1.25,3.5); w0*(2,0) = (2,0); w1*sum = (1.25, 2.25)
    CHECK(out.at(1, 0) == 3.25);
    CHECK(out.at(1, 1) == 2.25);
    // vertex 2: neighbors {1}: w0*(0.25,3) = (6.25,3); w1*(2,0) = (2,-2)
    CHECK(out.at(2, 0) == 8.25);
    CHECK(out.at(2, 1) == 1.0);

    // Isolated vertex keeps only the W0 term.
    std::vector<std::vector<int>> isolated = {{}, {}, {}};
    const Matrix solo = graph_conv(f, isolated, w0, w1);
    CHECK(solo.at(0, 0) == 2.0);

    Matrix bad(2, 3);
    CHECK_THROWS_AS(graph_conv(f, path, bad, w1), std::invalid_argument);
}

TEST_CASE("graph_conv is permutation equivariant") {
    const TriangleMesh mesh = make_icosphere(1);
    const auto adj = vertex_adjacency(mesh);
    const int n = static_cast<int>(mesh.vertices.size());
    Matrix f(n, 4);
    for (size_t i = 0; i < f.values.size(); ++i) f.values[i] = rng_uniform(3, i) - 0.5;
    const Matrix w0 = random_matrix(5, 4, 100);
    const Matrix w1 = random_matrix(5, 4, 101);
    const Matrix base = graph_conv(f, adj, w0, w1);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng_bits(9, i) % (i + 1)]);
    }
    Matrix pf(n, 4);
    std::vector<std::vector<int>> padj(n);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < 4; ++c) pf.at(perm[i], c) = f.at(i, c);
        for (int j : adj[i]) padj[perm[i]].push_back(perm[j]);
    }
    const Matrix permuted = graph_conv(pf, padj, w0, w1);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < 5; ++c) {
            CHECK(permuted.at(perm[i], c) == doctest::Approx(base.at(i, c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("vertex_refine fixtures and the tanh bound") {
    // Zero weights leave vertices in place.
    Matrix f(2, 4);
    for (size_t i = 0; i < f.values.size(); ++i) f.values[i] = rng_uniform(5, i);
    const std::vector<Vec3> verts = {{0.5, -1, 2}, {3, 4, 5}};
    auto res = vertex_refine(verts, f, Matrix(3, 7));
    CHECK(res.vertices[0].x == verts[0].x);
    CHECK(res.vertices[1].z == verts[1].z);

    // Single vertex, hand-picked weights: displacement = tanh(W [f; v]).
    Matrix feat(1, 2);
    feat.values = {0.5, -1.0};
    Matrix w(3, 5);
    // rows: x picks f0*2, y picks v_x, z picks f1 + v_z.
    w.values = {2, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1};
    res = vertex_refine({{0.25, 0, 3.0}}, feat, w);
    CHECK(res.displacements[0].x == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
    CHECK(res.displacements[0].y == doctest::Approx(std::tanh(0.25)).epsilon(1e-15));
    CHECK(res.displacements[0].z == doctest::Approx(std::tanh(2.0)).epsilon(1e-15));
    CHECK(res.vertices[0].x == doctest::Approx(0.25 + std::tanh(1.0)).epsilon(1e-15));

    // Any weights: per-coordinate displacement bounded by the tanh range.
    // Moderate inputs stay strictly inside (-1, 1); double-precision tanh
    // rounds to exactly 1 once |x| exceeds ~19, so saturated inputs touch
    // the boundary but never pass it.
    const Matrix moderate = random_matrix(3, 7, 77);
    res = vertex_refine(verts, f, moderate);
    for (const Vec3& d : res.displacements) {
        CHECK(std::abs(d.x) < 1.0);
        CHECK(std::abs(d.y) < 1.0);
        CHECK(std::abs(d.z) < 1.0);
    }
    Matrix wild(2, 4);
    for (size_t i = 0; i < wild.values.size(); ++i) wild.values[i] = 1e6 * rng_uniform(6, i);
    res = vertex_refine(verts, wild, moderate);
    for (const Vec3& d : res.displacements) {
        CHECK(std::abs(d.x) <= 1.0);
        CHECK(std::abs(d.y) <= 1.0);
        CHECK(std::abs(d.z) <= 1.0);
    }

    CHECK_THROWS_AS(vertex_refine(verts, f, Matrix(3, 6)), std::invalid_argument);
    CHECK_THROWS_AS(vertex_refine(verts, f, Matrix(2, 7)), std::invalid_argument);
}

TEST_CASE("icosphere structural constants") {
    struct Row {
        int level, v, e, f;
    };
    for (const Row& row : {Row{0, 12, 30, 20}, Row{2, 162, 480, 320}, Row{4, 2562, 7680, 5120}}) {
        const TriangleMesh s = make_icosphere(row.level);
        CHECK(static_cast<int>(s.vertices.size()) == row.v);
        CHECK(static_cast<int>(mesh_edges(s).size()) == row.e);
        CHECK(static_cast<int>(s.faces.size()) == row.f);
        CHECK(euler_characteristic(s) == 2);
        CHECK(is_watertight(s));
        for (const Vec3& v : s.vertices) CHECK(std::abs(v.norm() - 1.0) < 1e-9);
        // Outward orientation.
        for (size_t fi = 0; fi < s.faces.size(); ++fi) {
            Vec3 centroid{0, 0, 0};
            for (int k = 0; k < 3; ++k) centroid += s.vertices[s.faces[fi][k]];
            CHECK(face_normal(s, static_cast<int>(fi)).dot(centroid) > 0.0);
        }
    }
    CHECK_THROWS_AS(make_icosphere(-1), std::invalid_argument);
}

TEST_CASE("subdivision counts and watertightness") {
    const TriangleMesh ico = make_icosphere(0);
    const TriangleMesh sub = subdivide_faces(ico);
    CHECK(sub.vertices.size() == 42);
    CHECK(sub.faces.size() == 80);
    CHECK(is_watertight(sub));

    // |V'| = |V| + |E|, |F'| = 4 |F| across meshes of varying topology.
    for (int level : {0, 1, 2}) {
        const TriangleMesh m = make_icosphere(level);
        const TriangleMesh s = subdivide_faces(m);
        CHECK(s.vertices.size() == m.vertices.size() + mesh_edges(m).size());
        CHECK(s.faces.size() == 4 * m.faces.size());
        CHECK(is_watertight(s));
    }

    // Subdividing a level-k sphere and reprojecting gives level-(k+1).
    TriangleMesh reproj = subdivide_faces(make_icosphere(1));
    for (Vec3& v : reproj.vertices) v = v * (1.0 / v.norm());
    CHECK(canonically_equal(reproj, TriangleMesh{}) == false);
    CHECK(reproj.vertices.size() == make_icosphere(2).vertices.size());
    CHECK(reproj.faces.size() == make_icosphere(2).faces.size());
}

TEST_CASE("refinement stage identities and shape contracts") {
    const TriangleMesh mesh = posed_sphere(1);
    const std::vector<FeatureMap> maps = {random_map(8, 8, 6, 1), random_map(4, 4, 3, 2)};
    const int aligned = 9;

    for (StageStyle style : {StageStyle::light, StageStyle::residual}) {
        const int convs = style == StageStyle::light ? 3 : 6;
        StageConfig cfg = random_stage_config(style, convs, 16, aligned, false, 500);
        // Zero the final update: output mesh equals the input mesh.
        cfg.weights.back() = Matrix(3, 19);
        const StageResult out =
            refinement_stage(mesh, nullptr, maps, kCam, kImage, kImage, cfg);
        REQUIRE(out.mesh.vertices.size() == mesh.vertices.size());
        for (size_t v = 0; v < mesh.vertices.size(); ++v) {
            CHECK(out.mesh.vertices[v].x == mesh.vertices[v].x);
            CHECK(out.mesh.vertices[v].y == mesh.vertices[v].y);
            CHECK(out.mesh.vertices[v].z == mesh.vertices[v].z);
        }
        CHECK(out.mesh.faces == mesh.faces);
        // Output feature width equals feature_dim for both styles.
        CHECK(out.features.cols == 16);
        CHECK(out.features.rows == static_cast<int>(mesh.vertices.size()));
    }
}

TEST_CASE("stage config weight lists are shape-checked") {
    StageConfig cfg = random_stage_config(StageStyle::light, 3, 8, 5, false, 1000);
    CHECK_NOTHROW(validate_stage_config(cfg, 5, false));

    // Wrong aligned width, missing and surplus matrices, odd residual count.
    CHECK_THROWS_AS(validate_stage_config(cfg, 6, false), std::invalid_argument);
    CHECK_THROWS_AS(validate_stage_config(cfg, 5, true), std::invalid_argument);

    StageConfig missing = cfg;
    missing.weights.pop_back();
    CHECK_THROWS_AS(validate_stage_config(missing, 5, false), std::invalid_argument);

    StageConfig surplus = cfg;
    surplus.weights.push_back(Matrix(2, 2));
    CHECK_THROWS_AS(validate_stage_config(surplus, 5, false), std::invalid_argument);

    StageConfig odd = random_stage_config(StageStyle::residual, 6, 8, 5, false, 1001);
    odd.conv_count = 5;
    CHECK_THROWS_AS(validate_stage_config(odd, 5, false), std::invalid_argument);
}

TEST_CASE("refine_mesh chains stages and keeps topology") {
    const TriangleMesh mesh = posed_sphere(1);
    const std::vector<FeatureMap> maps = {random_map(8, 8, 5, 11)};

    std::vector<StageConfig> zero_stages;
    for (int s = 0; s < 3; ++s) {
        StageConfig cfg = random_stage_config(StageStyle::light, 3, 8, 5, s > 0, 600 + s);
        cfg.weights.back() = Matrix(3, 11);
        zero_stages.push_back(cfg);
    }
    const auto outputs = refine_mesh(mesh, maps, kCam, kImage, kImage, zero_stages);
    CHECK(outputs.size() == 3);
    for (const TriangleMesh& m : outputs) {
        CHECK(m.vertices.size() == mesh.vertices.size());
        CHECK(m.faces == mesh.faces);
        for (size_t v = 0; v < m.vertices.size(); ++v) {
            CHECK(m.vertices[v].x == mesh.vertices[v].x);
        }
    }

    // Random final updates move vertices but never change topology.
    std::vector<StageConfig> stages;
    for (int s = 0; s < 3; ++s) {
        stages.push_back(random_stage_config(StageStyle::light, 3, 8, 5, s > 0, 700 + s));
    }
    const auto moved = refine_mesh(mesh, maps, kCam, kImage, kImage, stages);
    CHECK(moved.size() == 3);
    for (const TriangleMesh& m : moved) {
        CHECK(m.faces == mesh.faces);
        CHECK(m.vertices.size() == mesh.vertices.size());
    }
    // Displacement bound: each stage moves each coordinate by at most 1
    // (exactly 1 only when the update saturates tanh).
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        CHECK(std::abs(moved[0].vertices[v].x - mesh.vertices[v].x) <= 1.0);
        CHECK(std::abs(moved[2].vertices[v].x - moved[1].vertices[v].x) <= 1.0);
    }
}

TEST_CASE("subdividing stages upsample features and quadruple faces") {
    const TriangleMesh mesh = posed_sphere(0);
    const std::vector<FeatureMap> maps = {random_map(8, 8, 4, 21)};
    std::vector<StageConfig> stages;
    for (int s = 0; s < 3; ++s) {
        StageConfig cfg = random_stage_config(StageStyle::light, 3, 8, 4, s > 0, 800 + s);
        cfg.subdivide_input = s > 0;
        stages.push_back(cfg);
    }
    const auto outputs = refine_mesh(mesh, maps, kCam, kImage, kImage, stages);
    CHECK(outputs[0].faces.size() == 20);
    CHECK(outputs[1].faces.size() == 80);
    CHECK(outputs[2].faces.size() == 320);
    CHECK(outputs[2].vertices.size() == 162);
    CHECK(is_watertight(outputs[2]));
}

TEST_CASE("golden fixture: two light stages with seeded weights") {
    const TriangleMesh mesh = posed_sphere(1);
    const std::vector<FeatureMap> maps = {random_map(8, 8, 4, 31), random_map(4, 4, 2, 32)};
    std::vector<StageConfig> stages = {
        random_stage_config(StageStyle::light, 3, 16, 6, false, 900),
        random_stage_config(StageStyle::light, 3, 16, 6, true, 901),
    };
    const auto outputs = refine_mesh(mesh, maps, kCam, kImage, kImage, stages);
    const uint64_t h = mesh_hash(outputs.back());
    // Frozen from the first run of this implementation; guards the full
    // stage wiring (vert_align -> projection -> convs -> tanh update).
    // Coordinates are hashed at 1e-9 resolution, so the value is stable
    // across platforms and optimization levels.
    CHECK(h == 0xc4459e31bf230698ull);
}
