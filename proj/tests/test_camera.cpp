#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "voxmesh/camera.hpp"
#include "voxmesh/rng.hpp"

using namespace voxmesh;

TEST_CASE("projection pinpoints") {
    const CameraIntrinsics unit{1, 1, 0, 0};
    auto p = project_points(unit, {{0, 0, 1}});
    CHECK(p[0].x == 0.0);
    CHECK(p[0].y == 0.0);

    // Independent pinhole arithmetic: u = 10*2/2 + 5, v = 10*3/2 + 7.
    const CameraIntrinsics k{10, 10, 5, 7};
    p = project_points(k, {{2, 3, 2}});
    CHECK(p[0].x == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(p[0].y == doctest::Approx(22.0).epsilon(1e-12));

    CHECK_THROWS_AS(project_points(k, {{1, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(project_points(k, {{1, 1, -2}}), std::invalid_argument);
    CHECK_THROWS_AS(project_points({0, 1, 0, 0}, {{1, 1, 1}}), std::invalid_argument);

    // The error names the offending point.
    try {
        project_points(k, {{1, 1, 2}, {0, 0, -1}, {1, 1, 3}});
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("point 1") != std::string::npos);
    }
}

TEST_CASE("frustum transform round trip and principal ray") {
    const CameraIntrinsics k{320, 240, 160, 120};
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i) {
        pts.push_back({4.0 * rng_uniform(7, 3 * i) - 2.0, 4.0 * rng_uniform(7, 3 * i + 1) - 2.0,
                       1.0 + 9.0 * rng_uniform(7, 3 * i + 2)});
    }
    const auto fwd = frustum_transform(k, pts);
    const auto back = inverse_frustum_transform(k, fwd);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::abs(back[i].x - pts[i].x) < 1e-9);
        CHECK(std::abs(back[i].y - pts[i].y) < 1e-9);
        CHECK(back[i].z == pts[i].z);
    }

    // project_points equals the first two frustum coordinates.
    const auto proj = project_points(k, pts);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(fwd[i].x == proj[i].x);
        CHECK(fwd[i].y == proj[i].y);
    }

    for (double z : {0.5, 1.0, 42.0}) {
        const auto on_axis = frustum_transform(k, {{0, 0, z}});
        CHECK(on_axis[0].x == k.cx);
        CHECK(on_axis[0].y == k.cy);
        CHECK(on_axis[0].z == z);
    }

    CHECK_THROWS_AS(frustum_transform(k, {{1, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(inverse_frustum_transform(k, {{1, 1, -3}}), std::invalid_argument);
}

TEST_CASE("prediction-space cube maps to a frustum in world space") {
    const CameraIntrinsics k{100, 100, 50, 50};
    // Axis-aligned cube in prediction space: constant-z faces stay planar in
    // world space; lateral faces converge toward the origin as z shrinks.
    std::vector<Vec3> pred_corners;
    for (int dx : {0, 1}) {
        for (int dy : {0, 1}) {
            for (int dz : {0, 1}) {
                pred_corners.push_back({40.0 + 20.0 * dx, 40.0 + 20.0 * dy, 2.0 + 2.0 * dz});
            }
        }
    }
    const auto world = inverse_frustum_transform(k, pred_corners);
    // Same prediction-space (u, v) at z=2 vs z=4: world x and y scale by 2.
    for (int c = 0; c < 4; ++c) {
        const Vec3& near = world[2 * c];
        const Vec3& far = world[2 * c + 1];
        CHECK(far.x == doctest::Approx(2.0 * near.x).epsilon(1e-12));
        CHECK(far.y == doctest::Approx(2.0 * near.y).epsilon(1e-12));
    }
}

TEST_CASE("depth extent normalization") {
    CHECK(normalize_depth_extent(3.0, 3.0, 55.0, 55.0) == 1.0);
    CHECK(normalize_depth_extent(2.0, 4.0, 100.0, 50.0) == doctest::Approx(1.0).epsilon(1e-15));

    for (int i = 0; i < 100; ++i) {
        const double dz = 0.01 + 10.0 * rng_uniform(11, 4 * i);
        const double zc = 0.01 + 10.0 * rng_uniform(11, 4 * i + 1);
        const double f = 0.5 + 100.0 * rng_uniform(11, 4 * i + 2);
        const double h = 0.5 + 100.0 * rng_uniform(11, 4 * i + 3);
        const double bar = normalize_depth_extent(dz, zc, f, h);
        CHECK(std::abs(denormalize_depth_extent(bar, zc, f, h) - dz) <= 1e-12 * std::abs(dz));
        const double log_bar = normalize_depth_extent_log(dz, zc, f, h);
        CHECK(std::abs(denormalize_depth_extent_log(log_bar, zc, f, h) - dz) <=
              1e-12 * std::abs(dz));
    }

    CHECK_THROWS_AS(normalize_depth_extent(1.0, 0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(normalize_depth_extent(1.0, 1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(normalize_depth_extent(1.0, 1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(normalize_depth_extent_log(-1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}
