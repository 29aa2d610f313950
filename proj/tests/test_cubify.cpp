#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "voxmesh/cubify.hpp"
#include "voxmesh/rng.hpp"

using namespace voxmesh;

namespace {

const CubifyConfig kUnit{0.2, 1.0, {0, 0, 0}};

VoxelGrid random_grid(int n, int d, int h, int w, uint64_t seed, double fill = 0.5) {
    VoxelGrid grid(n, d, h, w);
    for (size_t i = 0; i < grid.values.size(); ++i) {
        grid.values[i] = rng_uniform(seed, i) < fill ? 0.9f : 0.05f;
    }
    return grid;
}

}  // namespace

TEST_CASE("unit cube template counts") {
    TriangleMesh cube;
    for (const auto& c : UnitCubeTemplate::corners()) {
        cube.vertices.push_back({static_cast<double>(c[0]), static_cast<double>(c[1]),
                                 static_cast<double>(c[2])});
    }
    cube.faces.assign(UnitCubeTemplate::faces().begin(), UnitCubeTemplate::faces().end());
    CHECK(cube.vertices.size() == 8);
    CHECK(cube.faces.size() == 12);
    CHECK(mesh_edges(cube).size() == 18);
    CHECK(is_watertight(cube));
}

TEST_CASE("single voxel fixture: 8 vertices, 18 edges, 12 faces") {
    VoxelGrid grid(1, 1, 1, 1);
    grid.values[0] = 0.9f;
    for (const auto& meshes : {cubify_naive(grid, kUnit), cubify(grid, kUnit)}) {
        REQUIRE(meshes.size() == 1);
        CHECK(meshes[0].vertices.size() == 8);
        CHECK(meshes[0].faces.size() == 12);
        CHECK(mesh_edges(meshes[0]).size() == 18);
        CHECK(is_watertight(meshes[0]));
    }
}

TEST_CASE("unoccupied grid yields an empty mesh") {
    VoxelGrid grid(2, 2, 2, 2);
    for (auto& v : grid.values) v = 0.2f;  // equal to tau: not occupied
    for (const auto& meshes : {cubify_naive(grid, kUnit), cubify(grid, kUnit)}) {
        REQUIRE(meshes.size() == 2);
        for (const auto& m : meshes) CHECK(m.empty());
    }
}

TEST_CASE("two axis-adjacent voxels merge their shared face") {
    // Expected counts derived by enumeration: two cuboids of 8 vertices and
    // 12 faces each lose the 4 triangles of the shared wall and merge its 4
    // vertices; Euler then forces E = V + F - 2 = 12 + 20 - 2 = 30.
    for (int axis = 0; axis < 3; ++axis) {
        VoxelGrid grid(1, axis == 0 ? 2 : 1, axis == 1 ? 2 : 1, axis == 2 ? 2 : 1);
        grid.values = {1.0f, 1.0f};
        const TriangleMesh mesh = cubify_naive(grid, kUnit).front();
        CHECK(mesh.vertices.size() == 12);
        CHECK(mesh.faces.size() == 20);
        CHECK(mesh_edges(mesh).size() == 30);
        CHECK(is_watertight(mesh));
        CHECK(euler_characteristic(mesh) == 2);
        CHECK(canonically_equal(mesh, cubify(grid, kUnit).front()));
    }
}

TEST_CASE("fully occupied 2x2x2 block: interior lattice point dropped") {
    VoxelGrid grid(1, 2, 2, 2);
    grid.values.assign(8, 1.0f);
    for (const auto& meshes : {cubify_naive(grid, kUnit), cubify(grid, kUnit)}) {
        const TriangleMesh& m = meshes.front();
        CHECK(m.vertices.size() == 26);
        CHECK(m.faces.size() == 48);
        CHECK(mesh_edges(m).size() == 72);
        CHECK(euler_characteristic(m) == 2);
        CHECK(is_watertight(m));
    }
}

TEST_CASE("genus-1 ring has Euler characteristic 0") {
    VoxelGrid ring(1, 1, 3, 3);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) ring.at(0, 0, y, x) = (x == 1 && y == 1) ? 0.0f : 1.0f;
    }
    for (const auto& meshes : {cubify_naive(ring, kUnit), cubify(ring, kUnit)}) {
        CHECK(euler_characteristic(meshes.front()) == 0);
        CHECK(is_watertight(meshes.front()));
    }
}

TEST_CASE("voxel size and origin place vertices on the scaled lattice") {
    VoxelGrid grid(1, 1, 1, 1);
    grid.values[0] = 1.0f;
    const CubifyConfig cfg{0.5, 0.25, {-1.0, 2.0, 3.5}};
    const TriangleMesh mesh = cubify(grid, cfg).front();
    const auto [lo, hi] = bounding_box(mesh);
    CHECK(lo.x == -1.0);
    CHECK(lo.y == 2.0);
    CHECK(lo.z == 3.5);
    CHECK(hi.x == -0.75);
    CHECK(hi.y == 2.25);
    CHECK(hi.z == 3.75);
    CHECK(canonically_equal(mesh, cubify_naive(grid, cfg).front()));
}

TEST_CASE("occupancy is strict: value equal to tau stays empty") {
    VoxelGrid grid(1, 1, 1, 2);
    grid.values = {0.2f, 0.2000001f};
    const TriangleMesh mesh = cubify(grid, kUnit).front();
    CHECK(mesh.faces.size() == 12);  // only the strictly-greater cell
}

TEST_CASE("vectorized cubify equals the naive oracle on random grids") {
    // Property over >= 100 random grids spanning batch, one-cell-thin, and
    // cubic shapes at several fill rates.
    int checked = 0;
    for (uint64_t seed = 0; seed < 60; ++seed) {
        const int d = 1 + static_cast<int>(rng_bits(seed, 1000) % 8);
        const int h = 1 + static_cast<int>(rng_bits(seed, 1001) % 8);
        const int w = 1 + static_cast<int>(rng_bits(seed, 1002) % 8);
        const int n = 1 + static_cast<int>(rng_bits(seed, 1003) % 3);
        const double fill = 0.15 + 0.7 * rng_uniform(seed, 1004);
        const VoxelGrid grid = random_grid(n, d, h, w, seed, fill);
        const auto fast = cubify(grid, kUnit);
        const auto naive = cubify_naive(grid, kUnit);
        REQUIRE(fast.size() == naive.size());
        for (size_t i = 0; i < fast.size(); ++i) {
            CHECK(canonically_equal(fast[i], naive[i]));
            CHECK(is_watertight(fast[i]));
            ++checked;
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("raising tau never increases the occupied cell count") {
    for (uint64_t seed = 100; seed < 104; ++seed) {
        VoxelGrid grid(1, 6, 6, 6);
        for (size_t i = 0; i < grid.values.size(); ++i) {
            grid.values[i] = static_cast<float>(rng_uniform(seed, i));
        }
        size_t prev = SIZE_MAX;
        for (double tau : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            size_t occupied = 0;
            for (float v : grid.values) occupied += v > tau;
            CHECK(occupied <= prev);
            prev = occupied;
        }
    }

    // Face count is NOT monotone in tau: raising the threshold can hollow a
    // solid and expose interior surface. A 3x3x3 block whose center cell sits
    // below the higher threshold gains the central cavity's 12 triangles.
    VoxelGrid shell(1, 3, 3, 3);
    for (auto& v : shell.values) v = 0.9f;
    shell.at(0, 1, 1, 1) = 0.5f;
    const size_t solid = cubify(shell, CubifyConfig{0.4, 1.0, {0, 0, 0}}).front().faces.size();
    const size_t hollow = cubify(shell, CubifyConfig{0.7, 1.0, {0, 0, 0}}).front().faces.size();
    CHECK(solid == 108);
    CHECK(hollow == 120);
}

TEST_CASE("batch elements are independent") {
    VoxelGrid grid(2, 2, 2, 2);
    grid.at(0, 0, 0, 0) = 1.0f;  // element 0: one voxel
    for (int z = 0; z < 2; ++z) {
        for (int y = 0; y < 2; ++y) {
            for (int x = 0; x < 2; ++x) grid.at(1, z, y, x) = 1.0f;  // element 1: full block
        }
    }
    const auto meshes = cubify(grid, kUnit);
    CHECK(meshes[0].vertices.size() == 8);
    CHECK(meshes[1].vertices.size() == 26);
}
