// Core geometric types and mesh topology queries.
//
// Conventions used throughout the library:
// - Triangle-only meshes, 0-based vertex indices in memory.
// - Counterclockwise winding = outward normal.
// - An undirected edge is identified by (min(i,j), max(i,j)); edge lists are
//   sorted lexicographically so downstream output is reproducible.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace voxmesh {

struct Vec3 {
    double x{}, y{}, z{};

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double squared_norm() const { return x * x + y * y + z * z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Vec2 {
    double x{}, y{};
};

using Face = std::array<int, 3>;
using Edge = std::pair<int, int>;  // always (min, max)

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;

    bool empty() const { return vertices.empty() && faces.empty(); }
};

// Throws std::invalid_argument when a face index is out of range or a face
// repeats a vertex.
void validate_mesh(const TriangleMesh& mesh);

// Unique undirected edges in lexicographic order.
std::vector<Edge> mesh_edges(const TriangleMesh& mesh);

// |V| - |E| + |F| over the unique edge set.
long long euler_characteristic(const TriangleMesh& mesh);

// True iff the mesh is closed and consistently oriented: every undirected
// edge is traversed the same number of times in each direction (at least
// once). For manifold meshes this is the usual "each edge bounds exactly two
// opposite-winding faces" test; cubify outputs with diagonally touching
// voxels share an edge between two face pairs and still pass.
bool is_watertight(const TriangleMesh& mesh);

// Undirected 1-ring neighbor lists derived from mesh_edges.
std::vector<std::vector<int>> vertex_adjacency(const TriangleMesh& mesh);

// Unit outward normal of a face; zero vector for degenerate faces.
Vec3 face_normal(const TriangleMesh& mesh, int face_index);

// Relabels vertices in lexicographic (x, y, z) order, rotates each face so
// its smallest index comes first (preserving winding), and sorts the face
// list. Two meshes that differ only by vertex/face ordering canonicalize to
// identical arrays.
TriangleMesh canonical_form(const TriangleMesh& mesh);

// Exact equality of canonical forms.
bool canonically_equal(const TriangleMesh& a, const TriangleMesh& b);

// Axis-aligned bounding box as (min, max); throws on empty vertex list.
std::pair<Vec3, Vec3> bounding_box(const TriangleMesh& mesh);

}  // namespace voxmesh
