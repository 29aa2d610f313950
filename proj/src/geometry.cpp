#include "voxmesh/geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace voxmesh {

void validate_mesh(const TriangleMesh& mesh) {
    const int n = static_cast<int>(mesh.vertices.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            if (face[k] < 0 || face[k] >= n) {
                throw std::invalid_argument("validate_mesh: face " + std::to_string(f) +
                                            " references vertex " + std::to_string(face[k]) +
                                            " outside [0, " + std::to_string(n) + ")");
            }
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            throw std::invalid_argument("validate_mesh: face " + std::to_string(f) +
                                        " repeats a vertex");
        }
    }
}

std::vector<Edge> mesh_edges(const TriangleMesh& mesh) {
    validate_mesh(mesh);
    std::vector<Edge> edges;
    edges.reserve(mesh.faces.size() * 3);
    for (const Face& face : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            int a = face[k];
            int b = face[(k + 1) % 3];
            edges.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

long long euler_characteristic(const TriangleMesh& mesh) {
    const long long v = static_cast<long long>(mesh.vertices.size());
    const long long e = static_cast<long long>(mesh_edges(mesh).size());
    const long long f = static_cast<long long>(mesh.faces.size());
    return v - e + f;
}

bool is_watertight(const TriangleMesh& mesh) {
    validate_mesh(mesh);
    // Count directed traversals per undirected edge: forward = (min,max).
    std::map<Edge, std::pair<int, int>> counts;
    for (const Face& face : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            int a = face[k];
            int b = face[(k + 1) % 3];
            auto& c = counts[{std::min(a, b), std::max(a, b)}];
            if (a < b)
                ++c.first;
            else
                ++c.second;
        }
    }
    for (const auto& [edge, c] : counts) {
        if (c.first != c.second || c.first < 1) return false;
    }
    return true;
}

std::vector<std::vector<int>> vertex_adjacency(const TriangleMesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.vertices.size());
    for (const Edge& e : mesh_edges(mesh)) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    return adj;
}

Vec3 face_normal(const TriangleMesh& mesh, int face_index) {
    const Face& f = mesh.faces[face_index];
    const Vec3& v1 = mesh.vertices[f[0]];
    const Vec3& v2 = mesh.vertices[f[1]];
    const Vec3& v3 = mesh.vertices[f[2]];
    Vec3 n = (v2 - v1).cross(v3 - v1);
    double len = n.norm();
    if (len == 0.0) return {0, 0, 0};
    return n * (1.0 / len);
}

namespace {
bool vec_less(const Vec3& a, const Vec3& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
}
}  // namespace

TriangleMesh canonical_form(const TriangleMesh& mesh) {
    validate_mesh(mesh);
    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return vec_less(mesh.vertices[a], mesh.vertices[b]);
    });
    std::vector<int> remap(n);
    TriangleMesh out;
    out.vertices.resize(n);
    for (int i = 0; i < n; ++i) {
        remap[order[i]] = i;
        out.vertices[i] = mesh.vertices[order[i]];
    }
    out.faces.reserve(mesh.faces.size());
    for (const Face& face : mesh.faces) {
        Face f = {remap[face[0]], remap[face[1]], remap[face[2]]};
        // Rotate so the smallest index leads; cyclic order (winding) is kept.
        int lead = 0;
        if (f[1] < f[lead]) lead = 1;
        if (f[2] < f[lead]) lead = 2;
        out.faces.push_back({f[lead], f[(lead + 1) % 3], f[(lead + 2) % 3]});
    }
    std::sort(out.faces.begin(), out.faces.end());
    return out;
}

bool canonically_equal(const TriangleMesh& a, const TriangleMesh& b) {
    TriangleMesh ca = canonical_form(a);
    TriangleMesh cb = canonical_form(b);
    if (ca.faces != cb.faces) return false;
    if (ca.vertices.size() != cb.vertices.size()) return false;
    for (size_t i = 0; i < ca.vertices.size(); ++i) {
        const Vec3& u = ca.vertices[i];
        const Vec3& v = cb.vertices[i];
        if (u.x != v.x || u.y != v.y || u.z != v.z) return false;
    }
    return true;
}

std::pair<Vec3, Vec3> bounding_box(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) {
        throw std::invalid_argument("bounding_box: mesh has no vertices");
    }
    Vec3 lo = mesh.vertices.front();
    Vec3 hi = lo;
    for (const Vec3& v : mesh.vertices) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        lo.z = std::min(lo.z, v.z);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
        hi.z = std::max(hi.z, v.z);
    }
    return {lo, hi};
}

}  // namespace voxmesh
