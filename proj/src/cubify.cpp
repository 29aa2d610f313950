#include "voxmesh/cubify.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>

#include "voxmesh/parallel.hpp"

namespace voxmesh {

const std::array<std::array<int, 3>, 8>& UnitCubeTemplate::corners() {
    // (x, y, z) offsets; 0-3 on the back (z=0) ring, 4-7 on the front.
    static const std::array<std::array<int, 3>, 8> k = {{
        {0, 0, 0},
        {1, 0, 0},
        {1, 1, 0},
        {0, 1, 0},
        {0, 0, 1},
        {1, 0, 1},
        {1, 1, 1},
        {0, 1, 1},
    }};
    return k;
}

const std::array<Face, 12>& UnitCubeTemplate::faces() {
    static const std::array<Face, 12> k = {{
        {0, 3, 2}, {0, 2, 1},  // back  (-z)
        {4, 5, 6}, {4, 6, 7},  // front (+z)
        {0, 1, 5}, {0, 5, 4},  // top   (-y)
        {3, 7, 6}, {3, 6, 2},  // bottom (+y)
        {0, 4, 7}, {0, 7, 3},  // left  (-x)
        {1, 2, 6}, {1, 6, 5},  // right (+x)
    }};
    return k;
}

void validate_cubify_config(const CubifyConfig& cfg) {
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
        throw std::invalid_argument("validate_cubify_config: threshold outside [0, 1]");
    }
    if (!(cfg.voxel_size > 0.0)) {
        throw std::invalid_argument("validate_cubify_config: voxel_size must be positive");
    }
}

namespace {

// Neighbor offsets (dz, dy, dx) per side, matching the template face order.
constexpr int kSideOffset[6][3] = {
    {-1, 0, 0},  // back
    {+1, 0, 0},  // front
    {0, -1, 0},  // top
    {0, +1, 0},  // bottom
    {0, 0, -1},  // left
    {0, 0, +1},  // right
};

inline Vec3 lattice_to_world(const CubifyConfig& cfg, int ix, int iy, int iz) {
    return {cfg.origin.x + cfg.voxel_size * ix, cfg.origin.y + cfg.voxel_size * iy,
            cfg.origin.z + cfg.voxel_size * iz};
}

// Drops vertices no face references and renumbers in first-use order.
TriangleMesh compact_mesh(const std::vector<Vec3>& raw_vertices, std::vector<Face>& faces) {
    std::vector<int> remap(raw_vertices.size(), -1);
    TriangleMesh mesh;
    for (Face& face : faces) {
        for (int k = 0; k < 3; ++k) {
            int& v = face[k];
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(mesh.vertices.size());
                mesh.vertices.push_back(raw_vertices[v]);
            }
            v = remap[v];
        }
    }
    mesh.faces = std::move(faces);
    return mesh;
}

TriangleMesh cubify_naive_one(const VoxelGrid& grid, const CubifyConfig& cfg, int bn) {
    const auto& corners = UnitCubeTemplate::corners();
    const auto& cube_faces = UnitCubeTemplate::faces();
    const float tau = static_cast<float>(cfg.threshold);

    auto occupied = [&](int z, int y, int x) {
        if (z < 0 || z >= grid.d || y < 0 || y >= grid.h || x < 0 || x >= grid.w) return false;
        return grid.at(bn, z, y, x) > tau;
    };

    // Per-cube vertices with faces into the raw list; merging happens after
    // the scan, keyed on exact lattice coordinates.
    std::vector<Vec3> raw_vertices;
    std::vector<std::array<int, 3>> raw_lattice;
    std::vector<Face> faces;
    for (int z = 0; z < grid.d; ++z) {
        for (int y = 0; y < grid.h; ++y) {
            for (int x = 0; x < grid.w; ++x) {
                if (!occupied(z, y, x)) continue;
                int base = static_cast<int>(raw_vertices.size());
                for (const auto& c : corners) {
                    raw_vertices.push_back(lattice_to_world(cfg, x + c[0], y + c[1], z + c[2]));
                    raw_lattice.push_back({x + c[0], y + c[1], z + c[2]});
                }
                for (int side = 0; side < 6; ++side) {
                    const int* off = kSideOffset[side];
                    if (occupied(z + off[0], y + off[1], x + off[2])) continue;
                    for (int t = 0; t < 2; ++t) {
                        const Face& f = cube_faces[side * 2 + t];
                        faces.push_back({base + f[0], base + f[1], base + f[2]});
                    }
                }
            }
        }
    }

    // Merge shared verts.
    std::map<std::array<int, 3>, int> first_at;
    std::vector<int> merged(raw_vertices.size());
    for (size_t i = 0; i < raw_vertices.size(); ++i) {
        auto [it, inserted] = first_at.try_emplace(raw_lattice[i], static_cast<int>(i));
        merged[i] = it->second;
    }
    for (Face& face : faces) {
        for (int k = 0; k < 3; ++k) face[k] = merged[face[k]];
    }
    return compact_mesh(raw_vertices, faces);
}

TriangleMesh cubify_fast_one(const VoxelGrid& grid, const CubifyConfig& cfg, int bn) {
    const int d = grid.d, h = grid.h, w = grid.w;
    const size_t cells = static_cast<size_t>(d) * h * w;
    const size_t plane = static_cast<size_t>(h) * w;
    const float tau = static_cast<float>(cfg.threshold);
    const float* vals = grid.values.data() + static_cast<size_t>(bn) * cells;

    // Binarize once.
    std::vector<uint8_t> occ(cells);
    for (size_t i = 0; i < cells; ++i) occ[i] = vals[i] > tau ? 1 : 0;

    // sides[i] holds one bit per cuboid side to keep: the cell is occupied
    // and its axis neighbor is not. Six shifted comparisons of the whole
    // grid, one per direction; cells on a boundary keep that boundary face.
    std::vector<uint8_t> sides(cells, 0);
    size_t kept = 0;
    // -z / +z: shift by a whole plane.
    for (size_t i = 0; i < plane; ++i) sides[i] |= occ[i];
    for (size_t i = plane; i < cells; ++i) sides[i] |= occ[i] & ~occ[i - plane] & 1;
    for (size_t i = cells - plane; i < cells; ++i) sides[i] |= occ[i] << 1;
    for (size_t i = 0; i < cells - plane; ++i) sides[i] |= (occ[i] & ~occ[i + plane] & 1) << 1;
    // -y / +y: shift by a row within each z slab.
    for (int z = 0; z < d; ++z) {
        const size_t base = static_cast<size_t>(z) * plane;
        for (size_t i = base; i < base + w; ++i) sides[i] |= occ[i] << 2;
        for (size_t i = base + w; i < base + plane; ++i) {
            sides[i] |= (occ[i] & ~occ[i - w] & 1) << 2;
        }
        for (size_t i = base + plane - w; i < base + plane; ++i) sides[i] |= occ[i] << 3;
        for (size_t i = base; i < base + plane - w; ++i) {
            sides[i] |= (occ[i] & ~occ[i + w] & 1) << 3;
        }
    }
    // -x / +x: shift by one cell within each row.
    for (size_t row = 0; row < cells; row += w) {
        sides[row] |= occ[row] << 4;
        for (size_t i = row + 1; i < row + w; ++i) sides[i] |= (occ[i] & ~occ[i - 1] & 1) << 4;
        sides[row + w - 1] |= occ[row + w - 1] << 5;
        for (size_t i = row; i + 1 < row + w; ++i) sides[i] |= (occ[i] & ~occ[i + 1] & 1) << 5;
    }
    for (size_t i = 0; i < cells; ++i) {
        kept += static_cast<size_t>(__builtin_popcount(sides[i]));
    }

    // Lattice vertex ids live on the (w+1) x (h+1) x (d+1) corner grid.
    const int64_t lw = w + 1, lh = h + 1;
    const auto& corners = UnitCubeTemplate::corners();
    const auto& cube_faces = UnitCubeTemplate::faces();
    // Per-side, per-triangle corner lattice offsets relative to the cell's
    // (x, y, z) lattice base, precomputed once.
    int64_t tri_offsets[12][3];
    for (int t = 0; t < 12; ++t) {
        for (int k = 0; k < 3; ++k) {
            const auto& c = corners[cube_faces[t][k]];
            tri_offsets[t][k] = c[0] + static_cast<int64_t>(c[1]) * lw +
                                static_cast<int64_t>(c[2]) * lw * lh;
        }
    }

    // Emit faces in one pass over the flat mask, merging vertices on the fly
    // through the lattice-id -> dense-id table (first-use order).
    std::vector<int32_t> dense(static_cast<size_t>(lw) * lh * (d + 1), -1);
    TriangleMesh mesh;
    mesh.faces.reserve(kept * 2);
    size_t i = 0;
    for (int z = 0; z < d; ++z) {
        for (int y = 0; y < h; ++y) {
            const int64_t row_base = static_cast<int64_t>(y) * lw +
                                     static_cast<int64_t>(z) * lw * lh;
            for (int x = 0; x < w; ++x, ++i) {
                const uint8_t mask = sides[i];
                if (!mask) continue;
                const int64_t base = row_base + x;
                for (int s = 0; s < 6; ++s) {
                    if (!(mask & (1u << s))) continue;
                    for (int t = 0; t < 2; ++t) {
                        const int64_t* off = tri_offsets[s * 2 + t];
                        Face face;
                        for (int k = 0; k < 3; ++k) {
                            const int64_t lid = base + off[k];
                            int32_t& id = dense[static_cast<size_t>(lid)];
                            if (id < 0) {
                                id = static_cast<int32_t>(mesh.vertices.size());
                                const int64_t ix = lid % lw;
                                const int64_t iy = (lid / lw) % lh;
                                const int64_t iz = lid / (lw * lh);
                                mesh.vertices.push_back(
                                    lattice_to_world(cfg, static_cast<int>(ix),
                                                     static_cast<int>(iy),
                                                     static_cast<int>(iz)));
                            }
                            face[k] = id;
                        }
                        mesh.faces.push_back(face);
                    }
                }
            }
        }
    }
    return mesh;
}

template <typename Fn>
std::vector<TriangleMesh> cubify_batch(const VoxelGrid& grid, const CubifyConfig& cfg, Fn one) {
    validate_grid(grid);
    validate_cubify_config(cfg);
    std::vector<TriangleMesh> meshes(grid.n);
    parallel_for(grid.n, [&](size_t begin, size_t end) {
        for (size_t bn = begin; bn < end; ++bn) {
            meshes[bn] = one(grid, cfg, static_cast<int>(bn));
        }
    });
    return meshes;
}

}  // namespace

std::vector<TriangleMesh> cubify_naive(const VoxelGrid& grid, const CubifyConfig& cfg) {
    return cubify_batch(grid, cfg, cubify_naive_one);
}

std::vector<TriangleMesh> cubify(const VoxelGrid& grid, const CubifyConfig& cfg) {
    return cubify_batch(grid, cfg, cubify_fast_one);
}

}  // namespace voxmesh
