#include "voxmesh/nearest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "voxmesh/parallel.hpp"

namespace voxmesh {

namespace {

inline double dist2(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

std::vector<int> brute_direction(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    std::vector<int> out(from.size());
    parallel_for(from.size(), [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_j = 0;
            for (size_t j = 0; j < to.size(); ++j) {
                double d = dist2(from[i], to[j]);
                if (d < best) {
                    best = d;
                    best_j = static_cast<int>(j);
                }
            }
            out[i] = best_j;
        }
    });
    return out;
}

// Uniform hash grid over the target set. Queries expand Chebyshev shells of
// cells until no unvisited cell can beat the best candidate; among equal
// distances the lowest index wins, matching the brute scan.
class PointGrid {
public:
    explicit PointGrid(const std::vector<Vec3>& points) : points_(points) {
        lo_ = hi_ = points[0];
        for (const Vec3& p : points) {
            lo_.x = std::min(lo_.x, p.x);
            lo_.y = std::min(lo_.y, p.y);
            lo_.z = std::min(lo_.z, p.z);
            hi_.x = std::max(hi_.x, p.x);
            hi_.y = std::max(hi_.y, p.y);
            hi_.z = std::max(hi_.z, p.z);
        }
        const double max_extent =
            std::max({hi_.x - lo_.x, hi_.y - lo_.y, hi_.z - lo_.z, 1e-12});
        const double per_axis = std::cbrt(static_cast<double>(points.size()));
        cell_ = max_extent / std::clamp(per_axis, 1.0, 64.0);
        nx_ = axis_cells(hi_.x - lo_.x);
        ny_ = axis_cells(hi_.y - lo_.y);
        nz_ = axis_cells(hi_.z - lo_.z);
        buckets_.resize(static_cast<size_t>(nx_) * ny_ * nz_);
        for (size_t i = 0; i < points.size(); ++i) {
            buckets_[bucket_of(points[i])].push_back(static_cast<int>(i));
        }
    }

    int query(const Vec3& p) const {
        int cx = clampi(static_cast<int>(std::floor((p.x - lo_.x) / cell_)), nx_);
        int cy = clampi(static_cast<int>(std::floor((p.y - lo_.y) / cell_)), ny_);
        int cz = clampi(static_cast<int>(std::floor((p.z - lo_.z) / cell_)), nz_);
        double best = std::numeric_limits<double>::infinity();
        int best_j = -1;
        // Far enough to cover every cell from any clamped start.
        const int max_ring = std::max({nx_, ny_, nz_});
        for (int r = 0; r <= max_ring; ++r) {
            // Cells at Chebyshev distance > r hold points no closer than
            // (r) * cell - (distance of p to its own cell border) >= (r-1)*cell.
            if (best_j >= 0) {
                double bound = (r - 1) * cell_;
                if (bound > 0 && bound * bound > best) break;
            }
            scan_shell(p, cx, cy, cz, r, best, best_j);
        }
        return best_j;
    }

private:
    static int clampi(int v, int n) { return std::clamp(v, 0, n - 1); }
    int axis_cells(double extent) const {
        return std::max(1, static_cast<int>(std::floor(extent / cell_)) + 1);
    }
    size_t bucket_index(int x, int y, int z) const {
        return (static_cast<size_t>(z) * ny_ + y) * nx_ + x;
    }
    size_t bucket_of(const Vec3& p) const {
        return bucket_index(clampi(static_cast<int>(std::floor((p.x - lo_.x) / cell_)), nx_),
                            clampi(static_cast<int>(std::floor((p.y - lo_.y) / cell_)), ny_),
                            clampi(static_cast<int>(std::floor((p.z - lo_.z) / cell_)), nz_));
    }

    static double axis_gap(double v, double cell_lo, double cell_hi) {
        if (v < cell_lo) return cell_lo - v;
        if (v > cell_hi) return v - cell_hi;
        return 0.0;
    }

    void consider(const Vec3& p, int x, int y, int z, double& best, int& best_j) const {
        const auto& bucket = buckets_[bucket_index(x, y, z)];
        if (bucket.empty()) return;
        // Skip cells whose whole box is strictly farther than the incumbent;
        // equal-distance cells still scan so index ties resolve like brute.
        if (best_j >= 0) {
            const double gx = axis_gap(p.x, lo_.x + x * cell_, lo_.x + (x + 1) * cell_);
            const double gy = axis_gap(p.y, lo_.y + y * cell_, lo_.y + (y + 1) * cell_);
            const double gz = axis_gap(p.z, lo_.z + z * cell_, lo_.z + (z + 1) * cell_);
            if (gx * gx + gy * gy + gz * gz > best) return;
        }
        for (int j : bucket) {
            double d = dist2(p, points_[j]);
            if (d < best || (d == best && j < best_j)) {
                best = d;
                best_j = j;
            }
        }
    }

    // Visits exactly the cells at Chebyshev distance r (the six box faces),
    // clamped to the grid.
    void scan_shell(const Vec3& p, int cx, int cy, int cz, int r, double& best,
                    int& best_j) const {
        if (r == 0) {
            consider(p, cx, cy, cz, best, best_j);
            return;
        }
        const int x0 = std::max(cx - r, 0), x1 = std::min(cx + r, nx_ - 1);
        const int y0 = std::max(cy - r, 0), y1 = std::min(cy + r, ny_ - 1);
        const int zin0 = std::max(cz - r + 1, 0), zin1 = std::min(cz + r - 1, nz_ - 1);
        const int yin0 = std::max(cy - r + 1, 0), yin1 = std::min(cy + r - 1, ny_ - 1);
        for (int z : {cz - r, cz + r}) {
            if (z < 0 || z >= nz_) continue;
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) consider(p, x, y, z, best, best_j);
            }
        }
        for (int y : {cy - r, cy + r}) {
            if (y < 0 || y >= ny_) continue;
            for (int z = zin0; z <= zin1; ++z) {
                for (int x = x0; x <= x1; ++x) consider(p, x, y, z, best, best_j);
            }
        }
        for (int x : {cx - r, cx + r}) {
            if (x < 0 || x >= nx_) continue;
            for (int z = zin0; z <= zin1; ++z) {
                for (int y = yin0; y <= yin1; ++y) consider(p, x, y, z, best, best_j);
            }
        }
    }

    const std::vector<Vec3>& points_;
    Vec3 lo_{}, hi_{};
    double cell_{1.0};
    int nx_{1}, ny_{1}, nz_{1};
    std::vector<std::vector<int>> buckets_;
};

std::vector<int> grid_direction(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    PointGrid grid(to);
    std::vector<int> out(from.size());
    parallel_for(from.size(), [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) out[i] = grid.query(from[i]);
    });
    return out;
}

}  // namespace

NearestNeighborMap nearest_neighbors(const std::vector<Vec3>& p, const std::vector<Vec3>& q,
                                     NnMode mode) {
    if (p.empty() || q.empty()) {
        throw std::invalid_argument("nearest_neighbors: point sets must be nonempty");
    }
    NearestNeighborMap map;
    if (mode == NnMode::brute) {
        map.p_to_q = brute_direction(p, q);
        map.q_to_p = brute_direction(q, p);
    } else {
        map.p_to_q = grid_direction(p, q);
        map.q_to_p = grid_direction(q, p);
    }
    return map;
}

}  // namespace voxmesh
