// Dense row-major matrix used for layer weights and per-vertex features.
#pragma once

#include <cstdint>
#include <vector>

namespace voxmesh {

struct Matrix {
    int rows{0}, cols{0};
    std::vector<double> values;  // row-major, size rows*cols

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), values(static_cast<size_t>(r) * c, 0.0) {}

    double at(int r, int c) const { return values[static_cast<size_t>(r) * cols + c]; }
    double& at(int r, int c) { return values[static_cast<size_t>(r) * cols + c]; }
};

void validate_matrix(const Matrix& m);

// Entries uniform in +-1/sqrt(cols), drawn from the counter RNG of `seed`.
Matrix random_matrix(int rows, int cols, uint64_t seed);

}  // namespace voxmesh
