#include "voxmesh/matrix.hpp"

#include <stdexcept>
#include <string>

#include "voxmesh/rng.hpp"

#include <cmath>

namespace voxmesh {

void validate_matrix(const Matrix& m) {
    if (m.rows <= 0 || m.cols <= 0) {
        throw std::invalid_argument("validate_matrix: dims must be positive");
    }
    if (m.values.size() != static_cast<size_t>(m.rows) * m.cols) {
        throw std::invalid_argument("validate_matrix: value count " +
                                    std::to_string(m.values.size()) + " does not match " +
                                    std::to_string(m.rows) + "x" + std::to_string(m.cols));
    }
}

Matrix random_matrix(int rows, int cols, uint64_t seed) {
    Matrix m(rows, cols);
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    for (size_t i = 0; i < m.values.size(); ++i) {
        m.values[i] = (2.0 * rng_uniform(seed, i) - 1.0) * bound;
    }
    return m;
}

}  // namespace voxmesh
