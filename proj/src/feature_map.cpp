#include "voxmesh/feature_map.hpp"

#include <stdexcept>
#include <string>

namespace voxmesh {

void validate_feature_map(const FeatureMap& map) {
    if (map.height <= 0 || map.width <= 0 || map.channels <= 0) {
        throw std::invalid_argument("validate_feature_map: dims must be positive");
    }
    if (map.data.size() != static_cast<size_t>(map.height) * map.width * map.channels) {
        throw std::invalid_argument("validate_feature_map: data length " +
                                    std::to_string(map.data.size()) + " does not match dims");
    }
}

}  // namespace voxmesh
