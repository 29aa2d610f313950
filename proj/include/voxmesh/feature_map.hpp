// Image-aligned feature grid sampled bilinearly by vert_align. Data is
// indexed (y, x, c) with c fastest; (u, v) = (0, 0) addresses the center of
// the top-left sample and coordinates are clamped to the border.
#pragma once

#include <vector>

namespace voxmesh {

struct FeatureMap {
    int height{0}, width{0}, channels{0};
    std::vector<float> data;  // size height*width*channels

    FeatureMap() = default;
    FeatureMap(int h, int w, int c)
        : height(h), width(w), channels(c), data(static_cast<size_t>(h) * w * c, 0.0f) {}

    size_t index(int y, int x, int c) const {
        return (static_cast<size_t>(y) * width + x) * channels + c;
    }
    float at(int y, int x, int c) const { return data[index(y, x, c)]; }
    float& at(int y, int x, int c) { return data[index(y, x, c)]; }
};

void validate_feature_map(const FeatureMap& map);

}  // namespace voxmesh
