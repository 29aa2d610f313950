// File formats and serialization.
//
// OBJ meshes: `v x y z` and 1-indexed `f i j k` with optional /-suffixed
// attributes ignored; larger polygons are fan-triangulated. Vertices are
// written with 17 significant digits so a write/read round trip reproduces
// double coordinates exactly.
//
// Binary containers are little-endian with an explicit magic and version
// byte:
//   VOXL1  voxel grids; dense-float, dense-bit, or run-length payloads
//          (the bit and run-length encodings require binarized grids)
//   MWTS1  named weight matrices, row-major float32
//   FMAP1  feature-map stacks plus the image size they align to
//
// Detections and ground truth are JSON lines, one record per line:
//   {"image_id": ..., "category": ..., "score": ..., "box": [x0,y0,x1,y1],
//    "mesh": "path.obj"}            (ground truth omits "score")
//
// All writers go through write-temp-then-rename. Failures throw IoError
// (filesystem) or FormatError (magic/dims/payload/parse violations).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxmesh/geometry.hpp"
#include "voxmesh/feature_map.hpp"
#include "voxmesh/matrix.hpp"
#include "voxmesh/metrics.hpp"
#include "voxmesh/refine.hpp"
#include "voxmesh/voxel_grid.hpp"

namespace voxmesh {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TriangleMesh read_obj(const std::string& path);
void write_obj(const TriangleMesh& mesh, const std::string& path);

enum class VoxelEncoding : uint8_t { dense_float = 0, dense_bit = 1, run_length = 2 };

VoxelGrid read_voxels(const std::string& path);
void write_voxels(const VoxelGrid& grid, const std::string& path,
                  VoxelEncoding encoding = VoxelEncoding::dense_float);

// Occupancy grid with value 1 where the input exceeds tau.
VoxelGrid binarize(const VoxelGrid& grid, double tau);

struct WeightEntry {
    std::string name;
    Matrix matrix;
};

struct WeightContainer {
    std::vector<WeightEntry> entries;

    const Matrix* find(const std::string& name) const;
};

WeightContainer read_weights(const std::string& path);
void write_weights(const WeightContainer& container, const std::string& path);

// Builds per-stage configs from entries named
//   stage<K>.proj, stage<K>.conv<J>.w0 / .w1, stage<K>.block<B>.skip,
//   stage<K>.vert
// with K, J, B counted from 0. Shapes are checked when the stage runs.
std::vector<StageConfig> stage_configs_from_weights(const WeightContainer& container,
                                                    StageStyle style);

// Name scheme inverse of stage_configs_from_weights, for writing fixtures.
WeightContainer weights_from_stage_configs(const std::vector<StageConfig>& stages);

struct FeatureMapBundle {
    int image_width{0}, image_height{0};
    std::vector<FeatureMap> maps;
};

FeatureMapBundle read_feature_maps(const std::string& path);
void write_feature_maps(const FeatureMapBundle& bundle, const std::string& path);

struct DetectionRecord {
    std::string image_id;
    std::string category;
    double score{0.0};
    Box2D box;
    std::string mesh_path;
};

struct GroundTruthRecord {
    std::string image_id;
    std::string category;
    Box2D box;
    std::string mesh_path;
};

std::vector<DetectionRecord> read_detections_jsonl(const std::string& path);
std::vector<GroundTruthRecord> read_ground_truth_jsonl(const std::string& path);

void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace voxmesh
