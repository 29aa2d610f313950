#include "voxmesh/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace voxmesh {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("cannot read " + path);
    return buf.str();
}

void rename_or_throw(const std::string& from, const std::string& to) {
    if (std::rename(from.c_str(), to.c_str()) != 0) {
        std::remove(from.c_str());
        throw IoError("cannot rename " + from + " to " + to);
    }
}

// Little-endian byte cursor helpers shared by the binary formats.
struct Writer {
    std::string bytes;

    void u8(uint8_t v) { bytes.push_back(static_cast<char>(v)); }
    void u16(uint16_t v) {
        for (int i = 0; i < 2; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<uint8_t>(v >> (8 * i)));
    }
    void f32(float v) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void raw(const char* data, size_t len) { bytes.append(data, len); }
};

struct Reader {
    const std::string& bytes;
    size_t at{0};
    const std::string& path;

    uint8_t u8() {
        if (at + 1 > bytes.size()) throw FormatError(path + ": truncated payload");
        return static_cast<uint8_t>(bytes[at++]);
    }
    uint16_t u16() {
        uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(u8()) << (8 * i);
        return v;
    }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(u8()) << (8 * i);
        return v;
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string str(size_t len) {
        if (at + len > bytes.size()) throw FormatError(path + ": truncated payload");
        std::string s = bytes.substr(at, len);
        at += len;
        return s;
    }
    void expect_magic(const char* magic) {
        if (str(5) != magic) throw FormatError(path + ": bad magic, expected " + magic);
        if (u8() != 1) throw FormatError(path + ": unsupported version");
    }
    void expect_end() {
        if (at != bytes.size()) throw FormatError(path + ": trailing bytes after payload");
    }
};

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.good()) {
            std::remove(tmp.c_str());
            throw IoError("cannot write " + tmp);
        }
    }
    rename_or_throw(tmp, path);
}

// ---------------------------------------------------------------- OBJ -----

TriangleMesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    static const std::set<std::string> kIgnored = {"vn", "vt", "vp", "o",      "g",
                                                   "s",  "l",  "p",  "mtllib", "usemtl"};
    TriangleMesh mesh;
    std::vector<std::pair<Face, int>> faces_with_lines;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string keyword;
        if (!(ls >> keyword) || keyword[0] == '#') continue;
        if (keyword == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) {
                throw FormatError(path + ":" + std::to_string(line_no) + ": malformed vertex");
            }
            mesh.vertices.push_back(v);
        } else if (keyword == "f") {
            std::vector<int> idx;
            std::string token;
            while (ls >> token) {
                // Strip /-suffixed texture and normal references.
                const size_t slash = token.find('/');
                if (slash != std::string::npos) token.resize(slash);
                int i = 0;
                try {
                    size_t used = 0;
                    i = std::stoi(token, &used);
                    if (used != token.size()) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    throw FormatError(path + ":" + std::to_string(line_no) +
                                      ": malformed face index '" + token + "'");
                }
                if (i < 1) {
                    throw FormatError(path + ":" + std::to_string(line_no) + ": face index " +
                                      std::to_string(i) + " (indices are 1-based)");
                }
                idx.push_back(i - 1);
            }
            if (idx.size() < 3) {
                throw FormatError(path + ":" + std::to_string(line_no) +
                                  ": face needs at least 3 indices");
            }
            for (size_t k = 1; k + 1 < idx.size(); ++k) {
                faces_with_lines.push_back({{idx[0], idx[k], idx[k + 1]}, line_no});
            }
        } else if (!kIgnored.count(keyword)) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": unknown directive '" +
                              keyword + "'");
        }
    }
    const int n = static_cast<int>(mesh.vertices.size());
    mesh.faces.reserve(faces_with_lines.size());
    for (const auto& [face, fline] : faces_with_lines) {
        for (int k = 0; k < 3; ++k) {
            if (face[k] >= n) {
                throw FormatError(path + ":" + std::to_string(fline) + ": face index " +
                                  std::to_string(face[k] + 1) + " out of range (" +
                                  std::to_string(n) + " vertices)");
            }
        }
        mesh.faces.push_back(face);
    }
    return mesh;
}

void write_obj(const TriangleMesh& mesh, const std::string& path) {
    validate_mesh(mesh);
    std::ostringstream out;
    char buf[96];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const Face& f : mesh.faces) {
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    }
    write_text_atomic(path, out.str());
}

// --------------------------------------------------------------- voxels ----

VoxelGrid binarize(const VoxelGrid& grid, double tau) {
    validate_grid(grid);
    VoxelGrid out = grid;
    for (float& v : out.values) v = v > tau ? 1.0f : 0.0f;
    return out;
}

namespace {

void require_binary(const VoxelGrid& grid, const char* what) {
    for (float v : grid.values) {
        if (v != 0.0f && v != 1.0f) {
            throw FormatError(std::string(what) + " encoding requires a binarized grid");
        }
    }
}

}  // namespace

void write_voxels(const VoxelGrid& grid, const std::string& path, VoxelEncoding encoding) {
    validate_grid(grid);
    Writer w;
    w.raw("VOXL1", 5);
    w.u8(1);
    w.u8(static_cast<uint8_t>(encoding));
    w.u32(static_cast<uint32_t>(grid.n));
    w.u32(static_cast<uint32_t>(grid.d));
    w.u32(static_cast<uint32_t>(grid.h));
    w.u32(static_cast<uint32_t>(grid.w));
    switch (encoding) {
        case VoxelEncoding::dense_float:
            for (float v : grid.values) w.f32(v);
            break;
        case VoxelEncoding::dense_bit: {
            require_binary(grid, "dense-bit");
            uint8_t byte = 0;
            int fill = 0;
            for (float v : grid.values) {
                if (v != 0.0f) byte |= static_cast<uint8_t>(1u << fill);
                if (++fill == 8) {
                    w.u8(byte);
                    byte = 0;
                    fill = 0;
                }
            }
            if (fill > 0) w.u8(byte);
            break;
        }
        case VoxelEncoding::run_length: {
            require_binary(grid, "run-length");
            std::vector<uint32_t> runs;
            uint8_t first = grid.values[0] != 0.0f ? 1 : 0;
            uint8_t current = first;
            uint32_t length = 0;
            for (float v : grid.values) {
                uint8_t bit = v != 0.0f ? 1 : 0;
                if (bit == current) {
                    ++length;
                } else {
                    runs.push_back(length);
                    current = bit;
                    length = 1;
                }
            }
            runs.push_back(length);
            w.u8(first);
            w.u32(static_cast<uint32_t>(runs.size()));
            for (uint32_t r : runs) w.u32(r);
            break;
        }
    }
    write_text_atomic(path, w.bytes);
}

VoxelGrid read_voxels(const std::string& path) {
    const std::string bytes = read_file(path);
    Reader r{bytes, 0, path};
    r.expect_magic("VOXL1");
    const uint8_t encoding = r.u8();
    VoxelGrid grid;
    grid.n = static_cast<int>(r.u32());
    grid.d = static_cast<int>(r.u32());
    grid.h = static_cast<int>(r.u32());
    grid.w = static_cast<int>(r.u32());
    if (grid.n <= 0 || grid.d <= 0 || grid.h <= 0 || grid.w <= 0) {
        throw FormatError(path + ": nonpositive dims");
    }
    const size_t cells = grid.cell_count();
    grid.values.reserve(cells);
    switch (encoding) {
        case 0:
            for (size_t i = 0; i < cells; ++i) grid.values.push_back(r.f32());
            break;
        case 1: {
            uint8_t byte = 0;
            for (size_t i = 0; i < cells; ++i) {
                if (i % 8 == 0) byte = r.u8();
                grid.values.push_back((byte >> (i % 8)) & 1u ? 1.0f : 0.0f);
            }
            break;
        }
        case 2: {
            uint8_t value = r.u8();
            if (value > 1) throw FormatError(path + ": run-length start value must be 0 or 1");
            const uint32_t run_count = r.u32();
            size_t total = 0;
            for (uint32_t k = 0; k < run_count; ++k) {
                const uint32_t len = r.u32();
                if (len == 0) throw FormatError(path + ": zero-length run");
                if (total + len > cells) throw FormatError(path + ": runs exceed cell count");
                for (uint32_t i = 0; i < len; ++i) grid.values.push_back(value ? 1.0f : 0.0f);
                total += len;
                value ^= 1;
            }
            if (total != cells) throw FormatError(path + ": runs cover " + std::to_string(total) +
                                                  " of " + std::to_string(cells) + " cells");
            break;
        }
        default:
            throw FormatError(path + ": unknown encoding " + std::to_string(encoding));
    }
    r.expect_end();
    try {
        validate_grid(grid);
    } catch (const std::invalid_argument& e) {
        throw FormatError(path + ": " + e.what());
    }
    return grid;
}

// -------------------------------------------------------------- weights ----

const Matrix* WeightContainer::find(const std::string& name) const {
    for (const WeightEntry& e : entries) {
        if (e.name == name) return &e.matrix;
    }
    return nullptr;
}

void write_weights(const WeightContainer& container, const std::string& path) {
    std::set<std::string> names;
    for (const WeightEntry& e : container.entries) {
        if (!names.insert(e.name).second) {
            throw FormatError("write_weights: duplicate entry name '" + e.name + "'");
        }
        validate_matrix(e.matrix);
    }
    Writer w;
    w.raw("MWTS1", 5);
    w.u8(1);
    w.u32(static_cast<uint32_t>(container.entries.size()));
    for (const WeightEntry& e : container.entries) {
        w.u16(static_cast<uint16_t>(e.name.size()));
        w.raw(e.name.data(), e.name.size());
        w.u32(static_cast<uint32_t>(e.matrix.rows));
        w.u32(static_cast<uint32_t>(e.matrix.cols));
        for (double v : e.matrix.values) w.f32(static_cast<float>(v));
    }
    write_text_atomic(path, w.bytes);
}

WeightContainer read_weights(const std::string& path) {
    const std::string bytes = read_file(path);
    Reader r{bytes, 0, path};
    r.expect_magic("MWTS1");
    const uint32_t count = r.u32();
    WeightContainer container;
    std::set<std::string> names;
    for (uint32_t i = 0; i < count; ++i) {
        WeightEntry e;
        e.name = r.str(r.u16());
        if (!names.insert(e.name).second) {
            throw FormatError(path + ": duplicate entry name '" + e.name + "'");
        }
        e.matrix.rows = static_cast<int>(r.u32());
        e.matrix.cols = static_cast<int>(r.u32());
        if (e.matrix.rows <= 0 || e.matrix.cols <= 0) {
            throw FormatError(path + ": nonpositive matrix dims for '" + e.name + "'");
        }
        const size_t n = static_cast<size_t>(e.matrix.rows) * e.matrix.cols;
        e.matrix.values.reserve(n);
        for (size_t k = 0; k < n; ++k) e.matrix.values.push_back(r.f32());
        container.entries.push_back(std::move(e));
    }
    r.expect_end();
    return container;
}

std::vector<StageConfig> stage_configs_from_weights(const WeightContainer& container,
                                                    StageStyle style) {
    int stage_count = 0;
    for (const WeightEntry& e : container.entries) {
        if (e.name.rfind("stage", 0) != 0) {
            throw FormatError("stage_configs_from_weights: unexpected entry '" + e.name + "'");
        }
        int k = std::atoi(e.name.c_str() + 5);
        stage_count = std::max(stage_count, k + 1);
    }
    if (stage_count == 0) {
        throw FormatError("stage_configs_from_weights: container holds no stages");
    }
    std::vector<StageConfig> stages;
    for (int s = 0; s < stage_count; ++s) {
        const std::string prefix = "stage" + std::to_string(s) + ".";
        auto need = [&](const std::string& suffix) -> const Matrix& {
            const Matrix* m = container.find(prefix + suffix);
            if (!m) {
                throw FormatError("stage_configs_from_weights: missing '" + prefix + suffix + "'");
            }
            return *m;
        };
        StageConfig cfg;
        cfg.style = style;
        int convs = 0;
        while (container.find(prefix + "conv" + std::to_string(convs) + ".w0")) ++convs;
        if (convs == 0) {
            throw FormatError("stage_configs_from_weights: stage " + std::to_string(s) +
                              " has no convolutions");
        }
        cfg.conv_count = convs;
        cfg.feature_dim = need("proj").rows;
        cfg.weights.push_back(need("proj"));
        for (int c = 0; c < convs; ++c) {
            const std::string conv = "conv" + std::to_string(c) + ".";
            cfg.weights.push_back(need(conv + "w0"));
            cfg.weights.push_back(need(conv + "w1"));
            if (style == StageStyle::residual && c % 2 == 1) {
                const Matrix* skip =
                    container.find(prefix + "block" + std::to_string(c / 2) + ".skip");
                if (skip) cfg.weights.push_back(*skip);
            }
        }
        cfg.weights.push_back(need("vert"));
        stages.push_back(std::move(cfg));
    }
    return stages;
}

WeightContainer weights_from_stage_configs(const std::vector<StageConfig>& stages) {
    WeightContainer container;
    for (size_t s = 0; s < stages.size(); ++s) {
        const StageConfig& cfg = stages[s];
        const std::string prefix = "stage" + std::to_string(s) + ".";
        size_t at = 0;
        auto push = [&](const std::string& suffix) {
            container.entries.push_back({prefix + suffix, cfg.weights.at(at++)});
        };
        push("proj");
        if (cfg.style == StageStyle::light) {
            for (int c = 0; c < cfg.conv_count; ++c) {
                push("conv" + std::to_string(c) + ".w0");
                push("conv" + std::to_string(c) + ".w1");
            }
        } else {
            for (int b = 0; b < cfg.conv_count / 2; ++b) {
                push("conv" + std::to_string(2 * b) + ".w0");
                push("conv" + std::to_string(2 * b) + ".w1");
                push("conv" + std::to_string(2 * b + 1) + ".w0");
                push("conv" + std::to_string(2 * b + 1) + ".w1");
                // A block emits a skip entry only when it changes width; the
                // remaining weight count tells whether one is present.
                const size_t remaining = cfg.weights.size() - at;
                const size_t blocks_left = cfg.conv_count / 2 - b - 1;
                if (remaining > blocks_left * 4 + 1) {
                    push("block" + std::to_string(b) + ".skip");
                }
            }
        }
        push("vert");
    }
    return container;
}

// ---------------------------------------------------------- feature maps ---

void write_feature_maps(const FeatureMapBundle& bundle, const std::string& path) {
    if (bundle.image_width <= 0 || bundle.image_height <= 0) {
        throw FormatError("write_feature_maps: image size must be positive");
    }
    Writer w;
    w.raw("FMAP1", 5);
    w.u8(1);
    w.u32(static_cast<uint32_t>(bundle.image_width));
    w.u32(static_cast<uint32_t>(bundle.image_height));
    w.u32(static_cast<uint32_t>(bundle.maps.size()));
    for (const FeatureMap& m : bundle.maps) {
        validate_feature_map(m);
        w.u32(static_cast<uint32_t>(m.height));
        w.u32(static_cast<uint32_t>(m.width));
        w.u32(static_cast<uint32_t>(m.channels));
        for (float v : m.data) w.f32(v);
    }
    write_text_atomic(path, w.bytes);
}

FeatureMapBundle read_feature_maps(const std::string& path) {
    const std::string bytes = read_file(path);
    Reader r{bytes, 0, path};
    r.expect_magic("FMAP1");
    FeatureMapBundle bundle;
    bundle.image_width = static_cast<int>(r.u32());
    bundle.image_height = static_cast<int>(r.u32());
    if (bundle.image_width <= 0 || bundle.image_height <= 0) {
        throw FormatError(path + ": nonpositive image size");
    }
    const uint32_t count = r.u32();
    for (uint32_t i = 0; i < count; ++i) {
        FeatureMap m;
        m.height = static_cast<int>(r.u32());
        m.width = static_cast<int>(r.u32());
        m.channels = static_cast<int>(r.u32());
        if (m.height <= 0 || m.width <= 0 || m.channels <= 0) {
            throw FormatError(path + ": nonpositive feature map dims");
        }
        const size_t n = static_cast<size_t>(m.height) * m.width * m.channels;
        m.data.reserve(n);
        for (size_t k = 0; k < n; ++k) m.data.push_back(r.f32());
        bundle.maps.push_back(std::move(m));
    }
    r.expect_end();
    return bundle;
}

// ------------------------------------------------------------ detections ---

namespace {

Box2D parse_box(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4) {
        throw FormatError(where + ": box must be [x0, y0, x1, y1]");
    }
    Box2D b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) {
        throw FormatError(where + ": box must have positive area");
    }
    return b;
}

template <typename Record>
std::vector<Record> read_jsonl(const std::string& path, bool with_score) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Record> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
        try {
            Record rec;
            rec.image_id = j.at("image_id").is_string() ? j.at("image_id").get<std::string>()
                                                        : j.at("image_id").dump();
            rec.category = j.at("category").get<std::string>();
            rec.box = parse_box(j.at("box"), where);
            rec.mesh_path = j.at("mesh").get<std::string>();
            if constexpr (std::is_same_v<Record, DetectionRecord>) {
                rec.score = j.at("score").get<double>();
            }
            records.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    (void)with_score;
    return records;
}

}  // namespace

std::vector<DetectionRecord> read_detections_jsonl(const std::string& path) {
    return read_jsonl<DetectionRecord>(path, true);
}

std::vector<GroundTruthRecord> read_ground_truth_jsonl(const std::string& path) {
    return read_jsonl<GroundTruthRecord>(path, false);
}

}  // namespace voxmesh
