#include "sphrecon/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sphrecon/error.hpp"

namespace sphrecon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'V', 'O', 'X', 'B'};
constexpr std::uint32_t kVoxbVersion = 1;
constexpr int kSidecarVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += 8;
        return v;
    }
    std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) throw FormatError("VOXB: truncated header");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

json read_json(const fs::path& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

fs::path with_suffix(const fs::path& sidecar, const std::string& suffix) {
    fs::path p = sidecar;
    p.replace_extension();
    p += suffix;
    return p;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::size_t Tensor::element_count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
    detail::require(t.element_count() ==
                        std::visit([](const auto& v) { return v.size(); }, t.data),
                    "Tensor: shape does not match element count");
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    put_u32(out, kVoxbVersion);
    put_u32(out, static_cast<std::uint32_t>(t.type()));
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put_u64(out, d);
    if (t.type() == ElementType::F32) {
        for (float f : t.f32()) put_u32(out, std::bit_cast<std::uint32_t>(f));
    } else {
        const auto& u = t.u8();
        out.insert(out.end(), u.begin(), u.end());
    }
    return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("VOXB: bad magic");
    Reader r(bytes.subspan(4));
    const auto version = r.u32();
    if (version != kVoxbVersion) throw FormatError("VOXB: unsupported version " + std::to_string(version));
    const auto dtype = r.u32();
    if (dtype > 1) throw FormatError("VOXB: unknown element type " + std::to_string(dtype));
    const auto rank = r.u32();
    if (rank > 16) throw FormatError("VOXB: implausible rank " + std::to_string(rank));

    Tensor t;
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const auto d = r.u64();
        if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / 8 / d)
            throw FormatError("VOXB: dimensions overflow");
        count *= d;
        t.shape.push_back(d);
    }
    const std::uint64_t elem_size = dtype == 0 ? 4 : 1;
    const auto payload = r.rest();
    if (payload.size() != count * elem_size)
        throw CorruptionError("VOXB: header declares " + std::to_string(count) + " elements but payload holds " +
                              std::to_string(payload.size()) + " bytes");
    if (dtype == 0) {
        std::vector<float> v(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t bits = 0;
            for (int k = 0; k < 4; ++k) bits |= std::uint32_t{payload[4 * i + k]} << (8 * k);
            v[i] = std::bit_cast<float>(bits);
        }
        t.data = std::move(v);
    } else {
        t.data = std::vector<std::uint8_t>(payload.begin(), payload.end());
    }
    return t;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    auto in = open_in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
    auto out = open_out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void write_tensor(const fs::path& path, const Tensor& t) { write_file_bytes(path, encode_tensor(t)); }

Tensor read_tensor(const fs::path& path) { return decode_tensor(read_file_bytes(path)); }

void write_obj(const fs::path& path, const TriangleMesh& mesh) {
    auto out = open_out(path);
    for (const auto& v : mesh.vertices())
        out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
    for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj(const fs::path& path, const PointCloud& points) {
    auto out = open_out(path);
    for (const auto& v : points.points())
        out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
}

namespace {

struct ObjData {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
};

ObjData parse_obj(const fs::path& path) {
    auto in = open_in(path);
    ObjData d;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad vertex record");
            d.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::uint32_t> idx;
            std::string tok;
            while (ls >> tok) {
                long long i = 0;
                try {
                    i = std::stoll(tok.substr(0, tok.find('/')));
                } catch (const std::exception&) {
                    throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad face index");
                }
                const auto nv = static_cast<long long>(d.vertices.size());
                const long long resolved = i < 0 ? nv + i : i - 1;
                if (resolved < 0 || resolved >= nv)
                    throw FormatError(path.string() + ":" + std::to_string(line_no) + ": face index out of range");
                idx.push_back(static_cast<std::uint32_t>(resolved));
            }
            if (idx.size() < 3)
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k) d.triangles.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    return d;
}

}  // namespace

TriangleMesh read_obj_mesh(const fs::path& path) {
    auto d = parse_obj(path);
    try {
        return {std::move(d.vertices), std::move(d.triangles)};
    } catch (const ContractError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

PointCloud read_obj_points(const fs::path& path) { return PointCloud(parse_obj(path).vertices); }

void write_pfm(const fs::path& path, const DepthMap& depth) {
    auto out = open_out(path, std::ios::binary);
    out << "Pf\n" << depth.width() << ' ' << depth.height() << "\n-1.0\n";
    std::vector<std::uint8_t> row;
    for (std::size_t r = 0; r < depth.height(); ++r) {
        const std::size_t v = depth.height() - 1 - r;  // PFM stores rows bottom to top
        row.clear();
        for (std::size_t u = 0; u < depth.width(); ++u) {
            const float d = depth.valid(u, v) ? depth.depth(u, v) : 0.0f;
            put_u32(row, std::bit_cast<std::uint32_t>(d));
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write failed: " + path.string());
}

DepthMap read_pfm(const fs::path& path) {
    const auto bytes = read_file_bytes(path);
    std::size_t pos = 0;
    auto token = [&]() {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        std::string s;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) s.push_back(static_cast<char>(bytes[pos++]));
        return s;
    };
    if (token() != "Pf") throw FormatError(path.string() + ": not a grayscale PFM");
    std::size_t width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoul(token());
        height = std::stoul(token());
        scale = std::stod(token());
    } catch (const std::exception&) {
        throw FormatError(path.string() + ": malformed PFM header");
    }
    if (width == 0 || height == 0 || scale == 0.0) throw FormatError(path.string() + ": malformed PFM header");
    ++pos;  // single whitespace byte ends the header
    const bool little = scale < 0.0;
    const std::size_t count = width * height;
    if (bytes.size() - std::min(pos, bytes.size()) != count * 4)
        throw CorruptionError(path.string() + ": PFM payload size does not match header");

    std::vector<float> values(count, 0.0f);
    std::vector<std::uint8_t> mask(count, 0);
    for (std::size_t r = 0; r < height; ++r) {
        const std::size_t v = height - 1 - r;
        for (std::size_t u = 0; u < width; ++u) {
            const std::uint8_t* p = bytes.data() + pos + 4 * (r * width + u);
            std::uint32_t bits = 0;
            for (int k = 0; k < 4; ++k) {
                const int shift = little ? 8 * k : 8 * (3 - k);
                bits |= std::uint32_t{p[k]} << shift;
            }
            const float d = std::bit_cast<float>(bits);
            if (std::isfinite(d) && d > 0.0f) {
                values[v * width + u] = d;
                mask[v * width + u] = 1;
            }
        }
    }
    return {width, height, std::move(values), std::move(mask)};
}

void save_spherical_map(const fs::path& sidecar, const SphericalMap& map) {
    const auto values_path = with_suffix(sidecar, ".values.voxb");
    const auto mask_path = with_suffix(sidecar, ".mask.voxb");
    const std::vector<std::uint64_t> shape{map.n_lat(), map.n_lon()};
    write_tensor(values_path, Tensor{shape, map.values()});
    write_tensor(mask_path, Tensor{shape, map.mask()});
    write_json(sidecar, {{"format", "sphrecon.spherical_map"},
                         {"version", kSidecarVersion},
                         {"parameterization", "equirectangular-cell-center-v1"},
                         {"n_lon", map.n_lon()},
                         {"n_lat", map.n_lat()},
                         {"values", values_path.filename().string()},
                         {"mask", mask_path.filename().string()}});
}

SphericalMap load_spherical_map(const fs::path& sidecar) {
    const auto j = read_json(sidecar);
    try {
        if (j.at("format").get<std::string>() != "sphrecon.spherical_map")
            throw FormatError(sidecar.string() + ": not a spherical map sidecar");
        const auto n_lon = j.at("n_lon").get<std::size_t>();
        const auto n_lat = j.at("n_lat").get<std::size_t>();
        const auto dir = sidecar.parent_path();
        auto values = read_tensor(dir / j.at("values").get<std::string>());
        auto mask = read_tensor(dir / j.at("mask").get<std::string>());
        const std::vector<std::uint64_t> shape{n_lat, n_lon};
        if (values.shape != shape || mask.shape != shape || values.type() != ElementType::F32 ||
            mask.type() != ElementType::U8)
            throw CorruptionError(sidecar.string() + ": tensors disagree with sidecar");
        return {n_lon, n_lat, values.f32(), mask.u8()};
    } catch (const json::exception& e) {
        throw FormatError(sidecar.string() + ": " + e.what());
    } catch (const ContractError& e) {
        throw CorruptionError(sidecar.string() + ": " + e.what());
    }
}

void save_voxel_grid(const fs::path& voxb, const VoxelGrid& grid) {
    const auto r = static_cast<std::uint64_t>(grid.resolution());
    write_tensor(voxb, Tensor{{r, r, r}, grid.values()});
    const auto& c = grid.extent().center;
    write_json(with_suffix(voxb, ".json"), {{"format", "sphrecon.voxel_grid"},
                                            {"version", kSidecarVersion},
                                            {"resolution", grid.resolution()},
                                            {"extent", {{"center", {c.x(), c.y(), c.z()}},
                                                        {"side", grid.extent().side}}}});
}

VoxelGrid load_voxel_grid(const fs::path& voxb) {
    auto t = read_tensor(voxb);
    if (t.type() != ElementType::F32 || t.shape.size() != 3 || t.shape[0] != t.shape[1] || t.shape[1] != t.shape[2])
        throw FormatError(voxb.string() + ": voxel grid must be a cubic rank-3 f32 tensor");
    Extent extent;
    const auto sidecar = with_suffix(voxb, ".json");
    if (fs::exists(sidecar)) {
        const auto j = read_json(sidecar);
        try {
            if (j.at("resolution").get<std::uint64_t>() != t.shape[0])
                throw CorruptionError(voxb.string() + ": sidecar resolution disagrees with tensor");
            const auto c = j.at("extent").at("center").get<std::vector<double>>();
            if (c.size() != 3) throw FormatError(sidecar.string() + ": extent center must have 3 entries");
            extent.center = Vec3(c[0], c[1], c[2]);
            extent.side = j.at("extent").at("side").get<double>();
        } catch (const json::exception& e) {
            throw FormatError(sidecar.string() + ": " + e.what());
        }
    }
    try {
        return {static_cast<std::size_t>(t.shape[0]), extent, t.f32()};
    } catch (const ContractError& e) {
        throw CorruptionError(voxb.string() + ": " + e.what());
    }
}

}  // namespace sphrecon
