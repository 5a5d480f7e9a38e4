#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "sphrecon/types.hpp"

namespace sphrecon {

// VOXB tensor container (little-endian):
//   "VOXB" | u32 version=1 | u32 dtype (0=f32, 1=u8) | u32 rank | rank x u64 dims | data
enum class ElementType : std::uint32_t { F32 = 0, U8 = 1 };

struct Tensor {
    std::vector<std::uint64_t> shape;
    std::variant<std::vector<float>, std::vector<std::uint8_t>> data;

    ElementType type() const {
        return std::holds_alternative<std::vector<float>>(data) ? ElementType::F32 : ElementType::U8;
    }
    std::size_t element_count() const;
    const std::vector<float>& f32() const { return std::get<std::vector<float>>(data); }
    const std::vector<std::uint8_t>& u8() const { return std::get<std::vector<std::uint8_t>>(data); }

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);
void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

// Wavefront OBJ, v and f records only. Coordinates are written with 17
// significant digits so write-then-read reproduces doubles exactly.
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
void write_obj(const std::filesystem::path& path, const PointCloud& points);
TriangleMesh read_obj_mesh(const std::filesystem::path& path);
PointCloud read_obj_points(const std::filesystem::path& path);

// Grayscale PFM. Masked-out pixels are stored as 0; on read every
// non-positive or non-finite sample is masked out.
void write_pfm(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_pfm(const std::filesystem::path& path);

// A spherical map is stored as <stem>.json (sidecar) next to
// <stem>.values.voxb (f32) and <stem>.mask.voxb (u8), both shaped [n_lat, n_lon].
void save_spherical_map(const std::filesystem::path& sidecar, const SphericalMap& map);
SphericalMap load_spherical_map(const std::filesystem::path& sidecar);

// A voxel grid is stored as <stem>.voxb (f32, [res, res, res], z-major) and a
// <stem>.json sidecar with resolution and extent. A missing sidecar means the
// default extent.
void save_voxel_grid(const std::filesystem::path& voxb, const VoxelGrid& grid);
VoxelGrid load_voxel_grid(const std::filesystem::path& voxb);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sphrecon
