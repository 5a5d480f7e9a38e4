#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace sphrecon {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Per-pixel view-space depth with a validity mask. Row-major, index v*width+u.
class DepthMap {
public:
    DepthMap() = default;
    DepthMap(std::size_t width, std::size_t height, std::vector<float> values,
             std::vector<std::uint8_t> mask);
    /// A map with every pixel masked out.
    static DepthMap empty(std::size_t width, std::size_t height);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    float depth(std::size_t u, std::size_t v) const { return values_[v * width_ + u]; }
    bool valid(std::size_t u, std::size_t v) const { return mask_[v * width_ + u] != 0; }
    const std::vector<float>& values() const { return values_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::size_t valid_count() const;

    friend bool operator==(const DepthMap&, const DepthMap&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<float> values_;
    std::vector<std::uint8_t> mask_;
};

class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::vector<Vec3> points);

    const std::vector<Vec3>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Vec3& operator[](std::size_t i) const { return points_[i]; }

    friend bool operator==(const PointCloud&, const PointCloud&) = default;

private:
    std::vector<Vec3> points_;
};

using Triangle = std::array<std::uint32_t, 3>;

class TriangleMesh {
public:
    TriangleMesh() = default;
    TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    bool empty() const { return triangles_.empty(); }

    Vec3 corner(std::size_t tri, int k) const { return vertices_[triangles_[tri][k]]; }
    double triangle_area(std::size_t tri) const;
    double total_area() const;

    friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
};

/// Equirectangular grid of inward radial distances on the unit sphere.
/// Row-major with latitude as the row: index lat*n_lon + lon. Longitude wraps.
class SphericalMap {
public:
    SphericalMap() = default;
    SphericalMap(std::size_t n_lon, std::size_t n_lat, std::vector<float> values,
                 std::vector<std::uint8_t> mask);

    std::size_t n_lon() const { return n_lon_; }
    std::size_t n_lat() const { return n_lat_; }
    std::size_t index(std::ptrdiff_t lon, std::size_t lat) const;
    float value(std::ptrdiff_t lon, std::size_t lat) const { return values_[index(lon, lat)]; }
    bool observed(std::ptrdiff_t lon, std::size_t lat) const { return mask_[index(lon, lat)] != 0; }
    const std::vector<float>& values() const { return values_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::size_t observed_count() const;

    friend bool operator==(const SphericalMap&, const SphericalMap&) = default;

private:
    std::size_t n_lon_ = 0;
    std::size_t n_lat_ = 0;
    std::vector<float> values_;
    std::vector<std::uint8_t> mask_;
};

/// Axis-aligned world-space cube.
struct Extent {
    Vec3 center = Vec3::Zero();
    double side = 1.0;

    Vec3 min_corner() const { return center - Vec3::Constant(0.5 * side); }
    friend bool operator==(const Extent& a, const Extent& b) {
        return a.center == b.center && a.side == b.side;
    }
};

/// Cubic occupancy grid; values sampled at cell centers. Index (z*res + y)*res + x.
class VoxelGrid {
public:
    VoxelGrid() = default;
    VoxelGrid(std::size_t resolution, Extent extent, std::vector<float> values);
    static VoxelGrid zeros(std::size_t resolution, Extent extent = {});

    std::size_t resolution() const { return resolution_; }
    const Extent& extent() const { return extent_; }
    double cell_size() const { return extent_.side / static_cast<double>(resolution_); }
    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
        return (z * resolution_ + y) * resolution_ + x;
    }
    float at(std::size_t x, std::size_t y, std::size_t z) const { return values_[index(x, y, z)]; }
    Vec3 cell_center(std::size_t x, std::size_t y, std::size_t z) const;
    const std::vector<float>& values() const { return values_; }

    friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

private:
    std::size_t resolution_ = 0;
    Extent extent_;
    std::vector<float> values_;
};

/// Rigid transform x -> rotation * x + translation.
class Pose {
public:
    Pose() = default;
    Pose(const Mat3& rotation, const Vec3& translation);
    static Pose identity() { return {}; }

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }
    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    Pose inverse() const;
    Pose compose(const Pose& inner) const;  // this ∘ inner

private:
    Mat3 rotation_ = Mat3::Identity();
    Vec3 translation_ = Vec3::Zero();
};

/// Uniform scale followed by translation: x -> scale * x + translation.
struct Similarity {
    double scale = 1.0;
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return scale * p + translation; }
    Vec3 apply_inverse(const Vec3& p) const { return (p - translation) / scale; }
};

TriangleMesh transform(const TriangleMesh& mesh, const Pose& pose);
TriangleMesh transform(const TriangleMesh& mesh, const Similarity& s);
PointCloud transform(const PointCloud& pc, const Pose& pose);
PointCloud transform(const PointCloud& pc, const Similarity& s);

}  // namespace sphrecon
