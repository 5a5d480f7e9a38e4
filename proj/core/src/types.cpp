#include "sphrecon/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "sphrecon/error.hpp"

namespace sphrecon {

using detail::require;

DepthMap::DepthMap(std::size_t width, std::size_t height, std::vector<float> values,
                   std::vector<std::uint8_t> mask)
    : width_(width), height_(height), values_(std::move(values)), mask_(std::move(mask)) {
    require(values_.size() == width_ * height_, "DepthMap: values size does not match dimensions");
    require(mask_.size() == width_ * height_, "DepthMap: mask size does not match dimensions");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!mask_[i]) continue;
        require(std::isfinite(values_[i]) && values_[i] > 0.0f,
                "DepthMap: masked-in depth must be finite and positive (pixel " +
                    std::to_string(i) + ")");
    }
}

DepthMap DepthMap::empty(std::size_t width, std::size_t height) {
    return {width, height, std::vector<float>(width * height, 0.0f),
            std::vector<std::uint8_t>(width * height, 0)};
}

std::size_t DepthMap::valid_count() const {
    return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(),
                                                  [](std::uint8_t m) { return m != 0; }));
}

PointCloud::PointCloud(std::vector<Vec3> points) : points_(std::move(points)) {
    for (const auto& p : points_) require(p.allFinite(), "PointCloud: non-finite coordinate");
}

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    for (const auto& v : vertices_) require(v.allFinite(), "TriangleMesh: non-finite vertex");
    const auto n = vertices_.size();
    for (const auto& t : triangles_) {
        require(t[0] < n && t[1] < n && t[2] < n, "TriangleMesh: triangle index out of range");
        require(t[0] != t[1] && t[1] != t[2] && t[0] != t[2],
                "TriangleMesh: degenerate triangle (repeated vertex index)");
    }
}

double TriangleMesh::triangle_area(std::size_t tri) const {
    const Vec3 a = corner(tri, 0);
    return 0.5 * (corner(tri, 1) - a).cross(corner(tri, 2) - a).norm();
}

double TriangleMesh::total_area() const {
    double sum = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) sum += triangle_area(t);
    return sum;
}

SphericalMap::SphericalMap(std::size_t n_lon, std::size_t n_lat, std::vector<float> values,
                           std::vector<std::uint8_t> mask)
    : n_lon_(n_lon), n_lat_(n_lat), values_(std::move(values)), mask_(std::move(mask)) {
    require(n_lon_ > 0 && n_lat_ > 0, "SphericalMap: resolution must be positive");
    require(values_.size() == n_lon_ * n_lat_, "SphericalMap: values size does not match grid");
    require(mask_.size() == n_lon_ * n_lat_, "SphericalMap: mask size does not match grid");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!mask_[i]) continue;
        require(std::isfinite(values_[i]) && values_[i] >= 0.0f && values_[i] <= 1.0f,
                "SphericalMap: observed value outside [0, 1]");
    }
}

std::size_t SphericalMap::index(std::ptrdiff_t lon, std::size_t lat) const {
    const auto n = static_cast<std::ptrdiff_t>(n_lon_);
    const auto wrapped = ((lon % n) + n) % n;
    return lat * n_lon_ + static_cast<std::size_t>(wrapped);
}

std::size_t SphericalMap::observed_count() const {
    return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(),
                                                  [](std::uint8_t m) { return m != 0; }));
}

VoxelGrid::VoxelGrid(std::size_t resolution, Extent extent, std::vector<float> values)
    : resolution_(resolution), extent_(extent), values_(std::move(values)) {
    require(resolution_ > 0, "VoxelGrid: resolution must be positive");
    require(extent_.side > 0.0 && std::isfinite(extent_.side) && extent_.center.allFinite(),
            "VoxelGrid: extent must be a finite cube with positive side");
    require(values_.size() == resolution_ * resolution_ * resolution_,
            "VoxelGrid: values size does not match resolution^3");
    for (float v : values_)
        require(v >= 0.0f && v <= 1.0f, "VoxelGrid: occupancy outside [0, 1]");
}

VoxelGrid VoxelGrid::zeros(std::size_t resolution, Extent extent) {
    return {resolution, extent, std::vector<float>(resolution * resolution * resolution, 0.0f)};
}

Vec3 VoxelGrid::cell_center(std::size_t x, std::size_t y, std::size_t z) const {
    const double h = cell_size();
    return extent_.min_corner() + h * Vec3(static_cast<double>(x) + 0.5,
                                           static_cast<double>(y) + 0.5,
                                           static_cast<double>(z) + 0.5);
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
    require(rotation_.allFinite() && translation_.allFinite(), "Pose: non-finite entries");
    const double ortho_err = (rotation_.transpose() * rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff();
    require(ortho_err <= 1e-6, "Pose: rotation is not orthonormal");
    require(std::abs(rotation_.determinant() - 1.0) <= 1e-6, "Pose: rotation determinant is not +1");
}

Pose Pose::inverse() const {
    Pose inv;
    inv.rotation_ = rotation_.transpose();
    inv.translation_ = -(inv.rotation_ * translation_);
    return inv;
}

Pose Pose::compose(const Pose& inner) const {
    Pose out;
    out.rotation_ = rotation_ * inner.rotation_;
    out.translation_ = rotation_ * inner.translation_ + translation_;
    return out;
}

TriangleMesh transform(const TriangleMesh& mesh, const Pose& pose) {
    std::vector<Vec3> v;
    v.reserve(mesh.vertices().size());
    for (const auto& p : mesh.vertices()) v.push_back(pose.apply(p));
    return {std::move(v), mesh.triangles()};
}

TriangleMesh transform(const TriangleMesh& mesh, const Similarity& s) {
    std::vector<Vec3> v;
    v.reserve(mesh.vertices().size());
    for (const auto& p : mesh.vertices()) v.push_back(s.apply(p));
    return {std::move(v), mesh.triangles()};
}

PointCloud transform(const PointCloud& pc, const Pose& pose) {
    std::vector<Vec3> v;
    v.reserve(pc.size());
    for (const auto& p : pc.points()) v.push_back(pose.apply(p));
    return PointCloud(std::move(v));
}

PointCloud transform(const PointCloud& pc, const Similarity& s) {
    std::vector<Vec3> v;
    v.reserve(pc.size());
    for (const auto& p : pc.points()) v.push_back(s.apply(p));
    return PointCloud(std::move(v));
}

}  // namespace sphrecon
