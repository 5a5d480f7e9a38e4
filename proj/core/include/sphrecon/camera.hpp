#pragma once

#include <cstddef>

#include "sphrecon/types.hpp"

namespace sphrecon {

enum class Projection { Perspective, Orthographic };

/// Pinhole (or orthographic) camera. Camera frame: +x right, +y down, +z along
/// the optical axis. Pixel centers sit at half-integer coordinates. Depth is
/// optical-axis (z) depth, not ray length.
class Camera {
public:
    Camera() = default;

    /// focal_px: focal length in pixels. pose: camera-to-world.
    static Camera perspective(std::size_t width, std::size_t height, double focal_px, double cx, double cy,
                              const Pose& pose);
    /// Principal point at the image center, focal length from the vertical field of view.
    static Camera perspective_fov(std::size_t width, std::size_t height, double vfov_deg, const Pose& pose);
    /// pixel_size: world units covered by one pixel.
    static Camera orthographic(std::size_t width, std::size_t height, double pixel_size, double cx, double cy,
                               const Pose& pose);

    Projection projection() const { return projection_; }
    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    /// Focal length in pixels (perspective) or world units per pixel (orthographic).
    double focal() const { return focal_; }
    double cx() const { return cx_; }
    double cy() const { return cy_; }
    const Pose& pose() const { return pose_; }

    /// Camera-frame direction through the pixel center, scaled so its z is 1
    /// (perspective). For orthographic cameras returns the camera-frame origin
    /// offset of the pixel with z = 0.
    Vec3 pixel_offset(std::size_t u, std::size_t v) const;
    /// World-space ray whose parameter t equals optical-axis depth.
    void pixel_ray(std::size_t u, std::size_t v, Vec3& origin, Vec3& direction) const;
    Vec3 unproject(std::size_t u, std::size_t v, double depth) const;

private:
    Camera(Projection p, std::size_t w, std::size_t h, double f, double cx, double cy, const Pose& pose);

    Projection projection_ = Projection::Perspective;
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    double focal_ = 1.0;
    double cx_ = 0.0;
    double cy_ = 0.0;
    Pose pose_;
};

/// Camera-to-world pose at `eye` looking at `target`, image up roughly along `up`.
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

/// Camera on a sphere of radius `distance` around `target`, at the given
/// elevation (from the xy plane toward +z) and azimuth (from +x toward +y), degrees.
Pose orbit_pose(double elevation_deg, double azimuth_deg, double distance, const Vec3& target = Vec3::Zero());

/// One world-space point per masked-in pixel, in row-major pixel order.
PointCloud unproject_depth(const DepthMap& depth, const Camera& cam);

/// Nearest-hit z-depth per pixel; pixels whose ray misses are masked out.
DepthMap render_depth(const TriangleMesh& mesh, const Camera& cam);

}  // namespace sphrecon
