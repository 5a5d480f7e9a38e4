#include "sphrecon/camera.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "sphrecon/error.hpp"
#include "sphrecon/parallel.hpp"
#include "sphrecon/raycast.hpp"

namespace sphrecon {

using detail::require;

Camera::Camera(Projection p, std::size_t w, std::size_t h, double f, double cx, double cy, const Pose& pose)
    : projection_(p), width_(w), height_(h), focal_(f), cx_(cx), cy_(cy), pose_(pose) {
    require(w > 0 && h > 0, "Camera: image size must be positive");
    require(std::isfinite(f) && f > 0.0, "Camera: focal length must be positive");
    const auto W = static_cast<double>(w), H = static_cast<double>(h);
    require(cx >= -W && cx <= 2.0 * W && cy >= -H && cy <= 2.0 * H,
            "Camera: principal point too far outside the image");
}

Camera Camera::perspective(std::size_t width, std::size_t height, double focal_px, double cx, double cy,
                           const Pose& pose) {
    return {Projection::Perspective, width, height, focal_px, cx, cy, pose};
}

Camera Camera::perspective_fov(std::size_t width, std::size_t height, double vfov_deg, const Pose& pose) {
    require(vfov_deg > 0.0 && vfov_deg < 180.0, "Camera: field of view must be in (0, 180) degrees");
    const double f = 0.5 * static_cast<double>(height) / std::tan(0.5 * vfov_deg * std::numbers::pi / 180.0);
    return perspective(width, height, f, 0.5 * static_cast<double>(width), 0.5 * static_cast<double>(height), pose);
}

Camera Camera::orthographic(std::size_t width, std::size_t height, double pixel_size, double cx, double cy,
                            const Pose& pose) {
    return {Projection::Orthographic, width, height, pixel_size, cx, cy, pose};
}

Vec3 Camera::pixel_offset(std::size_t u, std::size_t v) const {
    const double px = static_cast<double>(u) + 0.5 - cx_;
    const double py = static_cast<double>(v) + 0.5 - cy_;
    if (projection_ == Projection::Perspective) return {px / focal_, py / focal_, 1.0};
    return {px * focal_, py * focal_, 0.0};
}

void Camera::pixel_ray(std::size_t u, std::size_t v, Vec3& origin, Vec3& direction) const {
    const Vec3 off = pixel_offset(u, v);
    if (projection_ == Projection::Perspective) {
        origin = pose_.translation();
        direction = pose_.rotation() * off;
    } else {
        origin = pose_.apply(off);
        direction = pose_.rotation().col(2);
    }
}

Vec3 Camera::unproject(std::size_t u, std::size_t v, double depth) const {
    const Vec3 off = pixel_offset(u, v);
    const Vec3 local = projection_ == Projection::Perspective ? Vec3(depth * off)
                                                               : Vec3(off.x(), off.y(), depth);
    return pose_.apply(local);
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
    const Vec3 z = (target - eye).normalized();
    Vec3 x = z.cross(up);
    require(x.norm() > 1e-12, "look_at: up vector is parallel to the viewing direction");
    x.normalize();
    const Vec3 y = z.cross(x);
    Mat3 r;
    r.col(0) = x;
    r.col(1) = y;
    r.col(2) = z;
    return {r, eye};
}

Pose orbit_pose(double elevation_deg, double azimuth_deg, double distance, const Vec3& target) {
    require(distance > 0.0, "orbit_pose: distance must be positive");
    const double el = elevation_deg * std::numbers::pi / 180.0;
    const double az = azimuth_deg * std::numbers::pi / 180.0;
    const Vec3 dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    // Near the poles fall back to +y as the up hint.
    const Vec3 up = std::abs(std::cos(el)) < 1e-6 ? Vec3::UnitY() : Vec3::UnitZ();
    return look_at(target + distance * dir, target, up);
}

PointCloud unproject_depth(const DepthMap& depth, const Camera& cam) {
    require(depth.width() == cam.width() && depth.height() == cam.height(),
            "unproject_depth: depth map and camera image sizes differ");
    std::vector<Vec3> pts;
    pts.reserve(depth.valid_count());
    for (std::size_t v = 0; v < depth.height(); ++v)
        for (std::size_t u = 0; u < depth.width(); ++u)
            if (depth.valid(u, v)) pts.push_back(cam.unproject(u, v, depth.depth(u, v)));
    return PointCloud(std::move(pts));
}

DepthMap render_depth(const TriangleMesh& mesh, const Camera& cam) {
    require(!mesh.empty(), "render_depth: mesh is empty");
    const TriangleBvh bvh(mesh);
    const std::size_t w = cam.width(), h = cam.height();
    std::vector<float> values(w * h, 0.0f);
    std::vector<std::uint8_t> mask(w * h, 0);
    parallel_for(0, h, [&](std::size_t v) {
        for (std::size_t u = 0; u < w; ++u) {
            Vec3 origin, dir;
            cam.pixel_ray(u, v, origin, dir);
            const auto hit = bvh.closest_hit(origin, dir, 0.0, std::numeric_limits<double>::infinity());
            if (!hit) continue;
            const auto d = static_cast<float>(hit->t);
            if (!(d > 0.0f)) continue;
            values[v * w + u] = d;
            mask[v * w + u] = 1;
        }
    });
    return {w, h, std::move(values), std::move(mask)};
}

}  // namespace sphrecon
