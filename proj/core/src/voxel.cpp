#include "sphrecon/voxel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "sphrecon/error.hpp"
#include "sphrecon/parallel.hpp"

namespace sphrecon {

using detail::require;

namespace {

std::optional<std::array<std::size_t, 3>> cell_of(const Vec3& p, const Vec3& lo, double h, std::size_t res) {
    std::array<std::size_t, 3> idx{};
    for (int k = 0; k < 3; ++k) {
        const double c = std::floor((p[k] - lo[k]) / h);
        if (!(c >= 0.0 && c < static_cast<double>(res))) return std::nullopt;
        idx[k] = static_cast<std::size_t>(c);
    }
    return idx;
}

std::size_t flat(const std::array<std::size_t, 3>& c, std::size_t res) { return (c[2] * res + c[1]) * res + c[0]; }

Vec3 center_of(const std::array<std::size_t, 3>& c, const Vec3& lo, double h) {
    return lo + h * Vec3(double(c[0]) + 0.5, double(c[1]) + 0.5, double(c[2]) + 0.5);
}

}  // namespace

OccupancyField pointcloud_occupancy(const PointCloud& pc, std::size_t resolution, const Extent& extent) {
    require(resolution >= 2, "pointcloud_to_voxels: resolution must be at least 2");
    require(extent.side > 0.0, "pointcloud_to_voxels: extent side must be positive");
    const double h = extent.side / static_cast<double>(resolution);
    const Vec3 lo = extent.min_corner();

    constexpr auto kOutside = std::numeric_limits<std::size_t>::max();
    std::vector<std::pair<std::size_t, double>> binned(pc.size());
    parallel_for(0, pc.size(), [&](std::size_t i) {
        const auto c = cell_of(pc[i], lo, h, resolution);
        if (!c) {
            binned[i] = {kOutside, 0.0};
            return;
        }
        binned[i] = {flat(*c, resolution), (pc[i] - center_of(*c, lo, h)).norm() / h};
    });
    std::sort(binned.begin(), binned.end());

    OccupancyField out;
    out.resolution = resolution;
    out.extent = extent;
    out.values.assign(resolution * resolution * resolution, 0.0);
    std::size_t i = 0;
    while (i < binned.size() && binned[i].first != kOutside) {
        const auto cell = binned[i].first;
        double sum = 0.0;
        std::size_t count = 0;
        for (; i < binned.size() && binned[i].first == cell; ++i, ++count) sum += binned[i].second;
        out.values[cell] = 1.0 - sum / static_cast<double>(count);
    }
    out.discarded = binned.size() - i;
    return out;
}

VoxelizeResult pointcloud_to_voxels(const PointCloud& pc, std::size_t resolution, const Extent& extent) {
    auto field = pointcloud_occupancy(pc, resolution, extent);
    std::vector<float> values(field.values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::clamp(static_cast<float>(field.values[i]), 0.0f, 1.0f);
    return {VoxelGrid(resolution, extent, std::move(values)), field.discarded};
}

std::vector<double> voxelize_jvp(const PointCloud& pc, std::size_t resolution, const Extent& extent,
                                 std::span<const Vec3> perturbations) {
    require(resolution >= 2, "voxelize_jvp: resolution must be at least 2");
    require(perturbations.size() == pc.size(), "voxelize_jvp: one perturbation per point required");
    for (const auto& d : perturbations) require(d.allFinite(), "voxelize_jvp: non-finite perturbation");
    const double h = extent.side / static_cast<double>(resolution);
    const Vec3 lo = extent.min_corner();

    const std::size_t cells = resolution * resolution * resolution;
    std::vector<double> delta(cells, 0.0);
    std::vector<std::size_t> count(cells, 0);
    std::vector<std::size_t> cell_index(pc.size(), cells);
    for (std::size_t i = 0; i < pc.size(); ++i) {
        const auto c = cell_of(pc[i], lo, h, resolution);
        if (!c) continue;
        cell_index[i] = flat(*c, resolution);
        ++count[cell_index[i]];
        const Vec3 r = pc[i] - center_of(*c, lo, h);
        const double dist = r.norm();
        if (dist == 0.0) continue;
        delta[cell_index[i]] -= r.dot(perturbations[i]) / (dist * h);
    }
    for (std::size_t c = 0; c < cells; ++c)
        if (count[c] > 0) delta[c] /= static_cast<double>(count[c]);
    return delta;
}

VoxelGrid fuse_voxels(const VoxelGrid& surface, const VoxelGrid& coarse, FusionMode mode) {
    require(surface.resolution() == coarse.resolution(), "fuse_voxels: resolutions differ");
    require(surface.extent() == coarse.extent(), "fuse_voxels: extents differ");
    const auto& a = surface.values();
    const auto& b = coarse.values();
    std::vector<float> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = mode == FusionMode::Max
                     ? std::max(a[i], b[i])
                     : static_cast<float>(0.5 * (static_cast<double>(a[i]) + static_cast<double>(b[i])));
    }
    return {surface.resolution(), surface.extent(), std::move(out)};
}

VoxelGrid resample_pose(const VoxelGrid& grid, const Pose& pose) {
    const std::size_t res = grid.resolution();
    require(res >= 2, "resample_pose: resolution must be at least 2");
    const double h = grid.cell_size();
    const double m = 0.5 * static_cast<double>(res - 1);
    const Mat3 rt = pose.rotation().transpose();
    const Vec3& c = grid.extent().center;
    const Vec3 offset = (rt * (c - pose.translation()) - c) / h;
    const double top = static_cast<double>(res - 1);

    std::vector<float> out(res * res * res, 0.0f);
    parallel_for(0, res, [&](std::size_t z) {
        for (std::size_t y = 0; y < res; ++y)
            for (std::size_t x = 0; x < res; ++x) {
                const Vec3 u(double(x) - m, double(y) - m, double(z) - m);
                Vec3 s = rt * u + offset + Vec3::Constant(m);
                std::array<std::size_t, 3> i0{};
                std::array<double, 3> f{};
                bool inside = true;
                for (int k = 0; k < 3 && inside; ++k) {
                    const double r = std::round(s[k]);
                    if (std::abs(s[k] - r) < 1e-9) s[k] = r;
                    if (!(s[k] >= 0.0 && s[k] <= top)) {
                        inside = false;
                        break;
                    }
                    double base = std::floor(s[k]);
                    if (base >= top) base = top - 1.0;
                    i0[k] = static_cast<std::size_t>(base);
                    f[k] = s[k] - base;
                }
                if (!inside) continue;
                double acc = 0.0;
                for (int corner = 0; corner < 8; ++corner) {
                    double w = 1.0;
                    std::array<std::size_t, 3> idx{};
                    for (int k = 0; k < 3; ++k) {
                        const bool up = (corner >> k) & 1;
                        w *= up ? f[k] : 1.0 - f[k];
                        idx[k] = i0[k] + (up ? 1 : 0);
                    }
                    if (w == 0.0) continue;
                    acc += w * static_cast<double>(grid.at(idx[0], idx[1], idx[2]));
                }
                out[grid.index(x, y, z)] = std::clamp(static_cast<float>(acc), 0.0f, 1.0f);
            }
    });
    return {res, grid.extent(), std::move(out)};
}

}  // namespace sphrecon
