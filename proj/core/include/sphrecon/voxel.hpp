#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sphrecon/types.hpp"

namespace sphrecon {

/// Occupancy values before rounding to the grid's float storage.
struct OccupancyField {
    std::size_t resolution = 0;
    Extent extent;
    std::vector<double> values;  ///< same layout as VoxelGrid
    std::size_t discarded = 0;   ///< points outside the extent
};

struct VoxelizeResult {
    VoxelGrid grid;
    std::size_t discarded = 0;
};

/// Every voxel holding at least one point gets 1 - mean(|p - center| / cell
/// size) over its points; empty voxels stay 0. The per-voxel sum runs over
/// sorted distances, so the result does not depend on point order.
OccupancyField pointcloud_occupancy(const PointCloud& pc, std::size_t resolution, const Extent& extent = {});
VoxelizeResult pointcloud_to_voxels(const PointCloud& pc, std::size_t resolution, const Extent& extent = {});

/// Directional derivative of every voxel value of pointcloud_occupancy when
/// point i moves along perturbations[i]. Voxel membership is held fixed; a
/// point sitting exactly on its voxel center contributes zero.
std::vector<double> voxelize_jvp(const PointCloud& pc, std::size_t resolution, const Extent& extent,
                                 std::span<const Vec3> perturbations);

enum class FusionMode { Max, Average };

VoxelGrid fuse_voxels(const VoxelGrid& surface, const VoxelGrid& coarse, FusionMode mode = FusionMode::Max);

/// Combines the surface-projected grid with the coarse-shape grid into the
/// final prediction.
class VoxelRefiner {
public:
    virtual ~VoxelRefiner() = default;
    virtual VoxelGrid refine(const VoxelGrid& surface, const VoxelGrid& coarse) const = 0;
};

class FusionRefiner final : public VoxelRefiner {
public:
    explicit FusionRefiner(FusionMode mode = FusionMode::Max) : mode_(mode) {}
    VoxelGrid refine(const VoxelGrid& surface, const VoxelGrid& coarse) const override {
        return fuse_voxels(surface, coarse, mode_);
    }

private:
    FusionMode mode_;
};

/// Moves the grid content by `pose` (out(x) = in(pose^-1 x)) with trilinear
/// interpolation on the same lattice. Samples falling outside the source
/// lattice read as 0.
VoxelGrid resample_pose(const VoxelGrid& grid, const Pose& pose);

}  // namespace sphrecon
