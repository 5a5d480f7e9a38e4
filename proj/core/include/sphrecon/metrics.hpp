#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sphrecon/types.hpp"

namespace sphrecon {

/// Uniform-grid nearest-neighbour index. The cell size is the median
/// nearest-neighbour spacing of a fixed subsample of the indexed points.
/// Queries are exact: they return the same distance as a linear scan.
class NearestNeighborIndex {
public:
    explicit NearestNeighborIndex(const PointCloud& points);

    double nearest_distance(const Vec3& q) const;
    double cell_size() const { return cell_; }

private:
    std::array<std::int64_t, 3> cell_coords(const Vec3& q) const;
    std::size_t flat(std::int64_t x, std::int64_t y, std::int64_t z) const {
        return static_cast<std::size_t>((z * dims_[1] + y) * dims_[0] + x);
    }

    std::vector<Vec3> points_;  // sorted by cell
    std::vector<std::size_t> cell_start_;
    Vec3 lo_ = Vec3::Zero();
    double cell_ = 1.0;
    std::array<std::int64_t, 3> dims_{1, 1, 1};
};

/// Chamfer distance: mean nearest-neighbour distance from a to b plus the
/// mean from b to a (unsquared, no factor 1/2). Uses NearestNeighborIndex.
double chamfer(const PointCloud& a, const PointCloud& b);
/// Same quantity by exhaustive O(|a||b|) search.
double chamfer_bruteforce(const PointCloud& a, const PointCloud& b);

inline constexpr std::size_t kSweepSteps = 9;
inline constexpr std::size_t kDefaultSweepSamples = 1024;

/// Isosurface thresholds 0.30, 0.35, ..., 0.70.
std::array<double, kSweepSteps> sweep_thresholds();

struct SweepResult {
    std::array<double, kSweepSteps> thresholds{};
    std::array<double, kSweepSteps> cd{};  ///< +inf where the isosurface is empty
    double best_cd = 0.0;
    double best_threshold = 0.0;
    std::size_t samples = kDefaultSweepSamples;
    std::uint64_t seed = 0;
};

/// For each threshold: marching cubes, n area-weighted samples of the
/// isosurface, Chamfer distance against n samples of the ground truth mesh.
/// Ground truth uses `seed` directly; predictions use a derived stream.
SweepResult eval_sweep(const VoxelGrid& pred, const TriangleMesh& gt, std::size_t n = kDefaultSweepSamples,
                       std::uint64_t seed = 0);

/// Mean over the test shapes of the smallest Chamfer distance to any training shape.
double class_dissimilarity(std::span<const PointCloud> test_class, std::span<const PointCloud> train_classes);

struct ObjectEval {
    std::string id;
    std::string label;  ///< class
    SweepResult sweep;
};

struct ClassSummary {
    std::string label;
    std::size_t objects = 0;
    std::array<double, kSweepSteps> mean_cd{};
    double best_cd = 0.0;
    double best_threshold = 0.0;
};

inline constexpr int kReportSchemaVersion = 1;

struct EvalReport {
    int schema_version = kReportSchemaVersion;
    std::string model;
    std::size_t samples = kDefaultSweepSamples;
    std::uint64_t seed = 0;
    std::vector<ObjectEval> objects;   ///< sorted by (label, id)
    std::vector<ClassSummary> classes; ///< sorted by label
};

/// Aggregates per-object sweeps: a class's best CD is the minimum over
/// thresholds of the mean per-object CD.
EvalReport build_report(std::string model, std::vector<ObjectEval> objects, std::size_t samples,
                        std::uint64_t seed);

std::string report_to_json(const EvalReport& report);
/// Models as rows, classes as columns, plus an "avg" column.
std::string reports_to_csv(std::span<const EvalReport> reports);

}  // namespace sphrecon
