#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "sphrecon/error.hpp"
#include "sphrecon/parallel.hpp"
#include "sphrecon/voxel.hpp"
#include "support.hpp"

using namespace sphrecon;
namespace ts = testing_support;

namespace {

const double kBand = 1.0 - std::sqrt(3.0) / 2.0;

// Straightforward binning: (cell -> list of distances in voxel units).
std::map<std::size_t, std::vector<double>> bin_points(const PointCloud& pc, std::size_t res, const Extent& e) {
    const double h = e.side / double(res);
    std::map<std::size_t, std::vector<double>> bins;
    for (const auto& p : pc.points()) {
        const Vec3 q = (p - e.min_corner()) / h;
        const long x = long(std::floor(q.x())), y = long(std::floor(q.y())), z = long(std::floor(q.z()));
        const long n = long(res);
        if (x < 0 || y < 0 || z < 0 || x >= n || y >= n || z >= n) continue;
        const Vec3 c = e.min_corner() + h * Vec3(x + 0.5, y + 0.5, z + 0.5);
        bins[std::size_t((z * n + y) * n + x)].push_back((p - c).norm() / h);
    }
    return bins;
}

VoxelGrid random_grid(std::mt19937_64& rng, std::size_t res, Extent e = {}) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<float> v(res * res * res);
    for (auto& x : v) x = u(rng) < 0.5f ? 0.0f : u(rng);
    return {res, e, std::move(v)};
}

// Gaussian bump well inside the lattice.
VoxelGrid smooth_grid(std::size_t res, double sigma) {
    std::vector<float> v(res * res * res);
    const double m = 0.5 * (res - 1);
    for (std::size_t z = 0; z < res; ++z)
        for (std::size_t y = 0; y < res; ++y)
            for (std::size_t x = 0; x < res; ++x) {
                const Vec3 d(x - m - 1.3, y - m + 0.7, z - m);
                v[(z * res + y) * res + x] = float(std::exp(-d.squaredNorm() / (sigma * sigma)));
            }
    return {res, {}, std::move(v)};
}

}  // namespace

TEST(Voxelize, PointAtCenter) {
    const Extent e{Vec3::Zero(), 1.0};
    const auto g = VoxelGrid::zeros(4, e);
    const auto r = pointcloud_to_voxels(PointCloud({g.cell_center(1, 2, 3)}), 4, e);
    EXPECT_EQ(r.discarded, 0u);
    for (std::size_t z = 0; z < 4; ++z)
        for (std::size_t y = 0; y < 4; ++y)
            for (std::size_t x = 0; x < 4; ++x) EXPECT_EQ(r.grid.at(x, y, z), (x == 1 && y == 2 && z == 3) ? 1.0f : 0.0f);
}

TEST(Voxelize, PointAtCorner) {
    const Extent e{Vec3::Zero(), 2.0};
    // Lattice corner shared by 8 voxels; it belongs to the voxel it is the minimum corner of.
    const Vec3 corner = e.min_corner() + Vec3(1.0, 0.5, 1.5);
    const auto f = pointcloud_occupancy(PointCloud({corner}), 4, e);
    EXPECT_NEAR(f.values[(3 * 4 + 1) * 4 + 2], kBand, 1e-12);
    EXPECT_EQ(std::count_if(f.values.begin(), f.values.end(), [](double v) { return v != 0.0; }), 1);
}

TEST(Voxelize, SymmetricPair) {
    const Extent e;
    const auto g = VoxelGrid::zeros(8, e);
    const Vec3 c = g.cell_center(3, 4, 5);
    const Vec3 d = Vec3(1, 2, -2).normalized() * 0.25 * g.cell_size();
    const auto f = pointcloud_occupancy(PointCloud({c + d, c - d}), 8, e);
    EXPECT_NEAR(f.values[g.index(3, 4, 5)], 0.75, 1e-12);
}

TEST(Voxelize, MatchesIndependentBinningAndBand) {
    std::mt19937_64 rng(31);
    const Extent e{Vec3(0.1, -0.2, 0.05), 1.3};
    for (int trial = 0; trial < 5; ++trial) {
        const auto pc = ts::random_cloud(rng, 3000, -0.9, 0.9);
        const auto f = pointcloud_occupancy(pc, 16, e);
        const auto bins = bin_points(pc, 16, e);
        std::size_t kept = 0;
        for (const auto& [cell, d] : bins) kept += d.size();
        EXPECT_EQ(f.discarded, pc.size() - kept);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            auto it = bins.find(i);
            if (it == bins.end()) {
                EXPECT_EQ(f.values[i], 0.0);
                continue;
            }
            double s = 0.0;
            for (double x : it->second) s += x;
            EXPECT_NEAR(f.values[i], 1.0 - s / double(it->second.size()), 1e-12);
            EXPECT_GE(f.values[i], kBand - 1e-12);
            EXPECT_LE(f.values[i], 1.0);
        }
        const auto r = pointcloud_to_voxels(pc, 16, e);
        EXPECT_EQ(r.discarded, f.discarded);
        for (std::size_t i = 0; i < f.values.size(); ++i) EXPECT_EQ(r.grid.values()[i], static_cast<float>(f.values[i]));
    }
}

TEST(Voxelize, PermutationAndThreadInvariance) {
    std::mt19937_64 rng(4);
    auto pts = ts::random_cloud(rng, 5000).points();
    const auto a = pointcloud_to_voxels(PointCloud(pts), 8);
    std::shuffle(pts.begin(), pts.end(), rng);
    set_thread_count(4);
    const auto b = pointcloud_to_voxels(PointCloud(pts), 8);
    set_thread_count(1);
    EXPECT_EQ(a.grid, b.grid);
}

TEST(Voxelize, Preconditions) {
    EXPECT_THROW(pointcloud_to_voxels(PointCloud(), 1), ContractError);
    EXPECT_EQ(pointcloud_to_voxels(PointCloud(), 4).grid, VoxelGrid::zeros(4));
}

TEST(VoxelizeJvp, ZeroPerturbation) {
    std::mt19937_64 rng(9);
    const auto pc = ts::random_cloud(rng, 200);
    const std::vector<Vec3> zero(pc.size(), Vec3::Zero());
    for (double d : voxelize_jvp(pc, 8, {}, zero)) EXPECT_EQ(d, 0.0);
}

TEST(VoxelizeJvp, RadialMotionLowersValueByEpsilon) {
    const Extent e;
    const auto g = VoxelGrid::zeros(8, e);
    const Vec3 dir = Vec3(0.3, -0.5, 0.2).normalized();
    const Vec3 p = g.cell_center(2, 5, 6) + 0.2 * g.cell_size() * dir;
    const double eps = 0.01;  // voxel units
    const std::vector<Vec3> pert{eps * g.cell_size() * dir};
    const auto d = voxelize_jvp(PointCloud({p}), 8, e, pert);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], i == g.index(2, 5, 6) ? -eps : 0.0, 1e-12);
}

TEST(VoxelizeJvp, MatchesCentralDifferences) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(0.0, 1.0);
    const Extent e{Vec3::Zero(), 1.0};
    const std::size_t res = 6;
    const double h = e.side / res, step = 1e-4;
    for (int trial = 0; trial < 10; ++trial) {
        // Keep points at least 1e-3 voxel units from any cell face and off the centers.
        std::vector<Vec3> pts;
        while (pts.size() < 60) {
            const Vec3 p = ts::random_cloud(rng, 1, -0.5, 0.5)[0];
            const Vec3 q = (p - e.min_corner()) / h;
            bool ok = true;
            for (int k = 0; k < 3; ++k) ok = ok && std::abs(q[k] - std::round(q[k])) > 1e-3;
            const Vec3 frac = q - q.array().floor().matrix() - Vec3::Constant(0.5);
            if (ok && frac.norm() > 1e-2) pts.push_back(p);
        }
        std::vector<Vec3> u(pts.size());
        for (auto& x : u) x = Vec3(n(rng), n(rng), n(rng)).normalized();
        auto moved = [&](double s) {
            std::vector<Vec3> q = pts;
            for (std::size_t i = 0; i < q.size(); ++i) q[i] += s * u[i];
            return pointcloud_occupancy(PointCloud(q), res, e).values;
        };
        const auto plus = moved(step), minus = moved(-step);
        const auto jvp = voxelize_jvp(PointCloud(pts), res, e, u);
        for (std::size_t c = 0; c < jvp.size(); ++c) {
            const double fd = (plus[c] - minus[c]) / (2.0 * step);
            EXPECT_LE(std::abs(jvp[c] - fd), 1e-3 * std::max(std::abs(fd), 1e-3)) << "cell " << c;
        }
    }
}

TEST(VoxelizeJvp, Linear) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto pc = ts::random_cloud(rng, 500);
    std::vector<Vec3> u(pc.size()), w(pc.size()), mix(pc.size());
    const double alpha = 0.7, beta = -2.3;
    for (std::size_t i = 0; i < pc.size(); ++i) {
        u[i] = Vec3(n(rng), n(rng), n(rng));
        w[i] = Vec3(n(rng), n(rng), n(rng));
        mix[i] = alpha * u[i] + beta * w[i];
    }
    const auto ju = voxelize_jvp(pc, 8, {}, u), jw = voxelize_jvp(pc, 8, {}, w), jm = voxelize_jvp(pc, 8, {}, mix);
    for (std::size_t c = 0; c < jm.size(); ++c) EXPECT_NEAR(jm[c], alpha * ju[c] + beta * jw[c], 1e-12);
}

TEST(VoxelizeJvp, Preconditions) {
    const PointCloud pc({Vec3(0.1, 0.1, 0.1)});
    EXPECT_THROW(voxelize_jvp(pc, 4, {}, std::vector<Vec3>{}), ContractError);
    EXPECT_THROW(voxelize_jvp(pc, 4, {}, std::vector<Vec3>{Vec3(NAN, 0, 0)}), ContractError);
}

TEST(Fuse, Examples) {
    const VoxelGrid a(2, {}, std::vector<float>(8, 0.2f)), b(2, {}, std::vector<float>(8, 0.7f));
    const auto mx = fuse_voxels(a, b), avg = fuse_voxels(a, b, FusionMode::Average);
    for (float v : mx.values()) EXPECT_EQ(v, 0.7f);
    for (float v : avg.values()) EXPECT_FLOAT_EQ(v, 0.45f);
    std::mt19937_64 rng(0);
    const auto x = random_grid(rng, 6);
    EXPECT_EQ(fuse_voxels(x, x, FusionMode::Max), x);
    EXPECT_EQ(fuse_voxels(x, x, FusionMode::Average), x);
    EXPECT_EQ(fuse_voxels(x, VoxelGrid::zeros(6)), x);
}

TEST(Fuse, MaxIsCommutativeAndAssociative) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 5; ++t) {
        const auto a = random_grid(rng, 5), b = random_grid(rng, 5), c = random_grid(rng, 5);
        EXPECT_EQ(fuse_voxels(a, b), fuse_voxels(b, a));
        EXPECT_EQ(fuse_voxels(fuse_voxels(a, b), c), fuse_voxels(a, fuse_voxels(b, c)));
        const auto avg = fuse_voxels(a, b, FusionMode::Average);
        for (float v : avg.values()) {
            EXPECT_GE(v, 0.0f);
            EXPECT_LE(v, 1.0f);
        }
    }
}

TEST(Fuse, MismatchIsContractError) {
    EXPECT_THROW(fuse_voxels(VoxelGrid::zeros(4), VoxelGrid::zeros(5)), ContractError);
    EXPECT_THROW(fuse_voxels(VoxelGrid::zeros(4), VoxelGrid::zeros(4, {Vec3::Zero(), 2.0})), ContractError);
    EXPECT_THROW(fuse_voxels(VoxelGrid::zeros(4), VoxelGrid::zeros(4, {Vec3(0.1, 0, 0), 1.0})), ContractError);
}

TEST(Fuse, RefinerInterface) {
    std::mt19937_64 rng(3);
    const auto a = random_grid(rng, 4), b = random_grid(rng, 4);
    const FusionRefiner avg(FusionMode::Average);
    const VoxelRefiner& r = avg;
    EXPECT_EQ(r.refine(a, b), fuse_voxels(a, b, FusionMode::Average));
}

TEST(Resample, IdentityIsBitExact) {
    std::mt19937_64 rng(5);
    const auto g = random_grid(rng, 9, {Vec3(0.2, 0.1, -0.3), 1.7});
    EXPECT_EQ(resample_pose(g, Pose::identity()), g);
}

TEST(Resample, QuarterTurnPermutesCells) {
    std::mt19937_64 rng(6);
    const std::size_t n = 7;
    const auto g = random_grid(rng, n);
    const Pose rz(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()).toRotationMatrix(), Vec3::Zero());
    const auto out = resample_pose(g, rz);
    // out(u) = in(R^T u): centred lattice coords (i, j) read from (j, -i).
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) EXPECT_EQ(out.at(x, y, z), g.at(y, n - 1 - x, z));
}

TEST(Resample, LatticeTranslationShiftsCells) {
    std::mt19937_64 rng(7);
    const std::size_t n = 6;
    const auto g = random_grid(rng, n);
    const auto out = resample_pose(g, Pose(Mat3::Identity(), Vec3(2 * g.cell_size(), 0, 0)));
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) EXPECT_EQ(out.at(x, y, z), x >= 2 ? g.at(x - 2, y, z) : 0.0f);
}

TEST(Resample, RoundTripWithinSmoothingBound) {
    const std::size_t n = 24;
    const auto g = smooth_grid(n, 3.5);
    // Largest local second difference (sum over the three axes).
    double d2 = 0.0;
    for (std::size_t z = 1; z + 1 < n; ++z)
        for (std::size_t y = 1; y + 1 < n; ++y)
            for (std::size_t x = 1; x + 1 < n; ++x) {
                const double c = 2.0 * g.at(x, y, z);
                d2 = std::max(d2, std::abs(g.at(x + 1, y, z) + g.at(x - 1, y, z) - c) +
                                      std::abs(g.at(x, y + 1, z) + g.at(x, y - 1, z) - c) +
                                      std::abs(g.at(x, y, z + 1) + g.at(x, y, z - 1) - c));
            }
    const Mat3 r = Eigen::AngleAxisd(0.6, Vec3(1, 2, 0.5).normalized()).toRotationMatrix();
    const Pose p(r, Vec3(0.01, -0.02, 0.015));
    const auto back = resample_pose(resample_pose(g, p), p.inverse());
    double worst = 0.0;
    for (std::size_t i = 0; i < g.values().size(); ++i)
        worst = std::max(worst, std::abs(double(back.values()[i]) - double(g.values()[i])));
    EXPECT_GT(worst, 0.0);
    EXPECT_LE(worst, 0.5 * d2);
}
