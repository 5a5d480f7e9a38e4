#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <Eigen/QR>

#include "sphrecon/error.hpp"
#include "sphrecon/primitives.hpp"
#include "sphrecon/surface.hpp"
#include "support.hpp"

using namespace sphrecon;
namespace ts = testing_support;


TEST(MarchingCubes, RadialFieldLevelSetAtRadiusPointFour) {
    const auto g = ts::sample_field(32, [](const Vec3& p) { return std::max(0.0, 1.0 - p.norm()); });
    const auto mesh = marching_cubes(g, 0.6);
    ASSERT_FALSE(mesh.empty());
    const double diag = std::sqrt(3.0) * g.cell_size();
    for (const auto& v : mesh.vertices()) EXPECT_LT(std::abs(v.norm() - 0.4), diag);
    EXPECT_TRUE(ts::is_closed(mesh));
    EXPECT_EQ(ts::euler_characteristic(mesh), 2);
    // Outward orientation: positive enclosed volume close to the ball's.
    EXPECT_NEAR(ts::signed_volume(mesh), 4.0 / 3.0 * std::numbers::pi * 0.064, 0.01);
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
        const Vec3 a = mesh.corner(t, 0), b = mesh.corner(t, 1), c = mesh.corner(t, 2);
        EXPECT_GT((b - a).cross(c - a).dot(a + b + c), 0.0);
    }
}

TEST(MarchingCubes, ConstantGridHasNoSurface) {
    EXPECT_TRUE(marching_cubes(VoxelGrid::zeros(8), 0.5).empty());
    EXPECT_TRUE(marching_cubes(VoxelGrid(4, {}, std::vector<float>(64, 1.0f)), 0.5).empty());
}

TEST(MarchingCubes, SingleInsideSampleGivesClosedSphereTopology) {
    std::vector<float> v(5 * 5 * 5, 0.0f);
    v[(2 * 5 + 2) * 5 + 2] = 1.0f;
    const auto mesh = marching_cubes(VoxelGrid(5, {}, v), 0.5);
    EXPECT_EQ(mesh.triangles().size(), 8u);
    EXPECT_TRUE(ts::is_closed(mesh));
    EXPECT_EQ(ts::euler_characteristic(mesh), 2);
    EXPECT_GT(ts::signed_volume(mesh), 0.0);
}

TEST(MarchingCubes, RejectsBadIsoAndTinyGrids) {
    const auto g = VoxelGrid::zeros(4);
    EXPECT_THROW(marching_cubes(g, 0.0), ContractError);
    EXPECT_THROW(marching_cubes(g, 1.0), ContractError);
    EXPECT_THROW(marching_cubes(g, -0.2), ContractError);
    EXPECT_THROW(marching_cubes(VoxelGrid::zeros(1), 0.5), ContractError);
}

TEST(MarchingCubes, BlobbyFieldsGiveClosedMeshesOnTheLevelSet) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const auto g = ts::blobby_field(rng, 24);
        const double iso = 0.3 + 0.05 * (trial % 8);
        const auto mesh = marching_cubes(g, iso);
        ASSERT_FALSE(mesh.empty());
        EXPECT_TRUE(ts::is_closed(mesh)) << "trial " << trial;
        double worst = 0.0;
        for (const auto& v : mesh.vertices()) worst = std::max(worst, std::abs(ts::trilinear(g, v) - iso));
        EXPECT_LT(worst, 1e-5) << "trial " << trial;
    }
}

TEST(MarchingCubes, RandomBinaryFieldsStayClosed) {
    // Dense ambiguous faces: every face configuration occurs.
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t res = 10;
        std::vector<float> v(res * res * res, 0.0f);
        for (std::size_t z = 1; z + 1 < res; ++z)
            for (std::size_t y = 1; y + 1 < res; ++y)
                for (std::size_t x = 1; x + 1 < res; ++x) v[(z * res + y) * res + x] = (rng() & 1) ? 0.9f : 0.1f;
        const auto mesh = marching_cubes(VoxelGrid(res, {}, v), 0.5);
        EXPECT_TRUE(ts::is_closed(mesh)) << "trial " << trial;
        EXPECT_GT(ts::signed_volume(mesh), 0.0);
    }
}

TEST(MarchingCubes, ExactIsoCornersDoNotCollapseEdges) {
    std::vector<float> v(4 * 4 * 4, 0.0f);
    v[(1 * 4 + 1) * 4 + 1] = 0.5f;
    v[(2 * 4 + 2) * 4 + 2] = 1.0f;
    v[(1 * 4 + 2) * 4 + 2] = 0.5f;
    const auto mesh = marching_cubes(VoxelGrid(4, {}, v), 0.5);
    EXPECT_TRUE(ts::is_closed(mesh));
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t) EXPECT_GT(mesh.triangle_area(t), 0.0);
}

TEST(MarchingCubes, DeterministicOutput) {
    std::mt19937_64 rng(1);
    const auto g = ts::blobby_field(rng, 20);
    EXPECT_EQ(marching_cubes(g, 0.45), marching_cubes(g, 0.45));
}

TEST(Normalize, AlreadyNormalizedMeshGetsIdentity) {
    const auto sphere = generate_primitive(PrimitiveKind::Sphere, {}, 32);
    const auto n = normalize_shape(sphere);
    EXPECT_NEAR(n.transform.scale, 1.0, 1e-6);
    EXPECT_LT(n.transform.translation.norm(), 1e-6);
}

TEST(Normalize, SimilarityInvariance) {
    const auto cone = generate_primitive(PrimitiveKind::Cone, {}, 24);
    const auto moved = transform(cone, Similarity{3.0, Vec3(1, 2, 3)});
    const auto a = normalize_shape(cone).mesh;
    const auto b = normalize_shape(moved);
    ASSERT_EQ(a.vertices().size(), b.mesh.vertices().size());
    for (std::size_t i = 0; i < a.vertices().size(); ++i) EXPECT_LT((a.vertices()[i] - b.mesh.vertices()[i]).norm(), 1e-12);
    // The returned transform maps the input onto the output.
    for (std::size_t i = 0; i < moved.vertices().size(); ++i)
        EXPECT_LT((b.transform.apply(moved.vertices()[i]) - b.mesh.vertices()[i]).norm(), 1e-12);
}

TEST(Normalize, CubeWithCornersAtOne) {
    PrimitiveParams p;
    p.size = Vec3::Constant(2.0);
    const auto n = normalize_shape(generate_primitive(PrimitiveKind::Cube, p));
    EXPECT_NEAR(n.transform.scale, 0.5 / std::sqrt(3.0), 1e-15);
    double r = 0.0;
    for (const auto& v : n.mesh.vertices()) r = std::max(r, v.norm());
    EXPECT_NEAR(r, 0.5, 1e-15);
}

TEST(Normalize, Errors) {
    const TriangleMesh point({Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)}, {Triangle{0, 1, 2}});
    EXPECT_THROW(normalize_shape(point), DegenerateInputError);
    EXPECT_THROW(normalize_shape(TriangleMesh{}), ContractError);
}

TEST(Sampling, ExactCountAndReproducible) {
    const auto torus = generate_primitive(PrimitiveKind::Torus, {}, 16);
    const auto a = sample_surface(torus, 1024, 7);
    EXPECT_EQ(a.size(), 1024u);
    EXPECT_EQ(sample_surface(torus, 1024, 7), a);
    EXPECT_NE(sample_surface(torus, 1024, 8), a);
    // A prefix of a larger draw is the smaller draw.
    const auto b = sample_surface(torus, 2000, 7);
    for (std::size_t i = 0; i < 1024; ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Sampling, SingleTriangleBarycentricCoordinates) {
    const Vec3 A(0.1, 0.2, 0.3), B(1.0, -0.5, 0.2), C(-0.3, 0.8, 1.1);
    const TriangleMesh tri({A, B, C}, {Triangle{0, 1, 2}});
    const auto pts = sample_surface(tri, 2000, 3);
    Eigen::Matrix<double, 3, 2> m;
    m.col(0) = B - A;
    m.col(1) = C - A;
    Vec3 mean = Vec3::Zero();
    for (const auto& p : pts.points()) {
        const Eigen::Vector2d st = m.colPivHouseholderQr().solve(p - A);
        const double l1 = st[0], l2 = st[1], l0 = 1.0 - l1 - l2;
        EXPECT_GE(l0, -1e-12);
        EXPECT_GE(l1, -1e-12);
        EXPECT_GE(l2, -1e-12);
        EXPECT_LT((A + m * st - p).norm(), 1e-12);  // in the triangle's plane
        mean += p;
    }
    mean /= 2000.0;
    // Uniform density: sample mean near the centroid (generous 5 sigma).
    EXPECT_LT((mean - (A + B + C) / 3.0).norm(), 0.05);
}

TEST(Sampling, AreaWeightingWithinBinomialInterval) {
    // Areas 4.5 and 0.5.
    const TriangleMesh m({Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 3, 0), Vec3(10, 0, 0), Vec3(11, 0, 0), Vec3(10, 1, 0)},
                         {Triangle{0, 1, 2}, Triangle{3, 4, 5}});
    const auto pts = sample_surface(m, 10000, 12345);
    std::size_t big = 0;
    for (const auto& p : pts.points()) big += p.x() < 5.0;
    // 99.9% two-sided interval of Binomial(10000, 0.9): 9000 +- 3.2905 * 30.
    EXPECT_NEAR(static_cast<double>(big), 9000.0, 3.2905 * 30.0);
}

TEST(Sampling, ZeroAreaIsDegenerate) {
    const TriangleMesh line({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}, {Triangle{0, 1, 2}});
    EXPECT_THROW(sample_surface(line, 10, 0), DegenerateInputError);
}
