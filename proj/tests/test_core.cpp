#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "sphrecon/error.hpp"
#include "sphrecon/io.hpp"
#include "sphrecon/types.hpp"
#include "support.hpp"

using namespace sphrecon;
namespace ts = testing_support;

TEST(Types, DepthMapRejectsInvalidMaskedInValues) {
    EXPECT_THROW(DepthMap(2, 1, {1.0f, 0.0f}, {1, 1}), ContractError);
    EXPECT_THROW(DepthMap(2, 1, {1.0f, -2.0f}, {1, 1}), ContractError);
    EXPECT_THROW(DepthMap(2, 1, {1.0f, std::numeric_limits<float>::infinity()}, {1, 1}), ContractError);
    EXPECT_THROW(DepthMap(2, 1, {1.0f, std::nanf("")}, {1, 1}), ContractError);
    EXPECT_THROW(DepthMap(2, 2, {1.0f, 1.0f}, {1, 1}), ContractError);
    EXPECT_THROW(DepthMap(2, 1, {1.0f, 1.0f}, {1, 1, 1}), ContractError);
    // Masked-out values are never read.
    EXPECT_NO_THROW(DepthMap(2, 1, {1.0f, -5.0f}, {1, 0}));
    EXPECT_EQ(DepthMap(2, 1, {1.0f, -5.0f}, {1, 0}).valid_count(), 1u);
}

TEST(Types, PointCloudRejectsNonFinite) {
    EXPECT_THROW(PointCloud({Vec3(0, std::nan(""), 0)}), ContractError);
    EXPECT_THROW(PointCloud({Vec3(0, 0, std::numeric_limits<double>::infinity())}), ContractError);
    EXPECT_NO_THROW(PointCloud({Vec3(1, 2, 3)}));
}

TEST(Types, MeshRejectsBadIndicesAndDegenerateTriangles) {
    std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    EXPECT_THROW(TriangleMesh(v, {Triangle{0, 1, 3}}), ContractError);
    EXPECT_THROW(TriangleMesh(v, {Triangle{0, 1, 1}}), ContractError);
    EXPECT_THROW(TriangleMesh(v, {Triangle{2, 1, 2}}), ContractError);
    const TriangleMesh m(v, {Triangle{0, 1, 2}});
    EXPECT_DOUBLE_EQ(m.total_area(), 0.5);
}

TEST(Types, SphericalMapInvariants) {
    EXPECT_THROW(SphericalMap(2, 2, {0.1f, 1.5f, 0.0f, 0.0f}, {1, 1, 0, 0}), ContractError);
    EXPECT_THROW(SphericalMap(2, 2, {0.1f, -0.1f, 0.0f, 0.0f}, {1, 1, 0, 0}), ContractError);
    EXPECT_THROW(SphericalMap(2, 2, {0.1f}, {1}), ContractError);
    const SphericalMap m(4, 2, {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f, 0.8f}, {1, 1, 1, 1, 1, 1, 1, 1});
    // Longitude wraps: column n_lon is column 0.
    EXPECT_EQ(m.index(4, 1), m.index(0, 1));
    EXPECT_EQ(m.index(-1, 0), m.index(3, 0));
    EXPECT_FLOAT_EQ(m.value(5, 1), 0.6f);
}

TEST(Types, VoxelGridInvariants) {
    EXPECT_THROW(VoxelGrid(2, {}, std::vector<float>(8, 1.5f)), ContractError);
    EXPECT_THROW(VoxelGrid(2, {}, std::vector<float>(8, -0.1f)), ContractError);
    EXPECT_THROW(VoxelGrid(2, {}, std::vector<float>(7, 0.0f)), ContractError);
    EXPECT_THROW(VoxelGrid(2, Extent{Vec3::Zero(), 0.0}, std::vector<float>(8, 0.0f)), ContractError);
    const auto g = VoxelGrid::zeros(4);
    EXPECT_DOUBLE_EQ(g.cell_size(), 0.25);
    EXPECT_TRUE((g.cell_center(0, 0, 0) - Vec3::Constant(-0.375)).norm() < 1e-15);
    EXPECT_EQ(g.index(1, 2, 3), (3u * 4 + 2) * 4 + 1);
}

TEST(Types, PoseRequiresProperRotation) {
    Mat3 reflect = Mat3::Identity();
    reflect(0, 0) = -1;
    EXPECT_THROW(Pose(reflect, Vec3::Zero()), ContractError);
    Mat3 scaled = Mat3::Identity() * 1.01;
    EXPECT_THROW(Pose(scaled, Vec3::Zero()), ContractError);
    Mat3 nearly = Mat3::Identity();
    nearly(0, 1) = 1e-8;
    EXPECT_NO_THROW(Pose(nearly, Vec3::Zero()));

    Mat3 rz;
    rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    const Pose p(rz, Vec3(1, 2, 3));
    const Vec3 x(0.3, -0.2, 0.9);
    EXPECT_LT((p.inverse().apply(p.apply(x)) - x).norm(), 1e-15);
    EXPECT_LT((p.compose(p.inverse()).apply(x) - x).norm(), 1e-15);
}

TEST(Voxb, TwoByTwoRoundTrip) {
    const Tensor t{{2, 2}, std::vector<float>{0.0f, 1.0f, 1.0f, 0.0f}};
    EXPECT_EQ(decode_tensor(encode_tensor(t)), t);
    const auto dir = ts::scratch_dir("voxb_roundtrip");
    write_tensor(dir / "g.voxb", t);
    EXPECT_EQ(read_tensor(dir / "g.voxb"), t);
}

TEST(Voxb, ByteLayoutIsLittleEndian) {
    const Tensor t{{3}, std::vector<std::uint8_t>{7, 8, 9}};
    const auto bytes = encode_tensor(t);
    const std::vector<std::uint8_t> expected{'V', 'O', 'X', 'B', 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0,
                                             3, 0, 0, 0, 0, 0, 0, 0, 7, 8, 9};
    EXPECT_EQ(bytes, expected);
}

TEST(Voxb, RoundTripIsBitExactForBothElementTypes) {
    std::mt19937_64 rng(11);
    std::vector<float> f(3 * 4 * 5);
    for (auto& x : f) {
        std::uint32_t bits = static_cast<std::uint32_t>(rng());
        std::memcpy(&x, &bits, 4);
        if (!std::isfinite(x)) x = 0.25f;  // NaN payloads need not survive == comparisons
    }
    std::vector<std::uint8_t> u(17);
    for (auto& x : u) x = static_cast<std::uint8_t>(rng());
    const Tensor tf{{3, 4, 5}, f};
    const Tensor tu{{17}, u};
    EXPECT_EQ(decode_tensor(encode_tensor(tf)), tf);
    EXPECT_EQ(decode_tensor(encode_tensor(tu)), tu);
    const Tensor scalar{{}, std::vector<float>{3.5f}};
    EXPECT_EQ(decode_tensor(encode_tensor(scalar)), scalar);
}

TEST(Voxb, MissingElementIsCorruption) {
    const Tensor t{{2, 4}, std::vector<float>(8, 0.5f)};
    auto bytes = encode_tensor(t);
    bytes.resize(bytes.size() - 4);  // 7 of 8 elements present
    EXPECT_THROW(decode_tensor(bytes), CorruptionError);
    bytes.resize(bytes.size() + 8);  // 9 elements
    EXPECT_THROW(decode_tensor(bytes), CorruptionError);
}

TEST(Voxb, BadHeadersAreFormatErrors) {
    const Tensor t{{2}, std::vector<float>{1.0f, 2.0f}};
    auto bytes = encode_tensor(t);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(decode_tensor(bad_magic), FormatError);
    auto bad_version = bytes;
    bad_version[4] = 2;
    EXPECT_THROW(decode_tensor(bad_version), FormatError);
    auto bad_type = bytes;
    bad_type[8] = 9;
    EXPECT_THROW(decode_tensor(bad_type), FormatError);
    EXPECT_THROW(decode_tensor(std::span(bytes.data(), 10)), FormatError);
    // Corruption is an I/O error too, so callers can catch the family.
    EXPECT_THROW(decode_tensor(bad_magic), IoError);
}

TEST(Voxb, MissingFileIsIoError) {
    EXPECT_THROW(read_tensor("/nonexistent/dir/x.voxb"), IoError);
}

TEST(Obj, MeshAndPointsRoundTripExactly) {
    std::mt19937_64 rng(5);
    const auto cloud = ts::random_cloud(rng, 50, -3, 3);
    const TriangleMesh mesh(cloud.points(), {Triangle{0, 1, 2}, Triangle{3, 4, 5}, Triangle{49, 0, 7}});
    const auto dir = ts::scratch_dir("obj_roundtrip");
    write_obj(dir / "m.obj", mesh);
    write_obj(dir / "p.obj", cloud);
    EXPECT_EQ(read_obj_mesh(dir / "m.obj"), mesh);
    EXPECT_EQ(read_obj_points(dir / "p.obj"), cloud);
    EXPECT_TRUE(read_obj_mesh(dir / "p.obj").empty());
}

TEST(Obj, ReadsQuadsNegativeIndicesAndSlashes) {
    const auto dir = ts::scratch_dir("obj_read");
    {
        std::ofstream out(dir / "q.obj");
        out << "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\nf -4 -2 -1\n";
    }
    const auto m = read_obj_mesh(dir / "q.obj");
    ASSERT_EQ(m.triangles().size(), 3u);
    EXPECT_EQ(m.triangles()[0], (Triangle{0, 1, 2}));
    EXPECT_EQ(m.triangles()[1], (Triangle{0, 2, 3}));
    EXPECT_EQ(m.triangles()[2], (Triangle{0, 2, 3}));
    EXPECT_DOUBLE_EQ(m.total_area(), 1.5);
    {
        std::ofstream out(dir / "bad.obj");
        out << "v 0 0 0\nv 1 0 0\nf 1 2 5\n";
    }
    EXPECT_THROW(read_obj_mesh(dir / "bad.obj"), FormatError);
}

TEST(Pfm, DepthRoundTripKeepsValuesAndMask) {
    std::vector<float> values{1.5f, 0.0f, 2.25f, 3.0f, 0.0f, 7.125f};
    std::vector<std::uint8_t> mask{1, 0, 1, 1, 0, 1};
    const DepthMap d(3, 2, values, mask);
    const auto dir = ts::scratch_dir("pfm");
    write_pfm(dir / "d.pfm", d);
    EXPECT_EQ(read_pfm(dir / "d.pfm"), d);

    // Rows are stored bottom to top.
    const auto bytes = read_file_bytes(dir / "d.pfm");
    const std::string header = "Pf\n3 2\n-1.0\n";
    ASSERT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<long>(header.size())), header);
    float first;
    std::memcpy(&first, bytes.data() + header.size(), 4);
    EXPECT_EQ(first, 3.0f);
}

TEST(Pfm, TruncatedPayloadIsCorruption) {
    const DepthMap d(2, 2, {1, 1, 1, 1}, {1, 1, 1, 1});
    const auto dir = ts::scratch_dir("pfm_trunc");
    write_pfm(dir / "d.pfm", d);
    auto bytes = read_file_bytes(dir / "d.pfm");
    bytes.pop_back();
    write_file_bytes(dir / "d.pfm", bytes);
    EXPECT_THROW(read_pfm(dir / "d.pfm"), CorruptionError);
}

TEST(Sidecars, SphericalMapRoundTrip) {
    std::vector<float> v(8 * 4, 0.0f);
    std::vector<std::uint8_t> m(8 * 4, 0);
    for (std::size_t i = 0; i < v.size(); i += 3) v[i] = static_cast<float>(i) / 40.0f, m[i] = 1;
    const SphericalMap map(8, 4, v, m);
    const auto dir = ts::scratch_dir("sph_sidecar");
    save_spherical_map(dir / "map.json", map);
    EXPECT_TRUE(std::filesystem::exists(dir / "map.values.voxb"));
    EXPECT_TRUE(std::filesystem::exists(dir / "map.mask.voxb"));
    EXPECT_EQ(load_spherical_map(dir / "map.json"), map);
    const auto values = read_tensor(dir / "map.values.voxb");
    EXPECT_EQ(values.shape, (std::vector<std::uint64_t>{4, 8}));
}

TEST(Sidecars, VoxelGridRoundTripWithExtent) {
    std::vector<float> v(27, 0.0f);
    v[13] = 0.75f;
    const VoxelGrid g(3, Extent{Vec3(0.1, -0.2, 0.3), 2.5}, v);
    const auto dir = ts::scratch_dir("vox_sidecar");
    save_voxel_grid(dir / "g.voxb", g);
    EXPECT_EQ(load_voxel_grid(dir / "g.voxb"), g);
    std::filesystem::remove(dir / "g.json");
    EXPECT_EQ(load_voxel_grid(dir / "g.voxb").extent(), Extent{});
}
