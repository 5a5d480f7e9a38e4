#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sphrecon/camera.hpp"
#include "sphrecon/config.hpp"
#include "sphrecon/metrics.hpp"
#include "sphrecon/primitives.hpp"
#include "sphrecon/spherical.hpp"
#include "sphrecon/surface.hpp"
#include "sphrecon/voxel.hpp"

using namespace sphrecon;

namespace {

PointCloud cloud(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
    return PointCloud(std::move(pts));
}

VoxelGrid radial_grid(std::size_t res) {
    auto g = VoxelGrid::zeros(res);
    std::vector<float> v(res * res * res);
    for (std::size_t z = 0; z < res; ++z)
        for (std::size_t y = 0; y < res; ++y)
            for (std::size_t x = 0; x < res; ++x)
                v[g.index(x, y, z)] = static_cast<float>(std::max(0.0, 1.0 - 2.0 * g.cell_center(x, y, z).norm()));
    return {res, {}, std::move(v)};
}

void BM_Chamfer(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = cloud(n, 1), b = cloud(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(chamfer(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(2 * n));
}
BENCHMARK(BM_Chamfer)->Arg(1024)->Arg(16384);

void BM_ChamferBruteForce(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = cloud(n, 1), b = cloud(n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(chamfer_bruteforce(a, b));
}
BENCHMARK(BM_ChamferBruteForce)->Arg(1024);

void BM_MarchingCubes(benchmark::State& state) {
    const auto g = radial_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(marching_cubes(g, 0.5));
}
BENCHMARK(BM_MarchingCubes)->Arg(64)->Arg(128);

void BM_Voxelize(benchmark::State& state) {
    const auto pc = cloud(100000, 3);
    const auto res = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pointcloud_to_voxels(pc, res));
}
BENCHMARK(BM_Voxelize)->Arg(64)->Arg(128);

void BM_RenderDepth(benchmark::State& state) {
    const auto mesh = generate_primitive(PrimitiveKind::Torus, {}, 64);
    CameraSpec spec;
    spec.width = spec.height = static_cast<std::size_t>(state.range(0));
    const auto cam = make_orbit_camera(spec, 30.0, 45.0);
    for (auto _ : state) benchmark::DoNotOptimize(render_depth(mesh, cam));
}
BENCHMARK(BM_RenderDepth)->Arg(128)->Arg(256);

void BM_MeshToSpherical(benchmark::State& state) {
    const auto mesh = generate_primitive(PrimitiveKind::Torus, {}, 64);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mesh_to_spherical(mesh, n, n));
}
BENCHMARK(BM_MeshToSpherical)->Arg(160);

void BM_Inpaint(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto full = mesh_to_spherical(generate_primitive(PrimitiveKind::Sphere, {}, 64), n, n);
    std::vector<float> v = full.values();
    std::vector<std::uint8_t> m = full.mask();
    // Hide the back hemisphere, as a single view would.
    for (std::size_t lat = 0; lat < n; ++lat)
        for (std::size_t lon = n / 4; lon < 3 * n / 4; ++lon) {
            m[lat * n + lon] = 0;
            v[lat * n + lon] = 0.0f;
        }
    const SphericalMap partial(n, n, std::move(v), std::move(m));
    for (auto _ : state) benchmark::DoNotOptimize(inpaint_spherical(partial));
}
BENCHMARK(BM_Inpaint)->Arg(64)->Arg(160)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
