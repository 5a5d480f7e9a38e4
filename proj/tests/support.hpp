#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Geometry>

#include "sphrecon/types.hpp"

namespace testing_support {

using sphrecon::PointCloud;
using sphrecon::TriangleMesh;
using sphrecon::Vec3;

/// Closest point on triangle abc to p (Voronoi-region walk), returned as a distance.
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return (p - (b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))))).norm();
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

inline double point_mesh_distance(const Vec3& p, const TriangleMesh& mesh) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t)
        best = std::min(best, point_triangle_distance(p, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2)));
    return best;
}

inline double max_edge_length(const TriangleMesh& mesh) {
    double m = 0.0;
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t)
        for (int k = 0; k < 3; ++k) m = std::max(m, (mesh.corner(t, k) - mesh.corner(t, (k + 1) % 3)).norm());
    return m;
}

/// Undirected edge -> number of incident triangles.
inline std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use(const TriangleMesh& mesh) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> use;
    for (const auto& t : mesh.triangles())
        for (int k = 0; k < 3; ++k) {
            auto a = t[k], b = t[(k + 1) % 3];
            ++use[{std::min(a, b), std::max(a, b)}];
        }
    return use;
}

inline bool is_closed(const TriangleMesh& mesh) {
    for (const auto& [e, n] : edge_use(mesh))
        if (n != 2) return false;
    return !mesh.triangles().empty();
}

/// V - E + F counting only referenced vertices.
inline long euler_characteristic(const TriangleMesh& mesh) {
    std::vector<char> used(mesh.vertices().size(), 0);
    for (const auto& t : mesh.triangles())
        for (auto i : t) used[i] = 1;
    const long v = std::count(used.begin(), used.end(), 1);
    return v - static_cast<long>(edge_use(mesh).size()) + static_cast<long>(mesh.triangles().size());
}

/// Divergence theorem: sum of signed tetrahedron volumes against the origin.
inline double signed_volume(const TriangleMesh& mesh) {
    double v = 0.0;
    for (std::size_t t = 0; t < mesh.triangles().size(); ++t)
        v += mesh.corner(t, 0).dot(mesh.corner(t, 1).cross(mesh.corner(t, 2))) / 6.0;
    return v;
}

inline PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, double lo = -0.5, double hi = 0.5) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
    return PointCloud(std::move(pts));
}

/// Exhaustive Chamfer distance with long double accumulation.
inline double chamfer_reference(const PointCloud& a, const PointCloud& b) {
    auto directed = [](const PointCloud& x, const PointCloud& y) {
        long double s = 0.0L;
        for (const auto& p : x.points()) {
            double m = std::numeric_limits<double>::infinity();
            for (const auto& q : y.points()) m = std::min(m, (p - q).norm());
            s += m;
        }
        return double(s / x.size());
    };
    return directed(a, b) + directed(b, a);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("sphrecon_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Field f sampled at the cell centers of a unit-cube lattice.
template <class F>
sphrecon::VoxelGrid sample_field(std::size_t res, F f) {
    auto g = sphrecon::VoxelGrid::zeros(res);
    std::vector<float> v(res * res * res);
    for (std::size_t z = 0; z < res; ++z)
        for (std::size_t y = 0; y < res; ++y)
            for (std::size_t x = 0; x < res; ++x) v[g.index(x, y, z)] = static_cast<float>(f(g.cell_center(x, y, z)));
    return {res, {}, std::move(v)};
}

// Trilinear interpolation of the lattice of cell centers.
inline double trilinear(const sphrecon::VoxelGrid& g, const Vec3& p) {
    const double h = g.cell_size();
    const Vec3 q = (p - g.extent().min_corner()) / h - Vec3::Constant(0.5);
    const auto n = static_cast<long>(g.resolution());
    long i[3];
    double f[3];
    for (int k = 0; k < 3; ++k) {
        i[k] = std::clamp(static_cast<long>(std::floor(q[k])), 0L, n - 2);
        f[k] = q[k] - static_cast<double>(i[k]);
    }
    double s = 0.0;
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                const double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
                s += w * g.at(static_cast<std::size_t>(i[0] + dx), static_cast<std::size_t>(i[1] + dy),
                              static_cast<std::size_t>(i[2] + dz));
            }
    return s;
}

/// Sum of Gaussian blobs clamped to 1, zero on the outer layer of cells.
inline sphrecon::VoxelGrid blobby_field(std::mt19937_64& rng, std::size_t res) {
    std::uniform_real_distribution<double> u(-0.3, 0.3), s(0.08, 0.18);
    std::vector<std::pair<Vec3, double>> blobs;
    const int count = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < count; ++i) blobs.push_back({Vec3(u(rng), u(rng), u(rng)), s(rng)});
    auto g = sample_field(res, [&](const Vec3& p) {
        double v = 0.0;
        for (const auto& [c, r] : blobs) v += std::exp(-(p - c).squaredNorm() / (r * r));
        return std::min(1.0, v);
    });
    std::vector<float> v = g.values();
    for (std::size_t z = 0; z < res; ++z)
        for (std::size_t y = 0; y < res; ++y)
            for (std::size_t x = 0; x < res; ++x)
                if (x == 0 || y == 0 || z == 0 || x == res - 1 || y == res - 1 || z == res - 1) v[g.index(x, y, z)] = 0;
    return {res, {}, std::move(v)};
}

// Random map with a few disc-shaped holes in index space.
inline sphrecon::SphericalMap random_holey_map(std::mt19937_64& rng, std::size_t n_lon, std::size_t n_lat) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<float> v(n_lon * n_lat);
    std::vector<std::uint8_t> m(n_lon * n_lat, 1);
    for (auto& x : v) x = static_cast<float>(0.1 + 0.8 * u(rng));
    const int holes = 1 + static_cast<int>(rng() % 4);
    for (int h = 0; h < holes; ++h) {
        const double cx = u(rng) * n_lon, cy = u(rng) * n_lat, r = 1.0 + u(rng) * 0.3 * n_lat;
        for (std::size_t lat = 0; lat < n_lat; ++lat)
            for (std::size_t lon = 0; lon < n_lon; ++lon) {
                double dx = std::abs(lon + 0.5 - cx);
                dx = std::min(dx, n_lon - dx);
                if (std::hypot(dx, lat + 0.5 - cy) < r) m[lat * n_lon + lon] = 0;
            }
    }
    if (std::count(m.begin(), m.end(), 1) == 0) m[0] = 1;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m[i]) v[i] = 0.0f;
    return {n_lon, n_lat, std::move(v), std::move(m)};
}

// Missing components under 4-connectivity with longitude wrap and no wrap over the poles,
// with the range of observed values adjacent to each.
struct Component {
    std::vector<std::size_t> cells;
    double lo = 1e9, hi = -1e9;
};

inline std::vector<Component> missing_components(const sphrecon::SphericalMap& m) {
    const std::size_t W = m.n_lon(), H = m.n_lat();
    std::vector<int> label(W * H, -1);
    std::vector<Component> out;
    for (std::size_t s = 0; s < W * H; ++s) {
        if (m.mask()[s] || label[s] >= 0) continue;
        Component c;
        std::vector<std::size_t> stack{s};
        label[s] = static_cast<int>(out.size());
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            c.cells.push_back(i);
            const std::size_t lat = i / W, lon = i % W;
            std::vector<std::size_t> nb{lat * W + (lon + 1) % W, lat * W + (lon + W - 1) % W};
            if (lat > 0) nb.push_back(i - W);
            if (lat + 1 < H) nb.push_back(i + W);
            for (auto j : nb) {
                if (m.mask()[j]) {
                    c.lo = std::min(c.lo, double(m.values()[j]));
                    c.hi = std::max(c.hi, double(m.values()[j]));
                } else if (label[j] < 0) {
                    label[j] = label[s];
                    stack.push_back(j);
                }
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace testing_support
