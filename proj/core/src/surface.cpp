#include "sphrecon/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Geometry>

#include "sphrecon/error.hpp"
#include "sphrecon/parallel.hpp"
#include "sphrecon/rng.hpp"

namespace sphrecon {

namespace {

// Corner c of a cell sits at offset (c&1, (c>>1)&1, (c>>2)&1).
struct CubeEdge {
    int c0, c1, axis;
};

constexpr std::array<CubeEdge, 12> make_edges() {
    std::array<CubeEdge, 12> edges{};
    int n = 0;
    for (int axis = 0; axis < 3; ++axis)
        for (int c = 0; c < 8; ++c)
            if (!(c & (1 << axis))) edges[n++] = {c, c | (1 << axis), axis};
    return edges;
}

constexpr auto kEdges = make_edges();

Vec3 corner_offset(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

bool edge_on_face(const CubeEdge& e, int axis, int side) {
    const int bit = 1 << axis;
    return ((e.c0 & bit) != 0) == (side != 0) && ((e.c1 & bit) != 0) == (side != 0);
}

bool edges_share_face(int a, int b) {
    for (int axis = 0; axis < 3; ++axis)
        for (int side = 0; side < 2; ++side)
            if (edge_on_face(kEdges[a], axis, side) && edge_on_face(kEdges[b], axis, side)) return true;
    return false;
}

using TriList = std::vector<std::array<int, 3>>;

// Builds the triangle list (in cube-edge ids) for one inside-corner configuration.
TriList triangulate_config(int config) {
    auto inside = [config](int c) { return (config >> c) & 1; };
    std::array<std::vector<int>, 12> links;
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side < 2; ++side) {
            std::vector<int> crossed;
            for (int e = 0; e < 12; ++e)
                if (edge_on_face(kEdges[e], axis, side) && inside(kEdges[e].c0) != inside(kEdges[e].c1))
                    crossed.push_back(e);
            if (crossed.size() == 2) {
                links[crossed[0]].push_back(crossed[1]);
                links[crossed[1]].push_back(crossed[0]);
            } else if (crossed.size() == 4) {
                // Ambiguous face: cut off each inside corner separately.
                for (int c = 0; c < 8; ++c) {
                    if (!inside(c) || ((c >> axis) & 1) != side) continue;
                    std::vector<int> around;
                    for (int e : crossed)
                        if (kEdges[e].c0 == c || kEdges[e].c1 == c) around.push_back(e);
                    links[around[0]].push_back(around[1]);
                    links[around[1]].push_back(around[0]);
                }
            }
        }
    }

    TriList tris;
    std::array<bool, 12> visited{};
    for (int start = 0; start < 12; ++start) {
        if (visited[start] || links[start].empty()) continue;
        std::vector<int> loop;
        int prev = -1, cur = start;
        while (!visited[cur]) {
            visited[cur] = true;
            loop.push_back(cur);
            const int next = links[cur][0] != prev ? links[cur][0] : links[cur][1];
            prev = cur;
            cur = next;
        }

        auto mid = [](int e) -> Vec3 { return 0.5 * (corner_offset(kEdges[e].c0) + corner_offset(kEdges[e].c1)); };
        Vec3 normal = Vec3::Zero(), outward = Vec3::Zero();
        for (std::size_t i = 0; i < loop.size(); ++i) {
            normal += mid(loop[i]).cross(mid(loop[(i + 1) % loop.size()]));
            const auto& e = kEdges[loop[i]];
            const Vec3 in = corner_offset(inside(e.c0) ? e.c0 : e.c1);
            const Vec3 out = corner_offset(inside(e.c0) ? e.c1 : e.c0);
            outward += out - in;
        }
        if (normal.dot(outward) < 0.0) std::reverse(loop.begin(), loop.end());

        // Fan from a vertex whose diagonals never join two edges of one face;
        // such a diagonal could be duplicated by the neighbouring cell.
        const std::size_t n = loop.size();
        std::size_t apex = 0;
        for (std::size_t s = 0; s < n; ++s) {
            bool ok = true;
            for (std::size_t k = 2; k + 1 < n && ok; ++k)
                ok = !edges_share_face(loop[s], loop[(s + k) % n]);
            if (ok) {
                apex = s;
                break;
            }
        }
        for (std::size_t k = 1; k + 1 < n; ++k)
            tris.push_back({loop[apex], loop[(apex + k) % n], loop[(apex + k + 1) % n]});
    }
    return tris;
}

const std::array<TriList, 256>& case_table() {
    static const std::array<TriList, 256> table = [] {
        std::array<TriList, 256> t;
        for (int c = 0; c < 256; ++c) t[c] = triangulate_config(c);
        return t;
    }();
    return table;
}

}  // namespace

TriangleMesh marching_cubes(const VoxelGrid& grid, double iso) {
    detail::require(iso > 0.0 && iso < 1.0, "marching_cubes: iso must lie in (0, 1)");
    const std::size_t res = grid.resolution();
    detail::require(res >= 2, "marching_cubes: grid resolution must be at least 2");

    const auto& table = case_table();
    const double h = grid.cell_size();
    const Vec3 origin = grid.extent().min_corner() + Vec3::Constant(0.5 * h);
    auto value = [&](std::size_t x, std::size_t y, std::size_t z) {
        const double v = grid.at(x, y, z);
        return v == iso ? iso + 1e-9 : v;
    };

    std::vector<std::int32_t> edge_vertex(3 * res * res * res, -1);
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;

    std::array<double, 8> cv{};
    std::array<std::size_t, 8> cidx{};
    for (std::size_t z = 0; z + 1 < res; ++z) {
        for (std::size_t y = 0; y + 1 < res; ++y) {
            for (std::size_t x = 0; x + 1 < res; ++x) {
                int config = 0;
                for (int c = 0; c < 8; ++c) {
                    const std::size_t px = x + (c & 1), py = y + ((c >> 1) & 1), pz = z + ((c >> 2) & 1);
                    cv[c] = value(px, py, pz);
                    cidx[c] = grid.index(px, py, pz);
                    if (cv[c] > iso) config |= 1 << c;
                }
                const auto& tris = table[config];
                if (tris.empty()) continue;

                auto vertex_for = [&](int e) -> std::uint32_t {
                    const auto& edge = kEdges[e];
                    auto& slot = edge_vertex[3 * cidx[edge.c0] + edge.axis];
                    if (slot < 0) {
                        const double t = (iso - cv[edge.c0]) / (cv[edge.c1] - cv[edge.c0]);
                        const Vec3 p0 = origin + h * (Vec3(double(x), double(y), double(z)) + corner_offset(edge.c0));
                        Vec3 p = p0;
                        p[edge.axis] += t * h;
                        slot = static_cast<std::int32_t>(vertices.size());
                        vertices.push_back(p);
                    }
                    return static_cast<std::uint32_t>(slot);
                };
                for (const auto& tri : tris)
                    triangles.push_back({vertex_for(tri[0]), vertex_for(tri[1]), vertex_for(tri[2])});
            }
        }
    }
    return {std::move(vertices), std::move(triangles)};
}

NormalizedMesh normalize_shape(const TriangleMesh& mesh) {
    detail::require(!mesh.vertices().empty(), "normalize_shape: mesh has no vertices");
    Vec3 lo = mesh.vertices().front(), hi = lo;
    for (const auto& v : mesh.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const Vec3 center = 0.5 * (lo + hi);
    double radius = 0.0;
    for (const auto& v : mesh.vertices()) radius = std::max(radius, (v - center).norm());
    if (!(radius > 0.0)) throw DegenerateInputError("normalize_shape: mesh has zero extent");
    Similarity s;
    s.scale = 0.5 / radius;
    s.translation = -s.scale * center;
    return {transform(mesh, s), s};
}

PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
    const auto& tris = mesh.triangles();
    std::vector<double> cumulative(tris.size());
    double total = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        total += mesh.triangle_area(t);
        cumulative[t] = total;
    }
    if (!(total > 0.0)) throw DegenerateInputError("sample_surface: mesh has zero total area");

    const CounterRng rng(seed);
    std::vector<Vec3> pts(n);
    parallel_for(0, n, [&](std::size_t i) {
        const double target = rng.uniform(3 * i) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        if (it == cumulative.end()) --it;
        const auto t = static_cast<std::size_t>(it - cumulative.begin());
        const double r1 = std::sqrt(rng.uniform(3 * i + 1));
        const double r2 = rng.uniform(3 * i + 2);
        pts[i] = (1.0 - r1) * mesh.corner(t, 0) + r1 * (1.0 - r2) * mesh.corner(t, 1) + r1 * r2 * mesh.corner(t, 2);
    });
    return PointCloud(std::move(pts));
}

}  // namespace sphrecon
