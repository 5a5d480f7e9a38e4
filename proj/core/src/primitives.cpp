#include "sphrecon/primitives.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sphrecon/error.hpp"

namespace sphrecon {

using detail::require;

namespace {

using Tris = std::vector<Triangle>;

void quad(Tris& t, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    t.push_back({a, b, c});
    t.push_back({a, c, d});
}

TriangleMesh make_sphere(double r, std::size_t tess) {
    const std::size_t segs = tess, rings = std::max<std::size_t>(4, tess / 2);
    std::vector<Vec3> v;
    v.emplace_back(0.0, 0.0, r);
    for (std::size_t k = 1; k < rings; ++k) {
        const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(rings);
        for (std::size_t i = 0; i < segs; ++i) {
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segs);
            v.emplace_back(r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
                           r * std::cos(theta));
        }
    }
    const auto south = static_cast<std::uint32_t>(v.size());
    v.emplace_back(0.0, 0.0, -r);

    auto ring = [&](std::size_t k, std::size_t i) { return static_cast<std::uint32_t>(1 + (k - 1) * segs + i % segs); };
    Tris t;
    for (std::size_t i = 0; i < segs; ++i) t.push_back({0, ring(1, i), ring(1, i + 1)});
    for (std::size_t k = 1; k + 1 < rings; ++k)
        for (std::size_t i = 0; i < segs; ++i) quad(t, ring(k, i), ring(k + 1, i), ring(k + 1, i + 1), ring(k, i + 1));
    for (std::size_t i = 0; i < segs; ++i) t.push_back({south, ring(rings - 1, i + 1), ring(rings - 1, i)});
    return {std::move(v), std::move(t)};
}

TriangleMesh make_box(const Vec3& size) {
    std::vector<Vec3> v;
    for (int c = 0; c < 8; ++c)
        v.emplace_back(((c & 1) - 0.5) * size.x(), (((c >> 1) & 1) - 0.5) * size.y(), (((c >> 2) & 1) - 0.5) * size.z());
    Tris t;
    quad(t, 0, 4, 6, 2);
    quad(t, 1, 3, 7, 5);
    quad(t, 0, 1, 5, 4);
    quad(t, 2, 6, 7, 3);
    quad(t, 0, 2, 3, 1);
    quad(t, 4, 5, 7, 6);
    return {std::move(v), std::move(t)};
}

Vec3 on_circle(double r, std::size_t i, std::size_t n, double z) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    return {r * std::cos(phi), r * std::sin(phi), z};
}

TriangleMesh make_cone(double r, double h, std::size_t n) {
    std::vector<Vec3> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(on_circle(r, i, n, -0.5 * h));
    const auto apex = static_cast<std::uint32_t>(n), base = apex + 1;
    v.emplace_back(0.0, 0.0, 0.5 * h);
    v.emplace_back(0.0, 0.0, -0.5 * h);
    Tris t;
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::uint32_t>((i + 1) % n);
        t.push_back({i, j, apex});
        t.push_back({base, j, i});
    }
    return {std::move(v), std::move(t)};
}

TriangleMesh make_cylinder(double r, double h, std::size_t n) {
    std::vector<Vec3> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(on_circle(r, i, n, -0.5 * h));
    for (std::size_t i = 0; i < n; ++i) v.push_back(on_circle(r, i, n, 0.5 * h));
    const auto bottom = static_cast<std::uint32_t>(2 * n), top = bottom + 1;
    v.emplace_back(0.0, 0.0, -0.5 * h);
    v.emplace_back(0.0, 0.0, 0.5 * h);
    Tris t;
    const auto m = static_cast<std::uint32_t>(n);
    for (std::uint32_t i = 0; i < m; ++i) {
        const auto j = (i + 1) % m;
        quad(t, i, j, m + j, m + i);
        t.push_back({top, m + i, m + j});
        t.push_back({bottom, j, i});
    }
    return {std::move(v), std::move(t)};
}

TriangleMesh make_torus(double major, double minor, std::size_t tess) {
    const std::size_t nu = tess, nv = std::max<std::size_t>(8, tess / 2);
    std::vector<Vec3> v;
    for (std::size_t i = 0; i < nu; ++i) {
        const double u = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nu);
        for (std::size_t j = 0; j < nv; ++j) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(nv);
            const double rho = major + minor * std::cos(w);
            v.emplace_back(rho * std::cos(u), rho * std::sin(u), minor * std::sin(w));
        }
    }
    auto id = [&](std::size_t i, std::size_t j) { return static_cast<std::uint32_t>((i % nu) * nv + j % nv); };
    Tris t;
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) quad(t, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
    return {std::move(v), std::move(t)};
}

}  // namespace

TriangleMesh generate_primitive(PrimitiveKind kind, const PrimitiveParams& p, std::size_t tessellation) {
    require(tessellation >= 8, "generate_primitive: tessellation must be at least 8");
    switch (kind) {
        case PrimitiveKind::Sphere:
            require(p.radius > 0.0, "generate_primitive: sphere radius must be positive");
            return make_sphere(p.radius, tessellation);
        case PrimitiveKind::Cube:
            require((p.size.array() > 0.0).all(), "generate_primitive: cube edge lengths must be positive");
            return make_box(p.size);
        case PrimitiveKind::Cone:
            require(p.radius > 0.0 && p.height > 0.0, "generate_primitive: cone radius and height must be positive");
            return make_cone(p.radius, p.height, tessellation);
        case PrimitiveKind::Cylinder:
            require(p.radius > 0.0 && p.height > 0.0,
                    "generate_primitive: cylinder radius and height must be positive");
            return make_cylinder(p.radius, p.height, tessellation);
        case PrimitiveKind::Torus:
            require(p.major_radius > 0.0 && p.minor_radius > 0.0,
                    "generate_primitive: torus radii must be positive");
            require(p.minor_radius < p.major_radius, "generate_primitive: torus minor radius must be below major radius");
            return make_torus(p.major_radius, p.minor_radius, tessellation);
    }
    throw ContractError("generate_primitive: unknown primitive kind");
}

PrimitiveKind parse_primitive_kind(std::string_view name) {
    if (name == "sphere") return PrimitiveKind::Sphere;
    if (name == "cube") return PrimitiveKind::Cube;
    if (name == "cone") return PrimitiveKind::Cone;
    if (name == "cylinder") return PrimitiveKind::Cylinder;
    if (name == "torus") return PrimitiveKind::Torus;
    throw ContractError("unknown primitive kind: " + std::string(name));
}

std::string_view to_string(PrimitiveKind kind) {
    switch (kind) {
        case PrimitiveKind::Sphere: return "sphere";
        case PrimitiveKind::Cube: return "cube";
        case PrimitiveKind::Cone: return "cone";
        case PrimitiveKind::Cylinder: return "cylinder";
        case PrimitiveKind::Torus: return "torus";
    }
    return "unknown";
}

}  // namespace sphrecon
