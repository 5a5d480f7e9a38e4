#include "sphrecon/raycast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace sphrecon {

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double t_min, double t_max) {
    int kz = 0;
    direction.cwiseAbs().maxCoeff(&kz);
    int kx = (kz + 1) % 3;
    int ky = (kx + 1) % 3;
    if (direction[kz] < 0.0) std::swap(kx, ky);

    const double sx = direction[kx] / direction[kz];
    const double sy = direction[ky] / direction[kz];
    const double sz = 1.0 / direction[kz];

    const Vec3 pa = a - origin;
    const Vec3 pb = b - origin;
    const Vec3 pc = c - origin;
    const double ax = pa[kx] - sx * pa[kz], ay = pa[ky] - sy * pa[kz];
    const double bx = pb[kx] - sx * pb[kz], by = pb[ky] - sy * pb[kz];
    const double cx = pc[kx] - sx * pc[kz], cy = pc[ky] - sy * pc[kz];

    double u = cx * by - cy * bx;
    double v = ax * cy - ay * cx;
    double w = bx * ay - by * ax;
    if (u == 0.0 || v == 0.0 || w == 0.0) {
        // Edge hit: redo the 2D edge functions in extended precision.
        using ld = long double;
        u = static_cast<double>(ld(cx) * ld(by) - ld(cy) * ld(bx));
        v = static_cast<double>(ld(ax) * ld(cy) - ld(ay) * ld(cx));
        w = static_cast<double>(ld(bx) * ld(ay) - ld(by) * ld(ax));
    }
    if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
    const double det = u + v + w;
    if (det == 0.0) return std::nullopt;

    const double t_scaled = u * sz * pa[kz] + v * sz * pb[kz] + w * sz * pc[kz];
    const double t = t_scaled / det;
    if (!(t >= t_min && t <= t_max)) return std::nullopt;
    return t;
}

namespace {

bool slab_test(const Vec3& lo, const Vec3& hi, const Vec3& origin, const Vec3& inv_dir, double t_min,
               double t_max) {
    for (int k = 0; k < 3; ++k) {
        double t0 = (lo[k] - origin[k]) * inv_dir[k];
        double t1 = (hi[k] - origin[k]) * inv_dir[k];
        if (std::isnan(t0) || std::isnan(t1)) {
            // 0 * inf: ray parallel to the slab and starting on its plane.
            if (origin[k] < lo[k] || origin[k] > hi[k]) return false;
            continue;
        }
        if (t0 > t1) std::swap(t0, t1);
        t_min = std::max(t_min, t0);
        t_max = std::min(t_max, t1);
        if (t_min > t_max) return false;
    }
    return true;
}

constexpr std::uint32_t kLeafSize = 4;

}  // namespace

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) {
    const auto n = mesh.triangles().size();
    a_.reserve(n);
    b_.reserve(n);
    c_.reserve(n);
    std::vector<Vec3> centroids;
    centroids.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        a_.push_back(mesh.corner(t, 0));
        b_.push_back(mesh.corner(t, 1));
        c_.push_back(mesh.corner(t, 2));
        centroids.push_back((a_.back() + b_.back() + c_.back()) / 3.0);
    }
    order_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) order_[i] = i;
    if (n > 0) {
        nodes_.reserve(2 * n / kLeafSize + 1);
        build(0, static_cast<std::uint32_t>(n), centroids);
    }
}

std::uint32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
    const auto node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    Vec3 clo = lo, chi = hi;
    for (auto i = begin; i < end; ++i) {
        const auto t = order_[i];
        lo = lo.cwiseMin(a_[t]).cwiseMin(b_[t]).cwiseMin(c_[t]);
        hi = hi.cwiseMax(a_[t]).cwiseMax(b_[t]).cwiseMax(c_[t]);
        clo = clo.cwiseMin(centroids[t]);
        chi = chi.cwiseMax(centroids[t]);
    }
    nodes_[node_index].lo = lo;
    nodes_[node_index].hi = hi;

    if (end - begin <= kLeafSize) {
        nodes_[node_index].first = begin;
        nodes_[node_index].count = end - begin;
        return node_index;
    }
    int axis = 0;
    (chi - clo).maxCoeff(&axis);
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t x, std::uint32_t y) {
                         if (centroids[x][axis] != centroids[y][axis]) return centroids[x][axis] < centroids[y][axis];
                         return x < y;
                     });
    build(begin, mid, centroids);  // left child is node_index + 1
    const auto right = build(mid, end, centroids);
    nodes_[node_index].first = right;
    nodes_[node_index].count = 0;
    return node_index;
}

std::optional<RayHit> TriangleBvh::closest_hit(const Vec3& origin, const Vec3& direction, double t_min,
                                               double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv_dir = direction.cwiseInverse();
    std::optional<RayHit> best;
    double best_t = t_max;

    std::array<std::uint32_t, 128> stack{};
    std::size_t top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!slab_test(node.lo, node.hi, origin, inv_dir, t_min, best_t)) continue;
        if (node.count > 0) {
            for (auto i = node.first; i < node.first + node.count; ++i) {
                const auto tri = order_[i];
                const auto t = intersect_triangle(origin, direction, a_[tri], b_[tri], c_[tri], t_min, best_t);
                if (!t) continue;
                if (!best || *t < best->t || (*t == best->t && tri < best->triangle)) {
                    best = RayHit{*t, tri};
                    best_t = *t;
                }
            }
        } else {
            const auto self = static_cast<std::uint32_t>(&node - nodes_.data());
            stack[top++] = node.first;
            stack[top++] = self + 1;
        }
    }
    return best;
}

}  // namespace sphrecon
