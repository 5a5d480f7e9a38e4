#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sphrecon/types.hpp"

namespace sphrecon {

struct RayHit {
    double t = 0.0;              ///< ray parameter: hit = origin + t * direction
    std::uint32_t triangle = 0;
};

/// Watertight ray/triangle test (shear-and-scale formulation). Both triangle
/// orientations count as hits. Returns t when the hit lies in [t_min, t_max].
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& direction, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double t_min, double t_max);

/// Bounding-volume hierarchy over a triangle mesh for nearest-hit queries.
/// Ties in t resolve to the lowest triangle index, so results do not depend on
/// tree layout.
class TriangleBvh {
public:
    explicit TriangleBvh(const TriangleMesh& mesh);

    std::optional<RayHit> closest_hit(const Vec3& origin, const Vec3& direction, double t_min,
                                      double t_max) const;

private:
    struct Node {
        Eigen::Vector3d lo, hi;
        std::uint32_t first = 0;  // leaf: first index into order_; inner: right child
        std::uint32_t count = 0;  // 0 for inner nodes
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);

    std::vector<Vec3> a_, b_, c_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace sphrecon
