#pragma once

#include <cstddef>
#include <cstdint>

#include "sphrecon/types.hpp"

namespace sphrecon {

/// Marching cubes over the lattice of cell centers. Values above `iso` are
/// inside; triangles wind counter-clockwise seen from outside. Ambiguous cube
/// faces always separate the inside corners, so adjacent cells agree and
/// closed fields give closed meshes. Corner values equal to iso are nudged up
/// by 1e-9. Vertex indices follow the z-major, x-fastest cell order.
TriangleMesh marching_cubes(const VoxelGrid& grid, double iso);

struct NormalizedMesh {
    TriangleMesh mesh;
    Similarity transform;  ///< maps input coordinates to normalized ones
};

/// Centers the mesh's bounding box at the origin and scales so the farthest
/// vertex lies at radius 0.5.
NormalizedMesh normalize_shape(const TriangleMesh& mesh);

/// n points, triangle chosen with probability proportional to area, uniform
/// inside the triangle. Draw i depends only on (seed, i).
PointCloud sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

}  // namespace sphrecon
