#pragma once

#include <cstddef>
#include <string_view>

#include "sphrecon/types.hpp"

namespace sphrecon {

enum class PrimitiveKind { Sphere, Cube, Cone, Cylinder, Torus };

struct PrimitiveParams {
    double radius = 0.5;          ///< sphere, cone, cylinder
    double height = 1.0;          ///< cone, cylinder
    Vec3 size = Vec3::Ones();     ///< cube (box edge lengths)
    double major_radius = 0.3;    ///< torus
    double minor_radius = 0.1;    ///< torus
};

/// Closed, outward-oriented mesh centered at the origin (axis along +z).
/// Dimensions are taken as given; call normalize_shape for the unit-sphere frame.
/// The cube ignores the tessellation and always has 12 triangles.
TriangleMesh generate_primitive(PrimitiveKind kind, const PrimitiveParams& params, std::size_t tessellation = 32);

PrimitiveKind parse_primitive_kind(std::string_view name);
std::string_view to_string(PrimitiveKind kind);

}  // namespace sphrecon
