#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sphrecon/types.hpp"

namespace sphrecon {

// Equirectangular parameterization: longitude in [0, 2pi) over n_lon columns,
// latitude in (-pi/2, pi/2) over n_lat rows, sampled at cell centers. The
// polar axis is +z.
double cell_longitude(std::size_t lon, std::size_t n_lon);
double cell_latitude(std::size_t lat, std::size_t n_lat);
Vec3 cell_direction(std::size_t lon, std::size_t lat, std::size_t n_lon, std::size_t n_lat);

/// Casts a ray from each cell's point on the unit sphere toward the origin and
/// records the distance travelled to the first surface hit (never beyond the
/// origin). Cells whose ray misses are masked out.
SphericalMap mesh_to_spherical(const TriangleMesh& mesh, std::size_t n_lon, std::size_t n_lat);

/// One point per observed cell at (1 - value) * direction, row-major cell order.
PointCloud spherical_to_pointcloud(const SphericalMap& map);

/// Spherical map with `width` wrapped columns on each side of the longitude axis.
struct PaddedMap {
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t width = 0;
    std::vector<float> values;
    std::vector<std::uint8_t> mask;
};

PaddedMap periodic_pad(const SphericalMap& map, std::size_t width);
/// Drops the padding columns again.
SphericalMap crop_padding(const PaddedMap& padded);

struct CompletionConfig {
    double tolerance = 1e-6;
    std::size_t max_iters = 10000;
};

struct CompletionResult {
    SphericalMap map;
    bool converged = true;
    std::size_t iterations = 0;  ///< Jacobi sweeps at full resolution
    double residual = 0.0;       ///< largest update of the last sweep
};

/// Anything that turns a partial spherical map into a fully observed one while
/// leaving observed cells untouched.
class SphericalCompleter {
public:
    virtual ~SphericalCompleter() = default;
    virtual CompletionResult complete(const SphericalMap& partial) const = 0;
};

/// Fills missing cells with the discrete harmonic interpolant of the observed
/// ones (periodic in longitude, reflected at the polar rows) using Jacobi
/// sweeps. A coarse-to-fine pass over a 2x pyramid provides the starting guess,
/// clamped per connected missing region to the range of its boundary values.
CompletionResult inpaint_spherical(const SphericalMap& partial, const CompletionConfig& cfg = {});

class HarmonicCompleter final : public SphericalCompleter {
public:
    explicit HarmonicCompleter(CompletionConfig cfg = {}) : cfg_(cfg) {}
    CompletionResult complete(const SphericalMap& partial) const override {
        return inpaint_spherical(partial, cfg_);
    }

private:
    CompletionConfig cfg_;
};

}  // namespace sphrecon
