#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sphrecon/camera.hpp"
#include "sphrecon/spherical.hpp"
#include "sphrecon/types.hpp"
#include "sphrecon/voxel.hpp"

namespace sphrecon {

inline constexpr int kConfigVersion = 1;

enum class PipelineMode {
    Full,             ///< depth -> spherical map -> harmonic completion -> voxels, fused with depth voxels
    SphericalOracle,  ///< completion bypassed; a fully observed spherical map is supplied
    Completion3D,     ///< spherical stages skipped; depth voxels fused with themselves
};

/// How pipeline cameras are built for rendered views.
struct CameraSpec {
    Projection projection = Projection::Perspective;
    std::size_t width = 128;
    std::size_t height = 128;
    double vfov_deg = 50.0;      ///< perspective
    double pixel_size = 0.01;    ///< orthographic, world units per pixel
    double distance = 2.0;       ///< orbit radius around the object center
};

struct PipelineConfig {
    std::size_t spherical_lon = 160;
    std::size_t spherical_lat = 160;
    std::size_t voxel_resolution = 128;
    Extent voxel_extent;
    /// Grid on which depth points are meshed before spherical projection.
    std::size_t surface_resolution = 128;
    double surface_iso = 0.3;
    CompletionConfig inpaint;
    FusionMode fusion = FusionMode::Max;
    PipelineMode mode = PipelineMode::Full;
    std::size_t sweep_samples = 1024;
    std::uint64_t seed = 0;
    CameraSpec camera;
    /// Object normalization frame: this world-space sphere maps to radius 0.5 at the origin.
    Vec3 object_center = Vec3::Zero();
    double object_radius = 0.5;
    std::size_t grid_elevations = 5;
    std::size_t grid_azimuths = 8;
    double grid_elevation_min = -60.0;
    double grid_elevation_max = 60.0;

    /// Throws ContractError when a value breaks a module precondition.
    void validate() const;
};

nlohmann::json config_to_json(const PipelineConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json camera_to_json(const Camera& cam);
Camera camera_from_json(const nlohmann::json& j);
Camera load_camera(const std::filesystem::path& path);
void save_camera(const std::filesystem::path& path, const Camera& cam);

/// Camera described by `spec` placed at the given orbit position around `target`.
Camera make_orbit_camera(const CameraSpec& spec, double elevation_deg, double azimuth_deg,
                         const Vec3& target = Vec3::Zero());

std::string to_string(PipelineMode mode);
std::string to_string(FusionMode mode);
PipelineMode parse_pipeline_mode(const std::string& s);
FusionMode parse_fusion_mode(const std::string& s);

}  // namespace sphrecon
