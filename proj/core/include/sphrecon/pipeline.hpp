#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sphrecon/camera.hpp"
#include "sphrecon/config.hpp"
#include "sphrecon/metrics.hpp"
#include "sphrecon/spherical.hpp"
#include "sphrecon/types.hpp"
#include "sphrecon/voxel.hpp"

namespace sphrecon {

/// World to viewer-centered normalized coordinates:
/// p -> scale * R0^T (p - object_center), R0 the first camera's rotation.
/// The object sphere from the config lands at radius 0.5 around the origin and
/// the axes follow the input camera (+z along its optical axis).
struct ViewerFrame {
    Pose rigid;
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return scale * rigid.apply(p); }
    Vec3 apply_inverse(const Vec3& p) const { return rigid.inverse().apply(p / scale); }
};

ViewerFrame viewer_frame(const Camera& cam, const PipelineConfig& cfg);
TriangleMesh to_viewer(const TriangleMesh& mesh, const ViewerFrame& frame);
PointCloud to_viewer(const PointCloud& pc, const ViewerFrame& frame);

struct View {
    DepthMap depth;
    Camera camera;
};

/// Intermediate products of one pipeline run, all in the viewer frame.
/// Stages that a mode skips leave their slot empty.
struct PipelineArtifacts {
    ViewerFrame frame;
    PointCloud depth_points;
    TriangleMesh partial_mesh;
    SphericalMap partial_map;
    SphericalMap completed_map;
    bool completion_converged = true;
    std::size_t completion_iterations = 0;
    double completion_residual = 0.0;
    PointCloud spherical_points;
    VoxelGrid spherical_voxels;
    VoxelGrid depth_voxels;
    std::size_t discarded_points = 0;
    VoxelGrid fused;
};

/// Replaceable stages. Null members select the classical defaults
/// (harmonic inpainting, voxel fusion as configured).
struct PipelineStages {
    const SphericalCompleter* completer = nullptr;
    const VoxelRefiner* refiner = nullptr;
};

/// Depth of one or more views -> fused voxel grid.
///
/// Full: unproject, normalize, mesh the points (voxelize + marching cubes),
/// project the mesh to a spherical map, complete it, back-project to points
/// and voxelize; fuse with the voxelized depth points.
/// SphericalOracle: as Full, but `oracle_map` replaces the completed map.
/// Completion3D: the depth voxels are fused with themselves.
///
/// Every view must carry at least one valid pixel. The first view's camera
/// defines the viewer frame. Errors keep their type and gain a stage prefix.
PipelineArtifacts run_pipeline(const std::vector<View>& views, const PipelineConfig& cfg,
                               const std::optional<SphericalMap>& oracle_map = std::nullopt,
                               const PipelineStages& stages = {});
PipelineArtifacts run_pipeline(const DepthMap& depth, const Camera& cam, const PipelineConfig& cfg);

/// Spherical map of a world-space mesh in the viewer frame. Directions whose
/// ray reaches the center without a hit stay masked out.
SphericalMap oracle_spherical_map(const TriangleMesh& world_mesh, const ViewerFrame& frame, const PipelineConfig& cfg);

enum class ResumeStage { Mesh, ToSpherical, Inpaint, ToPoints, ToVoxels, Fuse };

ResumeStage parse_resume_stage(const std::string& s);
std::string to_string(ResumeStage stage);

/// Writes every non-empty artifact plus frame.json and stats.json to `dir`.
void dump_artifacts(const std::filesystem::path& dir, const PipelineArtifacts& art, const PipelineConfig& cfg);

/// Reloads the dump in `dir` and continues from `stage` (the first stage that
/// is executed again). Gives the same fused grid as the uninterrupted run.
PipelineArtifacts resume_pipeline(const std::filesystem::path& dir, ResumeStage stage, const PipelineConfig& cfg,
                                  const std::optional<SphericalMap>& oracle_map = std::nullopt,
                                  const PipelineStages& stages = {});

/// Sweep of the fused grid against a world-space ground truth mesh.
SweepResult evaluate(const PipelineArtifacts& art, const TriangleMesh& world_gt, const PipelineConfig& cfg);

/// Unit directions spread evenly over the sphere (Fibonacci lattice).
std::vector<Vec3> fibonacci_directions(std::size_t n);

/// Renders `mesh` from `n` cameras on the Fibonacci lattice around the object center.
std::vector<View> render_view_set(const TriangleMesh& mesh, const PipelineConfig& cfg, std::size_t n);
View render_view(const TriangleMesh& mesh, const PipelineConfig& cfg, double elevation_deg, double azimuth_deg);

/// One line of a batch manifest. The mesh is normalized to the object sphere
/// before rendering.
struct ManifestEntry {
    std::filesystem::path mesh;
    std::string label;
    std::string id;
    std::optional<std::filesystem::path> camera;  ///< camera JSON; otherwise orbit angles
    double elevation = 30.0;
    double azimuth = 45.0;
    std::size_t views = 1;  ///< >1 renders a Fibonacci view set instead
};

/// JSON lines; blank lines and lines starting with '#' are skipped. Relative
/// paths resolve against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Runs and evaluates every entry (entries in parallel) and aggregates the report.
/// With `dump_dir`, each object's artifacts go to dump_dir/<label>/<id>.
EvalReport run_manifest(const std::vector<ManifestEntry>& entries, const PipelineConfig& cfg,
                        const std::string& model,
                        const std::optional<std::filesystem::path>& dump_dir = std::nullopt);

struct ViewpointGrid {
    std::vector<double> elevations;
    std::vector<double> azimuths;
    std::vector<double> median_cd;  ///< row-major, elevation as the row
    double at(std::size_t e, std::size_t a) const { return median_cd[e * azimuths.size() + a]; }
};

/// Elevation rows span [grid_elevation_min, grid_elevation_max]; azimuths are
/// k * 360 / n_azim. Each cell holds the median best CD over the meshes, each
/// normalized to the object sphere and seen from that single view.
ViewpointGrid viewpoint_grid(const std::vector<TriangleMesh>& meshes, const PipelineConfig& cfg, std::size_t n_elev,
                             std::size_t n_azim);

void save_viewpoint_grid(const std::filesystem::path& voxb, const ViewpointGrid& grid);
/// Heatmap, dark = low CD, bright = high CD; `cell_px` pixels per grid cell.
void write_heatmap_png(const std::filesystem::path& png, const ViewpointGrid& grid, std::size_t cell_px = 16);

}  // namespace sphrecon
