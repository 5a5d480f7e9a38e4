#include "sphrecon/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>
#include <png.h>

#include "sphrecon/error.hpp"
#include "sphrecon/io.hpp"
#include "sphrecon/parallel.hpp"
#include "sphrecon/surface.hpp"

namespace sphrecon {

namespace fs = std::filesystem;
using nlohmann::json;
using detail::require;

namespace {

std::string annotate(const std::string& where, const std::exception& e) { return where + ": " + e.what(); }

// Runs f, re-raising library errors with `where` prepended and their type kept.
template <class F>
auto in_stage(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const EmptyPredictionError& e) {
        throw EmptyPredictionError(annotate(where, e));
    } catch (const DegenerateInputError& e) {
        throw DegenerateInputError(annotate(where, e));
    } catch (const ContractError& e) {
        throw ContractError(annotate(where, e));
    } catch (const CorruptionError& e) {
        throw CorruptionError(annotate(where, e));
    } catch (const FormatError& e) {
        throw FormatError(annotate(where, e));
    } catch (const IoError& e) {
        throw IoError(annotate(where, e));
    } catch (const Error& e) {
        throw Error(annotate(where, e));
    }
}

Camera camera_with_pose(const CameraSpec& spec, const Pose& pose) {
    if (spec.projection == Projection::Perspective) return Camera::perspective_fov(spec.width, spec.height, spec.vfov_deg, pose);
    return Camera::orthographic(spec.width, spec.height, spec.pixel_size, 0.5 * static_cast<double>(spec.width),
                                0.5 * static_cast<double>(spec.height), pose);
}

// Points are meshed on a grid two cells wider than the voxel extent on each
// side so the isosurface closes inside the lattice.
TriangleMesh mesh_points(const PointCloud& pts, const PipelineConfig& cfg) {
    const std::size_t res = cfg.surface_resolution + 4;
    Extent ext = cfg.voxel_extent;
    ext.side *= static_cast<double>(res) / static_cast<double>(cfg.surface_resolution);
    const auto vox = pointcloud_to_voxels(pts, res, ext);
    return marching_cubes(vox.grid, cfg.surface_iso);
}

bool uses_spherical(const PipelineConfig& cfg) { return cfg.mode != PipelineMode::Completion3D; }
bool meshes_depth(const PipelineConfig& cfg) { return cfg.mode == PipelineMode::Full; }

void continue_pipeline(PipelineArtifacts& a, ResumeStage from, const PipelineConfig& cfg,
                       const std::optional<SphericalMap>& oracle_map, const PipelineStages& stages) {
    const auto at = [&](ResumeStage s) { return static_cast<int>(from) <= static_cast<int>(s); };

    if (at(ResumeStage::Mesh) && meshes_depth(cfg))
        a.partial_mesh = in_stage("mesh", [&] { return mesh_points(a.depth_points, cfg); });

    if (at(ResumeStage::ToSpherical) && meshes_depth(cfg))
        a.partial_map = in_stage("to-spherical", [&] {
            return mesh_to_spherical(a.partial_mesh, cfg.spherical_lon, cfg.spherical_lat);
        });

    if (at(ResumeStage::Inpaint) && uses_spherical(cfg)) {
        in_stage("inpaint", [&] {
            if (cfg.mode == PipelineMode::SphericalOracle) {
                require(oracle_map.has_value(), "spherical-oracle mode needs a full spherical map");
                require(oracle_map->n_lon() == cfg.spherical_lon && oracle_map->n_lat() == cfg.spherical_lat,
                        "oracle spherical map resolution differs from the configuration");
                a.completed_map = *oracle_map;
                return;
            }
            const HarmonicCompleter fallback(cfg.inpaint);
            const SphericalCompleter& completer = stages.completer ? *stages.completer : fallback;
            auto r = completer.complete(a.partial_map);
            require(r.map.n_lon() == a.partial_map.n_lon() && r.map.n_lat() == a.partial_map.n_lat(),
                    "completer changed the map resolution");
            a.completed_map = std::move(r.map);
            a.completion_converged = r.converged;
            a.completion_iterations = r.iterations;
            a.completion_residual = r.residual;
        });
    }

    if (at(ResumeStage::ToPoints) && uses_spherical(cfg))
        a.spherical_points = in_stage("to-points", [&] { return spherical_to_pointcloud(a.completed_map); });

    if (at(ResumeStage::ToVoxels)) {
        in_stage("to-voxels", [&] {
            a.discarded_points = 0;
            if (uses_spherical(cfg)) {
                auto s = pointcloud_to_voxels(a.spherical_points, cfg.voxel_resolution, cfg.voxel_extent);
                a.spherical_voxels = std::move(s.grid);
                a.discarded_points += s.discarded;
            }
            auto d = pointcloud_to_voxels(a.depth_points, cfg.voxel_resolution, cfg.voxel_extent);
            a.depth_voxels = std::move(d.grid);
            a.discarded_points += d.discarded;
        });
    }

    a.fused = in_stage("fuse", [&] {
        const FusionRefiner fallback(cfg.fusion);
        const VoxelRefiner& refiner = stages.refiner ? *stages.refiner : fallback;
        const VoxelGrid& surface = uses_spherical(cfg) ? a.spherical_voxels : a.depth_voxels;
        return refiner.refine(surface, a.depth_voxels);
    });
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json frame_to_json(const ViewerFrame& f) {
    const Mat3& r = f.rigid.rotation();
    json rot = json::array();
    for (int i = 0; i < 3; ++i) rot.push_back({r(i, 0), r(i, 1), r(i, 2)});
    return {{"rotation", rot}, {"translation", vec_json(f.rigid.translation())}, {"scale", f.scale}};
}

ViewerFrame frame_from_json(const json& j) {
    try {
        Mat3 r;
        Vec3 t;
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k) r(i, k) = j.at("rotation").at(i).at(k).get<double>();
            t(i) = j.at("translation").at(i).get<double>();
        }
        return {Pose(r, t), j.at("scale").get<double>()};
    } catch (const json::exception& e) {
        throw FormatError(std::string("frame.json: ") + e.what());
    }
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::size_t nonzero(const VoxelGrid& g) {
    return static_cast<std::size_t>(std::count_if(g.values().begin(), g.values().end(), [](float v) { return v > 0.0f; }));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Scales and moves a normalized (radius 0.5, origin) mesh onto the configured object sphere.
TriangleMesh place_on_object_sphere(const TriangleMesh& mesh, const PipelineConfig& cfg) {
    const auto normalized = normalize_shape(mesh).mesh;
    return transform(normalized, Similarity{cfg.object_radius / 0.5, cfg.object_center});
}

}  // namespace

ViewerFrame viewer_frame(const Camera& cam, const PipelineConfig& cfg) {
    require(cfg.object_radius > 0.0, "viewer_frame: object radius must be positive");
    const Mat3 rt = cam.pose().rotation().transpose();
    return {Pose(rt, -(rt * cfg.object_center)), 0.5 / cfg.object_radius};
}

TriangleMesh to_viewer(const TriangleMesh& mesh, const ViewerFrame& frame) {
    std::vector<Vec3> v;
    v.reserve(mesh.vertices().size());
    for (const auto& p : mesh.vertices()) v.push_back(frame.apply(p));
    return {std::move(v), mesh.triangles()};
}

PointCloud to_viewer(const PointCloud& pc, const ViewerFrame& frame) {
    std::vector<Vec3> v;
    v.reserve(pc.size());
    for (const auto& p : pc.points()) v.push_back(frame.apply(p));
    return PointCloud(std::move(v));
}

PipelineArtifacts run_pipeline(const std::vector<View>& views, const PipelineConfig& cfg,
                               const std::optional<SphericalMap>& oracle_map, const PipelineStages& stages) {
    in_stage("config", [&] { cfg.validate(); });
    require(!views.empty(), "run_pipeline: no views");
    PipelineArtifacts a;
    a.frame = viewer_frame(views.front().camera, cfg);
    a.depth_points = in_stage("unproject", [&] {
        std::vector<Vec3> pts;
        for (const auto& view : views) {
            const auto pc = unproject_depth(view.depth, view.camera);
            for (const auto& p : pc.points()) pts.push_back(a.frame.apply(p));
        }
        if (pts.empty()) throw DegenerateInputError("no valid depth pixels in any view");
        return PointCloud(std::move(pts));
    });
    continue_pipeline(a, ResumeStage::Mesh, cfg, oracle_map, stages);
    return a;
}

PipelineArtifacts run_pipeline(const DepthMap& depth, const Camera& cam, const PipelineConfig& cfg) {
    return run_pipeline(std::vector<View>{View{depth, cam}}, cfg);
}

SphericalMap oracle_spherical_map(const TriangleMesh& world_mesh, const ViewerFrame& frame, const PipelineConfig& cfg) {
    return in_stage("oracle-map", [&] {
        return mesh_to_spherical(to_viewer(world_mesh, frame), cfg.spherical_lon, cfg.spherical_lat);
    });
}

ResumeStage parse_resume_stage(const std::string& s) {
    if (s == "mesh") return ResumeStage::Mesh;
    if (s == "to-spherical") return ResumeStage::ToSpherical;
    if (s == "inpaint") return ResumeStage::Inpaint;
    if (s == "to-points") return ResumeStage::ToPoints;
    if (s == "to-voxels") return ResumeStage::ToVoxels;
    if (s == "fuse") return ResumeStage::Fuse;
    throw ContractError("unknown resume stage '" + s + "'");
}

std::string to_string(ResumeStage stage) {
    switch (stage) {
        case ResumeStage::Mesh: return "mesh";
        case ResumeStage::ToSpherical: return "to-spherical";
        case ResumeStage::Inpaint: return "inpaint";
        case ResumeStage::ToPoints: return "to-points";
        case ResumeStage::ToVoxels: return "to-voxels";
        case ResumeStage::Fuse: return "fuse";
    }
    return "mesh";
}

void dump_artifacts(const fs::path& dir, const PipelineArtifacts& a, const PipelineConfig& cfg) {
    fs::create_directories(dir);
    write_json_file(dir / "frame.json", frame_to_json(a.frame));
    write_obj(dir / "depth_points.obj", a.depth_points);
    if (!a.partial_mesh.vertices().empty()) write_obj(dir / "partial_mesh.obj", a.partial_mesh);
    if (a.partial_map.n_lon() > 0) save_spherical_map(dir / "partial_map.json", a.partial_map);
    if (a.completed_map.n_lon() > 0) save_spherical_map(dir / "completed_map.json", a.completed_map);
    if (!a.spherical_points.empty()) write_obj(dir / "spherical_points.obj", a.spherical_points);
    if (a.spherical_voxels.resolution() > 0) save_voxel_grid(dir / "spherical_voxels.voxb", a.spherical_voxels);
    save_voxel_grid(dir / "depth_voxels.voxb", a.depth_voxels);
    save_voxel_grid(dir / "fused.voxb", a.fused);

    json stats = {
        {"mode", to_string(cfg.mode)},
        {"depth_points", a.depth_points.size()},
        {"partial_mesh_triangles", a.partial_mesh.triangles().size()},
        {"partial_map_observed", a.partial_map.observed_count()},
        {"completion", {{"converged", a.completion_converged},
                        {"iterations", a.completion_iterations},
                        {"residual", a.completion_residual}}},
        {"spherical_points", a.spherical_points.size()},
        {"discarded_points", a.discarded_points},
        {"fused_occupied_voxels", nonzero(a.fused)},
        {"config", config_to_json(cfg)},
    };
    write_json_file(dir / "stats.json", stats);
}

PipelineArtifacts resume_pipeline(const fs::path& dir, ResumeStage stage, const PipelineConfig& cfg,
                                  const std::optional<SphericalMap>& oracle_map, const PipelineStages& stages) {
    in_stage("config", [&] { cfg.validate(); });
    PipelineArtifacts a;
    in_stage("resume", [&] {
        a.frame = frame_from_json(read_json_file(dir / "frame.json"));
        if (stage == ResumeStage::Fuse) {
            if (uses_spherical(cfg)) a.spherical_voxels = load_voxel_grid(dir / "spherical_voxels.voxb");
            a.depth_voxels = load_voxel_grid(dir / "depth_voxels.voxb");
            return;
        }
        a.depth_points = read_obj_points(dir / "depth_points.obj");
        if (!meshes_depth(cfg) && stage < ResumeStage::ToPoints) return;
        switch (stage) {
            case ResumeStage::ToSpherical: a.partial_mesh = read_obj_mesh(dir / "partial_mesh.obj"); break;
            case ResumeStage::Inpaint: a.partial_map = load_spherical_map(dir / "partial_map.json"); break;
            case ResumeStage::ToPoints:
                if (uses_spherical(cfg)) a.completed_map = load_spherical_map(dir / "completed_map.json");
                break;
            case ResumeStage::ToVoxels:
                if (uses_spherical(cfg)) a.spherical_points = read_obj_points(dir / "spherical_points.obj");
                break;
            default: break;
        }
    });
    continue_pipeline(a, stage, cfg, oracle_map, stages);
    return a;
}

SweepResult evaluate(const PipelineArtifacts& art, const TriangleMesh& world_gt, const PipelineConfig& cfg) {
    return in_stage("eval", [&] {
        return eval_sweep(art.fused, to_viewer(world_gt, art.frame), cfg.sweep_samples, cfg.seed);
    });
}

std::vector<Vec3> fibonacci_directions(std::size_t n) {
    require(n > 0, "fibonacci_directions: n must be positive");
    std::vector<Vec3> dirs;
    dirs.reserve(n);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return dirs;
}

std::vector<View> render_view_set(const TriangleMesh& mesh, const PipelineConfig& cfg, std::size_t n) {
    std::vector<View> views;
    for (const auto& d : fibonacci_directions(n)) {
        const Vec3 up = std::abs(d.z()) > 0.99 ? Vec3::UnitY() : Vec3::UnitZ();
        const Camera cam = camera_with_pose(cfg.camera, look_at(cfg.object_center + cfg.camera.distance * d,
                                                                cfg.object_center, up));
        views.push_back({render_depth(mesh, cam), cam});
    }
    return views;
}

View render_view(const TriangleMesh& mesh, const PipelineConfig& cfg, double elevation_deg, double azimuth_deg) {
    const Camera cam = make_orbit_camera(cfg.camera, elevation_deg, azimuth_deg, cfg.object_center);
    return {render_depth(mesh, cam), cam};
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    const fs::path base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        fs::path q(p);
        return q.is_relative() ? base / q : q;
    };
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
        require(j.is_object(), where + ": expected a JSON object");
        for (const auto& [key, _] : j.items()) {
            static const char* allowed[] = {"mesh", "class", "id", "camera", "elevation", "azimuth", "views"};
            require(std::any_of(std::begin(allowed), std::end(allowed), [&](const char* a) { return key == a; }),
                    where + ": unknown key '" + key + "'");
        }
        ManifestEntry e;
        try {
            require(j.contains("mesh"), where + ": missing 'mesh'");
            e.mesh = resolve(j["mesh"].get<std::string>());
            e.label = j.value("class", std::string("unlabeled"));
            e.id = j.value("id", e.mesh.stem().string());
            if (j.contains("camera")) e.camera = resolve(j["camera"].get<std::string>());
            e.elevation = j.value("elevation", e.elevation);
            e.azimuth = j.value("azimuth", e.azimuth);
            e.views = j.value("views", e.views);
        } catch (const json::exception& ex) {
            throw ContractError(where + ": " + ex.what());
        }
        require(e.views >= 1, where + ": views must be at least 1");
        require(!(e.camera && e.views > 1), where + ": 'camera' and 'views' > 1 are exclusive");
        entries.push_back(std::move(e));
    }
    return entries;
}

EvalReport run_manifest(const std::vector<ManifestEntry>& entries, const PipelineConfig& cfg, const std::string& model,
                        const std::optional<fs::path>& dump_dir) {
    cfg.validate();
    require(!entries.empty(), "run_manifest: manifest has no entries");
    std::vector<ObjectEval> evals(entries.size());
    parallel_for(0, entries.size(), [&](std::size_t i) {
        const auto& e = entries[i];
        in_stage("object " + e.label + "/" + e.id, [&] {
            const TriangleMesh mesh = place_on_object_sphere(read_obj_mesh(e.mesh), cfg);
            std::vector<View> views;
            if (e.views > 1) {
                views = render_view_set(mesh, cfg, e.views);
            } else if (e.camera) {
                const Camera cam = load_camera(*e.camera);
                views.push_back({render_depth(mesh, cam), cam});
            } else {
                views.push_back(render_view(mesh, cfg, e.elevation, e.azimuth));
            }
            std::optional<SphericalMap> oracle;
            if (cfg.mode == PipelineMode::SphericalOracle)
                oracle = oracle_spherical_map(mesh, viewer_frame(views.front().camera, cfg), cfg);
            const auto art = run_pipeline(views, cfg, oracle);
            if (dump_dir) dump_artifacts(*dump_dir / e.label / e.id, art, cfg);
            evals[i] = ObjectEval{e.id, e.label, evaluate(art, mesh, cfg)};
        });
    });
    return build_report(model, std::move(evals), cfg.sweep_samples, cfg.seed);
}

ViewpointGrid viewpoint_grid(const std::vector<TriangleMesh>& meshes, const PipelineConfig& cfg, std::size_t n_elev,
                             std::size_t n_azim) {
    cfg.validate();
    require(!meshes.empty(), "viewpoint_grid: mesh set is empty");
    require(n_elev >= 2 && n_azim >= 2, "viewpoint_grid: grid must be at least 2x2");
    ViewpointGrid g;
    for (std::size_t e = 0; e < n_elev; ++e)
        g.elevations.push_back(cfg.grid_elevation_min + (cfg.grid_elevation_max - cfg.grid_elevation_min) *
                                                            static_cast<double>(e) / static_cast<double>(n_elev - 1));
    for (std::size_t a = 0; a < n_azim; ++a) g.azimuths.push_back(360.0 * static_cast<double>(a) / static_cast<double>(n_azim));

    std::vector<TriangleMesh> placed;
    for (const auto& m : meshes) placed.push_back(place_on_object_sphere(m, cfg));

    const std::size_t cells = n_elev * n_azim;
    std::vector<double> best(cells * placed.size());
    parallel_for(0, best.size(), [&](std::size_t k) {
        const std::size_t cell = k / placed.size();
        const std::size_t m = k % placed.size();
        const double elev = g.elevations[cell / n_azim];
        const double azim = g.azimuths[cell % n_azim];
        std::ostringstream where;
        where << "view (" << elev << ", " << azim << ") mesh " << m;
        best[k] = in_stage(where.str(), [&] {
            const View view = render_view(placed[m], cfg, elev, azim);
            std::optional<SphericalMap> oracle;
            if (cfg.mode == PipelineMode::SphericalOracle)
                oracle = oracle_spherical_map(placed[m], viewer_frame(view.camera, cfg), cfg);
            const auto art = run_pipeline(std::vector<View>{view}, cfg, oracle);
            return evaluate(art, placed[m], cfg).best_cd;
        });
    });
    g.median_cd.resize(cells);
    for (std::size_t c = 0; c < cells; ++c)
        g.median_cd[c] = median({best.begin() + static_cast<std::ptrdiff_t>(c * placed.size()),
                                 best.begin() + static_cast<std::ptrdiff_t>((c + 1) * placed.size())});
    return g;
}

void save_viewpoint_grid(const fs::path& voxb, const ViewpointGrid& grid) {
    std::vector<float> v(grid.median_cd.begin(), grid.median_cd.end());
    write_tensor(voxb, Tensor{{grid.elevations.size(), grid.azimuths.size()}, std::move(v)});
    json side = {{"format", "sphrecon.viewpoint_grid"}, {"elevations_deg", grid.elevations}, {"azimuths_deg", grid.azimuths}};
    auto sidecar = voxb;
    sidecar.replace_extension(".json");
    write_json_file(sidecar, side);
}

namespace {

// Piecewise-linear dark-blue -> teal -> yellow ramp.
std::array<std::uint8_t, 3> ramp(double t) {
    static constexpr double stops[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    std::array<std::uint8_t, 3> c{};
    for (int k = 0; k < 3; ++k) c[k] = static_cast<std::uint8_t>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
    return c;
}

}  // namespace

void write_heatmap_png(const fs::path& png, const ViewpointGrid& grid, std::size_t cell_px) {
    require(cell_px > 0, "write_heatmap_png: cell size must be positive");
    const std::size_t rows = grid.elevations.size(), cols = grid.azimuths.size();
    require(rows * cols == grid.median_cd.size() && rows > 0 && cols > 0, "write_heatmap_png: malformed grid");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : grid.median_cd)
        if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    const std::size_t w = cols * cell_px, h = rows * cell_px;
    std::vector<std::uint8_t> pixels(w * h * 3);
    for (std::size_t y = 0; y < h; ++y) {
        // Highest elevation on top.
        const std::size_t r = rows - 1 - y / cell_px;
        for (std::size_t x = 0; x < w; ++x) {
            const double v = grid.at(r, x / cell_px);
            std::array<std::uint8_t, 3> c{255, 255, 255};
            if (std::isfinite(v)) c = ramp(hi > lo ? (v - lo) / (hi - lo) : 0.0);
            std::copy(c.begin(), c.end(), pixels.begin() + static_cast<std::ptrdiff_t>((y * w + x) * 3));
        }
    }

    FILE* fp = std::fopen(png.string().c_str(), "wb");
    if (!fp) throw IoError("cannot open for writing: " + png.string());
    png_structp ps = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = ps ? png_create_info_struct(ps) : nullptr;
    if (!ps || !info || setjmp(png_jmpbuf(ps))) {
        png_destroy_write_struct(&ps, info ? &info : nullptr);
        std::fclose(fp);
        throw IoError("png encoding failed: " + png.string());
    }
    png_init_io(ps, fp);
    png_set_IHDR(ps, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ps, info);
    for (std::size_t y = 0; y < h; ++y) png_write_row(ps, pixels.data() + y * w * 3);
    png_write_end(ps, nullptr);
    png_destroy_write_struct(&ps, &info);
    if (std::fclose(fp) != 0) throw IoError("write failed: " + png.string());
}

}  // namespace sphrecon
