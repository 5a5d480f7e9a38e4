#include "sphrecon/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "sphrecon/error.hpp"

namespace sphrecon {

using nlohmann::json;
using detail::require;

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    require(j.is_object(), where + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        require(ok, where + ": unknown key '" + key + "'");
    }
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ContractError(where + "." + key + ": " + e.what());
    }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j, const std::string& where) {
    require(j.is_array() && j.size() == 3, where + ": expected an array of 3 numbers");
    try {
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    } catch (const json::exception& e) {
        throw ContractError(where + ": " + e.what());
    }
}

std::string projection_name(Projection p) { return p == Projection::Perspective ? "perspective" : "orthographic"; }

Projection parse_projection(const std::string& s) {
    if (s == "perspective") return Projection::Perspective;
    if (s == "orthographic") return Projection::Orthographic;
    throw ContractError("unknown projection '" + s + "'");
}

}  // namespace

std::string to_string(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::Full: return "full";
        case PipelineMode::SphericalOracle: return "spherical-oracle";
        case PipelineMode::Completion3D: return "completion-3d";
    }
    return "full";
}

std::string to_string(FusionMode mode) { return mode == FusionMode::Max ? "max" : "average"; }

PipelineMode parse_pipeline_mode(const std::string& s) {
    if (s == "full") return PipelineMode::Full;
    if (s == "spherical-oracle") return PipelineMode::SphericalOracle;
    if (s == "completion-3d") return PipelineMode::Completion3D;
    throw ContractError("unknown pipeline mode '" + s + "'");
}

FusionMode parse_fusion_mode(const std::string& s) {
    if (s == "max") return FusionMode::Max;
    if (s == "average") return FusionMode::Average;
    throw ContractError("unknown fusion mode '" + s + "'");
}

void PipelineConfig::validate() const {
    require(spherical_lon >= 4 && spherical_lat >= 4, "config: spherical resolution must be at least 4x4");
    require(voxel_resolution >= 2, "config: voxel resolution must be at least 2");
    require(surface_resolution >= 2, "config: surface resolution must be at least 2");
    require(surface_iso > 0.0 && surface_iso < 1.0, "config: surface iso must lie in (0, 1)");
    require(voxel_extent.side > 0.0, "config: voxel extent side must be positive");
    require(inpaint.tolerance > 0.0, "config: inpaint tolerance must be positive");
    require(sweep_samples > 0, "config: sweep samples must be positive");
    require(camera.width > 0 && camera.height > 0, "config: camera image size must be positive");
    require(camera.vfov_deg > 0.0 && camera.vfov_deg < 180.0, "config: camera vfov must lie in (0, 180)");
    require(camera.pixel_size > 0.0, "config: camera pixel size must be positive");
    require(camera.distance > 0.0, "config: camera distance must be positive");
    require(object_radius > 0.0, "config: object radius must be positive");
    require(grid_elevations >= 2 && grid_azimuths >= 2, "config: viewpoint grid must be at least 2x2");
    require(grid_elevation_min <= grid_elevation_max && grid_elevation_min > -90.0 && grid_elevation_max < 90.0,
            "config: viewpoint elevations must lie in (-90, 90)");
}

json config_to_json(const PipelineConfig& c) {
    return {
        {"version", kConfigVersion},
        {"mode", to_string(c.mode)},
        {"spherical", {{"n_lon", c.spherical_lon}, {"n_lat", c.spherical_lat}}},
        {"voxel",
         {{"resolution", c.voxel_resolution},
          {"extent", {{"center", vec_json(c.voxel_extent.center)}, {"side", c.voxel_extent.side}}}}},
        {"surface", {{"resolution", c.surface_resolution}, {"iso", c.surface_iso}}},
        {"inpaint", {{"tolerance", c.inpaint.tolerance}, {"max_iters", c.inpaint.max_iters}}},
        {"fusion", to_string(c.fusion)},
        {"sweep", {{"samples", c.sweep_samples}, {"seed", c.seed}}},
        {"camera",
         {{"projection", projection_name(c.camera.projection)},
          {"width", c.camera.width},
          {"height", c.camera.height},
          {"vfov_deg", c.camera.vfov_deg},
          {"pixel_size", c.camera.pixel_size},
          {"distance", c.camera.distance}}},
        {"object", {{"center", vec_json(c.object_center)}, {"radius", c.object_radius}}},
        {"viewpoint_grid",
         {{"elevations", c.grid_elevations},
          {"azimuths", c.grid_azimuths},
          {"elevation_min_deg", c.grid_elevation_min},
          {"elevation_max_deg", c.grid_elevation_max}}},
    };
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    check_keys(j, {"version", "mode", "spherical", "voxel", "surface", "inpaint", "fusion", "sweep", "camera", "object",
                   "viewpoint_grid"},
               "config");
    if (j.contains("version")) {
        int version = 0;
        read_opt(j, "version", version, "config");
        require(version == kConfigVersion, "config: unsupported version " + std::to_string(version));
    }
    if (j.contains("mode")) {
        std::string m;
        read_opt(j, "mode", m, "config");
        c.mode = parse_pipeline_mode(m);
    }
    if (j.contains("fusion")) {
        std::string m;
        read_opt(j, "fusion", m, "config");
        c.fusion = parse_fusion_mode(m);
    }
    if (j.contains("spherical")) {
        const auto& s = j["spherical"];
        check_keys(s, {"n_lon", "n_lat"}, "config.spherical");
        read_opt(s, "n_lon", c.spherical_lon, "config.spherical");
        read_opt(s, "n_lat", c.spherical_lat, "config.spherical");
    }
    if (j.contains("voxel")) {
        const auto& v = j["voxel"];
        check_keys(v, {"resolution", "extent"}, "config.voxel");
        read_opt(v, "resolution", c.voxel_resolution, "config.voxel");
        if (v.contains("extent")) {
            const auto& e = v["extent"];
            check_keys(e, {"center", "side"}, "config.voxel.extent");
            if (e.contains("center")) c.voxel_extent.center = vec_from(e["center"], "config.voxel.extent.center");
            read_opt(e, "side", c.voxel_extent.side, "config.voxel.extent");
        }
    }
    if (j.contains("surface")) {
        const auto& s = j["surface"];
        check_keys(s, {"resolution", "iso"}, "config.surface");
        read_opt(s, "resolution", c.surface_resolution, "config.surface");
        read_opt(s, "iso", c.surface_iso, "config.surface");
    }
    if (j.contains("inpaint")) {
        const auto& s = j["inpaint"];
        check_keys(s, {"tolerance", "max_iters"}, "config.inpaint");
        read_opt(s, "tolerance", c.inpaint.tolerance, "config.inpaint");
        read_opt(s, "max_iters", c.inpaint.max_iters, "config.inpaint");
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        check_keys(s, {"samples", "seed"}, "config.sweep");
        read_opt(s, "samples", c.sweep_samples, "config.sweep");
        read_opt(s, "seed", c.seed, "config.sweep");
    }
    if (j.contains("camera")) {
        const auto& s = j["camera"];
        check_keys(s, {"projection", "width", "height", "vfov_deg", "pixel_size", "distance"}, "config.camera");
        if (s.contains("projection")) {
            std::string p;
            read_opt(s, "projection", p, "config.camera");
            c.camera.projection = parse_projection(p);
        }
        read_opt(s, "width", c.camera.width, "config.camera");
        read_opt(s, "height", c.camera.height, "config.camera");
        read_opt(s, "vfov_deg", c.camera.vfov_deg, "config.camera");
        read_opt(s, "pixel_size", c.camera.pixel_size, "config.camera");
        read_opt(s, "distance", c.camera.distance, "config.camera");
    }
    if (j.contains("object")) {
        const auto& s = j["object"];
        check_keys(s, {"center", "radius"}, "config.object");
        if (s.contains("center")) c.object_center = vec_from(s["center"], "config.object.center");
        read_opt(s, "radius", c.object_radius, "config.object");
    }
    if (j.contains("viewpoint_grid")) {
        const auto& s = j["viewpoint_grid"];
        check_keys(s, {"elevations", "azimuths", "elevation_min_deg", "elevation_max_deg"}, "config.viewpoint_grid");
        read_opt(s, "elevations", c.grid_elevations, "config.viewpoint_grid");
        read_opt(s, "azimuths", c.grid_azimuths, "config.viewpoint_grid");
        read_opt(s, "elevation_min_deg", c.grid_elevation_min, "config.viewpoint_grid");
        read_opt(s, "elevation_max_deg", c.grid_elevation_max, "config.viewpoint_grid");
    }
    c.validate();
    return c;
}

namespace {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

json camera_to_json(const Camera& cam) {
    const auto& r = cam.pose().rotation();
    json rot = json::array();
    for (int i = 0; i < 3; ++i) rot.push_back({r(i, 0), r(i, 1), r(i, 2)});
    return {{"projection", projection_name(cam.projection())},
            {"width", cam.width()},
            {"height", cam.height()},
            {"focal", cam.focal()},
            {"cx", cam.cx()},
            {"cy", cam.cy()},
            {"rotation", rot},
            {"translation", vec_json(cam.pose().translation())}};
}

Camera camera_from_json(const json& j) {
    check_keys(j, {"projection", "width", "height", "focal", "cx", "cy", "rotation", "translation"}, "camera");
    try {
        Mat3 r;
        const auto& rot = j.at("rotation");
        require(rot.is_array() && rot.size() == 3, "camera.rotation: expected 3 rows");
        for (int i = 0; i < 3; ++i) {
            const Vec3 row = vec_from(rot[i], "camera.rotation");
            r.row(i) = row.transpose();
        }
        const Pose pose(r, vec_from(j.at("translation"), "camera.translation"));
        const auto w = j.at("width").get<std::size_t>();
        const auto h = j.at("height").get<std::size_t>();
        const auto f = j.at("focal").get<double>();
        const auto cx = j.at("cx").get<double>();
        const auto cy = j.at("cy").get<double>();
        return parse_projection(j.at("projection").get<std::string>()) == Projection::Perspective
                   ? Camera::perspective(w, h, f, cx, cy, pose)
                   : Camera::orthographic(w, h, f, cx, cy, pose);
    } catch (const json::exception& e) {
        throw ContractError(std::string("camera: ") + e.what());
    }
}

Camera load_camera(const std::filesystem::path& path) { return camera_from_json(read_json_file(path)); }

void save_camera(const std::filesystem::path& path, const Camera& cam) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << camera_to_json(cam).dump(2) << '\n';
}

Camera make_orbit_camera(const CameraSpec& spec, double elevation_deg, double azimuth_deg, const Vec3& target) {
    const Pose pose = orbit_pose(elevation_deg, azimuth_deg, spec.distance, target);
    if (spec.projection == Projection::Perspective) return Camera::perspective_fov(spec.width, spec.height, spec.vfov_deg, pose);
    return Camera::orthographic(spec.width, spec.height, spec.pixel_size, 0.5 * static_cast<double>(spec.width),
                                0.5 * static_cast<double>(spec.height), pose);
}

}  // namespace sphrecon
