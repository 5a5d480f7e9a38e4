// sphrecon command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sphrecon/camera.hpp"
#include "sphrecon/config.hpp"
#include "sphrecon/error.hpp"
#include "sphrecon/io.hpp"
#include "sphrecon/metrics.hpp"
#include "sphrecon/parallel.hpp"
#include "sphrecon/pipeline.hpp"
#include "sphrecon/primitives.hpp"
#include "sphrecon/rng.hpp"
#include "sphrecon/spherical.hpp"
#include "sphrecon/surface.hpp"
#include "sphrecon/voxel.hpp"

namespace fs = std::filesystem;
using namespace sphrecon;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string dump_dir;
    unsigned threads = 1;
    std::string output;
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

const std::string& need_output(const Globals& g) {
    if (g.output.empty()) throw ContractError("--output is required for this command");
    return g.output;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Meshes are read as OBJ; point clouds take the "v" records of an OBJ.
PointCloud points_or_samples(const std::string& path, const PipelineConfig& cfg, std::uint64_t stream) {
    const auto mesh = read_obj_mesh(path);
    if (mesh.empty()) return read_obj_points(path);
    return sample_surface(mesh, cfg.sweep_samples, derive_seed(cfg.seed, stream));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth -> spherical map -> voxels reconstruction and evaluation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "Pipeline configuration (JSON)");
    app.add_option("--seed", g.seed, "Sampling seed (overrides the config)");
    app.add_option("--dump-intermediates", g.dump_dir, "Directory for stage artifacts");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--output,-o", g.output, "Output path");

    PipelineConfig cfg;
    auto load = [&] {
        if (!g.config.empty()) cfg = load_config(g.config);
        if (g.seed) cfg.seed = *g.seed;
        set_thread_count(g.threads);
    };

    // print-config
    auto* print_cfg = app.add_subcommand("print-config", "Print the effective configuration");
    print_cfg->callback([&] {
        load();
        write_text(g.output, config_to_json(cfg).dump(2) + "\n");
    });

    // gen-primitive
    std::string prim_kind = "sphere";
    PrimitiveParams prim;
    std::vector<double> prim_size;
    std::size_t prim_tess = 32;
    bool prim_normalize = false;
    auto* gen = app.add_subcommand("gen-primitive", "Write a primitive mesh as OBJ");
    gen->add_option("--kind", prim_kind, "sphere | cube | cone | cylinder | torus")->capture_default_str();
    gen->add_option("--tess", prim_tess, "Tessellation (>= 8)")->capture_default_str();
    gen->add_option("--radius", prim.radius)->capture_default_str();
    gen->add_option("--height", prim.height)->capture_default_str();
    gen->add_option("--size", prim_size, "Box edge lengths x y z")->expected(3);
    gen->add_option("--major", prim.major_radius)->capture_default_str();
    gen->add_option("--minor", prim.minor_radius)->capture_default_str();
    gen->add_flag("--normalize", prim_normalize, "Center and scale to radius 0.5");
    gen->callback([&] {
        load();
        if (prim_size.size() == 3) prim.size = Vec3(prim_size[0], prim_size[1], prim_size[2]);
        auto mesh = generate_primitive(parse_primitive_kind(prim_kind), prim, prim_tess);
        if (prim_normalize) mesh = normalize_shape(mesh).mesh;
        write_obj(need_output(g), mesh);
    });

    // render-depth
    std::string rd_mesh, rd_camera, rd_camera_out;
    double rd_elev = 30.0, rd_azim = 45.0;
    bool rd_normalize = false;
    auto* rd = app.add_subcommand("render-depth", "Render a depth map (PFM) of a mesh");
    rd->add_option("--mesh", rd_mesh)->required();
    rd->add_option("--camera", rd_camera, "Camera JSON; otherwise an orbit camera from the config")
        ;
    rd->add_option("--elevation", rd_elev)->capture_default_str();
    rd->add_option("--azimuth", rd_azim)->capture_default_str();
    rd->add_option("--save-camera", rd_camera_out, "Write the camera used as JSON");
    rd->add_flag("--normalize", rd_normalize, "Normalize the mesh onto the configured object sphere first");
    rd->callback([&] {
        load();
        auto mesh = read_obj_mesh(rd_mesh);
        if (rd_normalize)
            mesh = transform(normalize_shape(mesh).mesh, Similarity{cfg.object_radius / 0.5, cfg.object_center});
        const Camera cam = rd_camera.empty() ? make_orbit_camera(cfg.camera, rd_elev, rd_azim, cfg.object_center)
                                             : load_camera(rd_camera);
        const auto depth = render_depth(mesh, cam);
        ensure_parent(need_output(g));
        write_pfm(g.output, depth);
        if (!rd_camera_out.empty()) save_camera(rd_camera_out, cam);
        std::cerr << "valid pixels: " << depth.valid_count() << "\n";
    });

    // unproject
    std::string up_depth, up_camera;
    auto* up = app.add_subcommand("unproject", "Depth map + camera -> world-space points (OBJ)");
    up->add_option("--depth", up_depth)->required();
    up->add_option("--camera", up_camera)->required();
    up->callback([&] {
        load();
        const auto pc = unproject_depth(read_pfm(up_depth), load_camera(up_camera));
        ensure_parent(need_output(g));
        write_obj(g.output, pc);
    });

    // to-spherical
    std::string ts_mesh;
    auto* ts = app.add_subcommand("to-spherical", "Mesh (normalized frame) -> spherical map");
    ts->add_option("--mesh", ts_mesh)->required();
    ts->callback([&] {
        load();
        const auto map = mesh_to_spherical(read_obj_mesh(ts_mesh), cfg.spherical_lon, cfg.spherical_lat);
        ensure_parent(need_output(g));
        save_spherical_map(g.output, map);
        std::cerr << "observed cells: " << map.observed_count() << " / " << map.values().size() << "\n";
    });

    // inpaint
    std::string ip_map;
    auto* ip = app.add_subcommand("inpaint", "Harmonic completion of a partial spherical map");
    ip->add_option("--map", ip_map, "Spherical map sidecar JSON")->required();
    ip->callback([&] {
        load();
        const auto r = inpaint_spherical(load_spherical_map(ip_map), cfg.inpaint);
        ensure_parent(need_output(g));
        save_spherical_map(g.output, r.map);
        if (!r.converged)
            std::cerr << "warning: not converged after " << r.iterations << " iterations (residual " << r.residual
                      << ")\n";
        else
            std::cerr << "converged after " << r.iterations << " iterations\n";
    });

    // to-voxels
    std::string tv_points;
    std::optional<std::size_t> tv_res;
    auto* tv = app.add_subcommand("to-voxels", "Point cloud (OBJ) -> occupancy grid (VOXB)");
    tv->add_option("--points", tv_points)->required();
    tv->add_option("--resolution", tv_res, "Defaults to the configured voxel resolution");
    tv->callback([&] {
        load();
        const auto r = pointcloud_to_voxels(read_obj_points(tv_points), tv_res.value_or(cfg.voxel_resolution),
                                            cfg.voxel_extent);
        ensure_parent(need_output(g));
        save_voxel_grid(g.output, r.grid);
        std::cerr << "discarded points: " << r.discarded << "\n";
    });

    // fuse
    std::string fu_surface, fu_coarse, fu_mode;
    auto* fu = app.add_subcommand("fuse", "Fuse two voxel grids");
    fu->add_option("--surface", fu_surface)->required();
    fu->add_option("--coarse", fu_coarse)->required();
    fu->add_option("--mode", fu_mode, "max | average (defaults to the config)");
    fu->callback([&] {
        load();
        const FusionMode mode = fu_mode.empty() ? cfg.fusion : parse_fusion_mode(fu_mode);
        const auto out = fuse_voxels(load_voxel_grid(fu_surface), load_voxel_grid(fu_coarse), mode);
        ensure_parent(need_output(g));
        save_voxel_grid(g.output, out);
    });

    // isosurface
    std::string is_grid;
    double is_iso = 0.5;
    auto* is = app.add_subcommand("isosurface", "Marching cubes on a voxel grid");
    is->add_option("--grid", is_grid)->required();
    is->add_option("--iso", is_iso)->capture_default_str();
    is->callback([&] {
        load();
        const auto mesh = marching_cubes(load_voxel_grid(is_grid), is_iso);
        ensure_parent(need_output(g));
        write_obj(g.output, mesh);
    });

    // chamfer
    std::string ch_a, ch_b;
    bool ch_brute = false;
    auto* ch = app.add_subcommand("chamfer", "Chamfer distance between two point sets");
    ch->add_option("a", ch_a, "OBJ; meshes are surface-sampled, point files used as is")
        ->required()
        ;
    ch->add_option("b", ch_b)->required();
    ch->add_flag("--brute-force", ch_brute, "Exhaustive search instead of the grid index");
    ch->callback([&] {
        load();
        const auto a = points_or_samples(ch_a, cfg, 0);
        const auto b = points_or_samples(ch_b, cfg, 1);
        const double cd = ch_brute ? chamfer_bruteforce(a, b) : chamfer(a, b);
        write_text(g.output, fmt(cd) + "\n");
    });

    // eval
    std::string ev_pred, ev_gt, ev_id, ev_class = "unlabeled", ev_model = "prediction", ev_csv;
    auto* ev = app.add_subcommand("eval", "Threshold sweep of a predicted grid against a mesh");
    ev->add_option("--pred", ev_pred, "Predicted grid (VOXB)")->required();
    ev->add_option("--gt", ev_gt, "Ground truth mesh in the grid's frame")->required();
    ev->add_option("--id", ev_id);
    ev->add_option("--class", ev_class)->capture_default_str();
    ev->add_option("--model", ev_model)->capture_default_str();
    ev->add_option("--csv", ev_csv, "Also write the class table as CSV");
    ev->callback([&] {
        load();
        const auto sweep = eval_sweep(load_voxel_grid(ev_pred), read_obj_mesh(ev_gt), cfg.sweep_samples, cfg.seed);
        const std::string id = ev_id.empty() ? fs::path(ev_pred).stem().string() : ev_id;
        const auto report = build_report(ev_model, {ObjectEval{id, ev_class, sweep}}, cfg.sweep_samples, cfg.seed);
        write_text(g.output, report_to_json(report));
        if (!ev_csv.empty()) write_text(ev_csv, reports_to_csv(std::span(&report, 1)));
    });

    // dissimilarity
    std::vector<std::string> ds_test, ds_train;
    auto* ds = app.add_subcommand("dissimilarity", "Class dissimilarity of test shapes to training shapes");
    ds->add_option("--test", ds_test, "Test-class meshes (OBJ)")->required();
    ds->add_option("--train", ds_train, "Training-class meshes (OBJ)")->required();
    ds->callback([&] {
        load();
        std::vector<PointCloud> test, train;
        std::uint64_t stream = 0;
        for (const auto& p : ds_test) test.push_back(points_or_samples(p, cfg, stream++));
        for (const auto& p : ds_train) train.push_back(points_or_samples(p, cfg, stream++));
        write_text(g.output, fmt(class_dissimilarity(test, train)) + "\n");
    });

    // viewpoint-grid
    std::vector<std::string> vg_meshes;
    std::optional<std::size_t> vg_elev, vg_azim;
    std::string vg_png;
    auto* vg = app.add_subcommand("viewpoint-grid", "Median best CD over an elevation x azimuth grid");
    vg->add_option("--mesh", vg_meshes)->required();
    vg->add_option("--elevations", vg_elev, "Grid rows (defaults to the config)");
    vg->add_option("--azimuths", vg_azim, "Grid columns (defaults to the config)");
    vg->add_option("--png", vg_png, "Heatmap output");
    vg->callback([&] {
        load();
        std::vector<TriangleMesh> meshes;
        for (const auto& p : vg_meshes) meshes.push_back(read_obj_mesh(p));
        const auto grid = viewpoint_grid(meshes, cfg, vg_elev.value_or(cfg.grid_elevations),
                                         vg_azim.value_or(cfg.grid_azimuths));
        ensure_parent(need_output(g));
        save_viewpoint_grid(g.output, grid);
        if (!vg_png.empty()) {
            ensure_parent(vg_png);
            write_heatmap_png(vg_png, grid);
        }
        for (std::size_t e = 0; e < grid.elevations.size(); ++e) {
            std::cerr << "elev " << grid.elevations[e] << ":";
            for (std::size_t a = 0; a < grid.azimuths.size(); ++a) std::cerr << ' ' << grid.at(e, a);
            std::cerr << "\n";
        }
    });

    // run
    std::string rn_manifest, rn_mesh, rn_depth, rn_camera, rn_gt, rn_class = "unlabeled", rn_id, rn_model, rn_mode,
                                                                   rn_csv, rn_fused, rn_resume, rn_stage = "mesh";
    double rn_elev = 30.0, rn_azim = 45.0;
    std::size_t rn_views = 1;
    auto* rn = app.add_subcommand("run", "Full pipeline with evaluation");
    rn->add_option("--manifest", rn_manifest, "Batch manifest (JSON lines)");
    rn->add_option("--mesh", rn_mesh, "Single object: mesh to render and evaluate against");
    rn->add_option("--depth", rn_depth, "Single object: depth map (PFM) instead of rendering");
    rn->add_option("--camera", rn_camera, "Camera JSON for --depth or for rendering --mesh");
    rn->add_option("--gt", rn_gt, "Ground truth mesh (world frame) for --depth");
    rn->add_option("--elevation", rn_elev)->capture_default_str();
    rn->add_option("--azimuth", rn_azim)->capture_default_str();
    rn->add_option("--views", rn_views, "Render a Fibonacci view set of this size")->capture_default_str();
    rn->add_option("--class", rn_class)->capture_default_str();
    rn->add_option("--id", rn_id);
    rn->add_option("--model", rn_model, "Model name in the report (defaults to the mode)");
    rn->add_option("--mode", rn_mode, "full | spherical-oracle | completion-3d (overrides the config)");
    rn->add_option("--csv", rn_csv, "Also write the class table as CSV");
    rn->add_option("--fused", rn_fused, "Write the fused grid (VOXB)");
    rn->add_option("--resume-from", rn_resume, "Dump directory of an earlier run");
    rn->add_option("--stage", rn_stage, "First stage to recompute when resuming")->capture_default_str();
    rn->callback([&] {
        load();
        if (!rn_mode.empty()) cfg.mode = parse_pipeline_mode(rn_mode);
        cfg.validate();
        const std::string model = rn_model.empty() ? to_string(cfg.mode) : rn_model;
        const int sources = !rn_manifest.empty() + !rn_mesh.empty() + !rn_depth.empty() + !rn_resume.empty();
        if (sources != 1) throw ContractError("run needs exactly one of --manifest, --mesh, --depth, --resume-from");

        if (!rn_manifest.empty()) {
            const auto entries = load_manifest(rn_manifest);
            std::optional<fs::path> dump;
            if (!g.dump_dir.empty()) dump = g.dump_dir;
            const auto report = run_manifest(entries, cfg, model, dump);
            write_text(g.output, report_to_json(report));
            if (!rn_csv.empty()) write_text(rn_csv, reports_to_csv(std::span(&report, 1)));
            return;
        }

        std::optional<TriangleMesh> gt;
        std::vector<View> views;
        PipelineArtifacts art;
        if (!rn_mesh.empty()) {
            gt = transform(normalize_shape(read_obj_mesh(rn_mesh)).mesh,
                           Similarity{cfg.object_radius / 0.5, cfg.object_center});
            if (rn_views > 1) {
                views = render_view_set(*gt, cfg, rn_views);
            } else if (!rn_camera.empty()) {
                const Camera cam = load_camera(rn_camera);
                views.push_back({render_depth(*gt, cam), cam});
            } else {
                views.push_back(render_view(*gt, cfg, rn_elev, rn_azim));
            }
        } else if (!rn_depth.empty()) {
            if (rn_camera.empty()) throw ContractError("--depth needs --camera");
            views.push_back({read_pfm(rn_depth), load_camera(rn_camera)});
        }
        if (!rn_gt.empty()) gt = read_obj_mesh(rn_gt);

        std::optional<SphericalMap> oracle;
        if (!rn_resume.empty()) {
            // In spherical-oracle mode the dump's completed map is the oracle map.
            if (cfg.mode == PipelineMode::SphericalOracle)
                oracle = load_spherical_map(fs::path(rn_resume) / "completed_map.json");
            art = resume_pipeline(rn_resume, parse_resume_stage(rn_stage), cfg, oracle);
        } else {
            if (cfg.mode == PipelineMode::SphericalOracle) {
                if (!gt) throw ContractError("spherical-oracle mode needs a ground truth mesh");
                oracle = oracle_spherical_map(*gt, viewer_frame(views.front().camera, cfg), cfg);
            }
            art = run_pipeline(views, cfg, oracle);
        }
        if (!g.dump_dir.empty()) dump_artifacts(g.dump_dir, art, cfg);
        if (!rn_fused.empty()) {
            ensure_parent(rn_fused);
            save_voxel_grid(rn_fused, art.fused);
        }
        if (!gt) {
            if (rn_fused.empty()) {
                ensure_parent(need_output(g));
                save_voxel_grid(g.output, art.fused);
            }
            return;
        }
        std::string id = rn_id;
        if (id.empty()) id = fs::path(!rn_mesh.empty() ? rn_mesh : !rn_gt.empty() ? rn_gt : rn_depth).stem().string();
        const auto report = build_report(model, {ObjectEval{id, rn_class, evaluate(art, *gt, cfg)}},
                                         cfg.sweep_samples, cfg.seed);
        write_text(g.output, report_to_json(report));
        if (!rn_csv.empty()) write_text(rn_csv, reports_to_csv(std::span(&report, 1)));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
