#include "sphrecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "sphrecon/error.hpp"
#include "sphrecon/parallel.hpp"
#include "sphrecon/rng.hpp"
#include "sphrecon/surface.hpp"

namespace sphrecon {

using detail::require;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double brute_nearest_sq(const Vec3& q, const std::vector<Vec3>& pts, std::size_t skip = SIZE_MAX) {
    double best = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (i != skip) best = std::min(best, (pts[i] - q).squaredNorm());
    return best;
}

}  // namespace

NearestNeighborIndex::NearestNeighborIndex(const PointCloud& points) {
    require(!points.empty(), "NearestNeighborIndex: point set is empty");
    const auto& pts = points.points();
    const std::size_t n = pts.size();
    Vec3 hi = pts.front();
    lo_ = pts.front();
    for (const auto& p : pts) {
        lo_ = lo_.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 span = hi - lo_;

    std::vector<double> spacing;
    const std::size_t probes = std::min<std::size_t>(64, n);
    for (std::size_t k = 0; k < probes && n > 1; ++k) {
        const std::size_t i = k * n / probes;
        const double d = std::sqrt(brute_nearest_sq(pts[i], pts, i));
        if (d > 0.0) spacing.push_back(d);
    }
    const double diag = span.norm();
    if (!spacing.empty()) {
        std::nth_element(spacing.begin(), spacing.begin() + spacing.size() / 2, spacing.end());
        cell_ = spacing[spacing.size() / 2];
    } else {
        cell_ = diag > 0.0 ? diag : 1.0;
    }

    // Keep the number of cells proportional to the number of points.
    const double max_cells = 4.0 * static_cast<double>(n) + 64.0;
    for (;;) {
        double total = 1.0;
        for (int k = 0; k < 3; ++k) {
            dims_[k] = static_cast<std::int64_t>(std::floor(span[k] / cell_)) + 1;
            total *= static_cast<double>(dims_[k]);
        }
        if (total <= max_cells) break;
        cell_ *= std::max(1.1, std::cbrt(total / max_cells));
    }

    const std::size_t cells = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
    std::vector<std::size_t> cell_of(n);
    cell_start_.assign(cells + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = cell_coords(pts[i]);
        cell_of[i] = flat(c[0], c[1], c[2]);
        ++cell_start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
    points_.resize(n);
    std::vector<std::size_t> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) points_[cursor[cell_of[i]]++] = pts[i];
}

std::array<std::int64_t, 3> NearestNeighborIndex::cell_coords(const Vec3& q) const {
    std::array<std::int64_t, 3> c{};
    for (int k = 0; k < 3; ++k) {
        const double f = std::floor((q[k] - lo_[k]) / cell_);
        c[k] = static_cast<std::int64_t>(std::clamp(f, 0.0, static_cast<double>(dims_[k] - 1)));
    }
    return c;
}

double NearestNeighborIndex::nearest_distance(const Vec3& q) const {
    const auto c = cell_coords(q);
    std::int64_t max_ring = 0;
    for (int k = 0; k < 3; ++k) max_ring = std::max({max_ring, c[k], dims_[k] - 1 - c[k]});

    double best = kInf;
    auto scan = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2]) return;
        const auto cell = flat(x, y, z);
        for (auto i = cell_start_[cell]; i < cell_start_[cell + 1]; ++i)
            best = std::min(best, (points_[i] - q).squaredNorm());
    };
    for (std::int64_t r = 0; r <= max_ring; ++r) {
        for (std::int64_t dz = -r; dz <= r; ++dz)
            for (std::int64_t dy = -r; dy <= r; ++dy) {
                const bool full_row = std::abs(dz) == r || std::abs(dy) == r;
                if (full_row) {
                    for (std::int64_t dx = -r; dx <= r; ++dx) scan(c[0] + dx, c[1] + dy, c[2] + dz);
                } else {
                    scan(c[0] - r, c[1] + dy, c[2] + dz);
                    if (r > 0) scan(c[0] + r, c[1] + dy, c[2] + dz);
                }
            }
        // Unvisited cells are at least r whole cells away from q.
        const double reach = static_cast<double>(r) * cell_;
        if (best <= reach * reach) break;
    }
    return std::sqrt(best);
}

namespace {

double directed_mean(const PointCloud& from, const NearestNeighborIndex& index) {
    std::vector<double> d(from.size());
    parallel_for(0, from.size(), [&](std::size_t i) { d[i] = index.nearest_distance(from[i]); });
    double sum = 0.0;
    for (double v : d) sum += v;
    return sum / static_cast<double>(from.size());
}

double directed_mean_brute(const PointCloud& from, const PointCloud& to) {
    std::vector<double> d(from.size());
    parallel_for(0, from.size(), [&](std::size_t i) { d[i] = std::sqrt(brute_nearest_sq(from[i], to.points())); });
    double sum = 0.0;
    for (double v : d) sum += v;
    return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer(const PointCloud& a, const PointCloud& b) {
    require(!a.empty() && !b.empty(), "chamfer: point clouds must be non-empty");
    const NearestNeighborIndex ia(a), ib(b);
    return directed_mean(a, ib) + directed_mean(b, ia);
}

double chamfer_bruteforce(const PointCloud& a, const PointCloud& b) {
    require(!a.empty() && !b.empty(), "chamfer: point clouds must be non-empty");
    return directed_mean_brute(a, b) + directed_mean_brute(b, a);
}

std::array<double, kSweepSteps> sweep_thresholds() {
    std::array<double, kSweepSteps> t{};
    for (std::size_t k = 0; k < kSweepSteps; ++k) t[k] = static_cast<double>(30 + 5 * k) / 100.0;
    return t;
}

SweepResult eval_sweep(const VoxelGrid& pred, const TriangleMesh& gt, std::size_t n, std::uint64_t seed) {
    require(n > 0, "eval_sweep: sample count must be positive");
    SweepResult out;
    out.thresholds = sweep_thresholds();
    out.samples = n;
    out.seed = seed;
    const PointCloud gt_pts = sample_surface(gt, n, seed);
    const NearestNeighborIndex gt_index(gt_pts);
    const auto pred_seed = derive_seed(seed, 1);

    out.best_cd = kInf;
    for (std::size_t k = 0; k < kSweepSteps; ++k) {
        const auto mesh = marching_cubes(pred, out.thresholds[k]);
        if (mesh.empty() || !(mesh.total_area() > 0.0)) {
            out.cd[k] = kInf;
            continue;
        }
        const PointCloud pred_pts = sample_surface(mesh, n, pred_seed);
        const NearestNeighborIndex pred_index(pred_pts);
        out.cd[k] = directed_mean(pred_pts, gt_index) + directed_mean(gt_pts, pred_index);
        if (out.cd[k] < out.best_cd) {
            out.best_cd = out.cd[k];
            out.best_threshold = out.thresholds[k];
        }
    }
    if (out.best_cd == kInf) throw EmptyPredictionError("eval_sweep: every threshold yields an empty isosurface");
    return out;
}

double class_dissimilarity(std::span<const PointCloud> test_class, std::span<const PointCloud> train_classes) {
    require(!test_class.empty() && !train_classes.empty(), "class_dissimilarity: shape sets must be non-empty");
    std::vector<double> best(test_class.size(), kInf);
    parallel_for(0, test_class.size(), [&](std::size_t i) {
        for (const auto& y : train_classes) best[i] = std::min(best[i], chamfer(test_class[i], y));
    });
    double sum = 0.0;
    for (double v : best) sum += v;
    return sum / static_cast<double>(test_class.size());
}

EvalReport build_report(std::string model, std::vector<ObjectEval> objects, std::size_t samples,
                        std::uint64_t seed) {
    EvalReport r;
    r.model = std::move(model);
    r.samples = samples;
    r.seed = seed;
    std::sort(objects.begin(), objects.end(), [](const ObjectEval& a, const ObjectEval& b) {
        return std::tie(a.label, a.id) < std::tie(b.label, b.id);
    });
    r.objects = std::move(objects);

    std::map<std::string, std::vector<const ObjectEval*>> by_class;
    for (const auto& o : r.objects) by_class[o.label].push_back(&o);
    const auto thresholds = sweep_thresholds();
    for (const auto& [label, members] : by_class) {
        ClassSummary s;
        s.label = label;
        s.objects = members.size();
        s.best_cd = kInf;
        s.best_threshold = thresholds.front();
        for (std::size_t k = 0; k < kSweepSteps; ++k) {
            double sum = 0.0;
            for (const auto* o : members) sum += o->sweep.cd[k];
            s.mean_cd[k] = sum / static_cast<double>(members.size());
            if (s.mean_cd[k] < s.best_cd) {
                s.best_cd = s.mean_cd[k];
                s.best_threshold = thresholds[k];
            }
        }
        r.classes.push_back(std::move(s));
    }
    return r;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json array_json(const std::array<double, kSweepSteps>& a) {
    auto j = nlohmann::json::array();
    for (double v : a) j.push_back(finite_or_null(v));
    return j;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["schema"] = "sphrecon.eval_report";
    j["schema_version"] = report.schema_version;
    j["model"] = report.model;
    j["samples"] = report.samples;
    j["seed"] = report.seed;
    j["thresholds"] = array_json(sweep_thresholds());
    auto objects = nlohmann::json::array();
    for (const auto& o : report.objects)
        objects.push_back({{"id", o.id},
                           {"class", o.label},
                           {"cd", array_json(o.sweep.cd)},
                           {"best_cd", finite_or_null(o.sweep.best_cd)},
                           {"best_threshold", o.sweep.best_threshold}});
    j["objects"] = std::move(objects);
    auto classes = nlohmann::json::array();
    for (const auto& c : report.classes)
        classes.push_back({{"class", c.label},
                           {"objects", c.objects},
                           {"mean_cd", array_json(c.mean_cd)},
                           {"best_cd", finite_or_null(c.best_cd)},
                           {"best_threshold", c.best_threshold}});
    j["classes"] = std::move(classes);
    return j.dump(2) + "\n";
}

std::string reports_to_csv(std::span<const EvalReport> reports) {
    std::vector<std::string> labels;
    for (const auto& r : reports)
        for (const auto& c : r.classes)
            if (std::find(labels.begin(), labels.end(), c.label) == labels.end()) labels.push_back(c.label);
    std::sort(labels.begin(), labels.end());

    auto fmt = [](double v) {
        if (!std::isfinite(v)) return std::string("inf");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "model";
    for (const auto& l : labels) out << ',' << l;
    out << ",avg\n";
    for (const auto& r : reports) {
        out << r.model;
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& l : labels) {
            const auto it = std::find_if(r.classes.begin(), r.classes.end(),
                                         [&](const ClassSummary& c) { return c.label == l; });
            out << ',';
            if (it == r.classes.end()) continue;
            out << fmt(it->best_cd);
            sum += it->best_cd;
            ++count;
        }
        out << ',' << (count > 0 ? fmt(sum / static_cast<double>(count)) : std::string()) << '\n';
    }
    return out.str();
}

}  // namespace sphrecon
