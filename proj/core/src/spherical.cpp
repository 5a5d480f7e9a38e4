#include "sphrecon/spherical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "sphrecon/error.hpp"
#include "sphrecon/parallel.hpp"
#include "sphrecon/raycast.hpp"

namespace sphrecon {

using detail::require;

double cell_longitude(std::size_t lon, std::size_t n_lon) {
    return (static_cast<double>(lon) + 0.5) * 2.0 * std::numbers::pi / static_cast<double>(n_lon);
}

double cell_latitude(std::size_t lat, std::size_t n_lat) {
    return -0.5 * std::numbers::pi + (static_cast<double>(lat) + 0.5) * std::numbers::pi / static_cast<double>(n_lat);
}

Vec3 cell_direction(std::size_t lon, std::size_t lat, std::size_t n_lon, std::size_t n_lat) {
    const double phi = cell_longitude(lon, n_lon);
    const double theta = cell_latitude(lat, n_lat);
    return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), std::sin(theta)};
}

SphericalMap mesh_to_spherical(const TriangleMesh& mesh, std::size_t n_lon, std::size_t n_lat) {
    require(n_lon >= 4 && n_lat >= 4, "mesh_to_spherical: resolution must be at least 4x4");
    for (const auto& v : mesh.vertices())
        require(v.norm() <= 1.0, "mesh_to_spherical: mesh vertex outside the unit sphere");

    const TriangleBvh bvh(mesh);
    std::vector<float> values(n_lon * n_lat, 0.0f);
    std::vector<std::uint8_t> mask(n_lon * n_lat, 0);
    parallel_for(0, n_lat, [&](std::size_t lat) {
        for (std::size_t lon = 0; lon < n_lon; ++lon) {
            const Vec3 d = cell_direction(lon, lat, n_lon, n_lat);
            const auto hit = bvh.closest_hit(d, -d, 0.0, 1.0);
            if (!hit) continue;
            values[lat * n_lon + lon] = std::clamp(static_cast<float>(hit->t), 0.0f, 1.0f);
            mask[lat * n_lon + lon] = 1;
        }
    });
    return {n_lon, n_lat, std::move(values), std::move(mask)};
}

PointCloud spherical_to_pointcloud(const SphericalMap& map) {
    std::vector<Vec3> pts;
    pts.reserve(map.observed_count());
    for (std::size_t lat = 0; lat < map.n_lat(); ++lat)
        for (std::size_t lon = 0; lon < map.n_lon(); ++lon) {
            const auto i = lat * map.n_lon() + lon;
            if (!map.mask()[i]) continue;
            const double r = 1.0 - static_cast<double>(map.values()[i]);
            pts.push_back(r * cell_direction(lon, lat, map.n_lon(), map.n_lat()));
        }
    return PointCloud(std::move(pts));
}

PaddedMap periodic_pad(const SphericalMap& map, std::size_t width) {
    require(width < map.n_lon(), "periodic_pad: width must be smaller than n_lon");
    PaddedMap out;
    out.cols = map.n_lon() + 2 * width;
    out.rows = map.n_lat();
    out.width = width;
    out.values.resize(out.cols * out.rows);
    out.mask.resize(out.cols * out.rows);
    const auto w = static_cast<std::ptrdiff_t>(width);
    for (std::size_t lat = 0; lat < out.rows; ++lat)
        for (std::size_t c = 0; c < out.cols; ++c) {
            const auto src = map.index(static_cast<std::ptrdiff_t>(c) - w, lat);
            out.values[lat * out.cols + c] = map.values()[src];
            out.mask[lat * out.cols + c] = map.mask()[src];
        }
    return out;
}

SphericalMap crop_padding(const PaddedMap& padded) {
    require(padded.cols > 2 * padded.width, "crop_padding: padding wider than the map");
    const std::size_t n_lon = padded.cols - 2 * padded.width;
    std::vector<float> values(n_lon * padded.rows);
    std::vector<std::uint8_t> mask(n_lon * padded.rows);
    for (std::size_t lat = 0; lat < padded.rows; ++lat)
        for (std::size_t lon = 0; lon < n_lon; ++lon) {
            values[lat * n_lon + lon] = padded.values[lat * padded.cols + lon + padded.width];
            mask[lat * n_lon + lon] = padded.mask[lat * padded.cols + lon + padded.width];
        }
    return {n_lon, padded.rows, std::move(values), std::move(mask)};
}

namespace {

struct Field {
    std::size_t n_lon = 0, n_lat = 0;
    std::vector<double> value;
    std::vector<std::uint8_t> known;
};

struct SolveStats {
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = true;
};

// 4-neighbourhood with longitude wrap; rows past a pole reflect back inward.
std::array<std::size_t, 4> neighbours(std::size_t i, std::size_t n_lon, std::size_t n_lat) {
    const std::size_t lat = i / n_lon, lon = i % n_lon;
    const std::size_t west = lat * n_lon + (lon + n_lon - 1) % n_lon;
    const std::size_t east = lat * n_lon + (lon + 1) % n_lon;
    const std::size_t south_row = lat > 0 ? lat - 1 : std::min(lat + 1, n_lat - 1);
    const std::size_t north_row = lat + 1 < n_lat ? lat + 1 : (lat > 0 ? lat - 1 : lat);
    return {west, east, south_row * n_lon + lon, north_row * n_lon + lon};
}

SolveStats solve(Field& f, const CompletionConfig& cfg) {
    const std::size_t n = f.n_lon * f.n_lat;
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < n; ++i)
        if (!f.known[i]) missing.push_back(i);
    if (missing.empty()) return {};

    // Connected missing regions and the value range on their observed rim.
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> region(n, kNone);
    std::vector<double> lo, hi, rim_sum;
    std::vector<std::size_t> rim_count;
    std::vector<std::size_t> queue;
    for (auto seed : missing) {
        if (region[seed] != kNone) continue;
        const std::size_t id = lo.size();
        lo.push_back(std::numeric_limits<double>::infinity());
        hi.push_back(-std::numeric_limits<double>::infinity());
        rim_sum.push_back(0.0);
        rim_count.push_back(0);
        queue.assign(1, seed);
        region[seed] = id;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            for (auto nb : neighbours(queue[q], f.n_lon, f.n_lat)) {
                if (f.known[nb]) {
                    lo[id] = std::min(lo[id], f.value[nb]);
                    hi[id] = std::max(hi[id], f.value[nb]);
                    rim_sum[id] += f.value[nb];
                    ++rim_count[id];
                } else if (region[nb] == kNone) {
                    region[nb] = id;
                    queue.push_back(nb);
                }
            }
        }
    }

    const bool coarsen = f.n_lon % 2 == 0 && f.n_lat % 2 == 0 && f.n_lon >= 16 && f.n_lat >= 16;
    if (coarsen) {
        Field coarse;
        coarse.n_lon = f.n_lon / 2;
        coarse.n_lat = f.n_lat / 2;
        coarse.value.assign(coarse.n_lon * coarse.n_lat, 0.0);
        coarse.known.assign(coarse.n_lon * coarse.n_lat, 0);
        std::vector<int> count(coarse.value.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!f.known[i]) continue;
            const auto c = (i / f.n_lon / 2) * coarse.n_lon + (i % f.n_lon) / 2;
            coarse.value[c] += f.value[i];
            ++count[c];
        }
        for (std::size_t c = 0; c < coarse.value.size(); ++c)
            if (count[c] > 0) {
                coarse.value[c] /= count[c];
                coarse.known[c] = 1;
            }
        solve(coarse, cfg);
        for (auto i : missing) {
            const auto c = (i / f.n_lon / 2) * coarse.n_lon + (i % f.n_lon) / 2;
            f.value[i] = coarse.value[c];
        }
    } else {
        for (auto i : missing) f.value[i] = rim_sum[region[i]] / static_cast<double>(rim_count[region[i]]);
    }
    for (auto i : missing) f.value[i] = std::clamp(f.value[i], lo[region[i]], hi[region[i]]);

    std::vector<std::array<std::size_t, 4>> nbs;
    nbs.reserve(missing.size());
    for (auto i : missing) nbs.push_back(neighbours(i, f.n_lon, f.n_lat));

    SolveStats stats;
    stats.converged = false;
    std::vector<double> next(missing.size());
    while (stats.iterations < cfg.max_iters) {
        double max_delta = 0.0;
        for (std::size_t k = 0; k < missing.size(); ++k) {
            const auto& nb = nbs[k];
            next[k] = 0.25 * (f.value[nb[0]] + f.value[nb[1]] + f.value[nb[2]] + f.value[nb[3]]);
            max_delta = std::max(max_delta, std::abs(next[k] - f.value[missing[k]]));
        }
        for (std::size_t k = 0; k < missing.size(); ++k) f.value[missing[k]] = next[k];
        ++stats.iterations;
        stats.residual = max_delta;
        if (max_delta < cfg.tolerance) {
            stats.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) f.known[i] = 1;
    return stats;
}

}  // namespace

CompletionResult inpaint_spherical(const SphericalMap& partial, const CompletionConfig& cfg) {
    require(cfg.tolerance > 0.0, "inpaint_spherical: tolerance must be positive");
    if (partial.observed_count() == 0)
        throw DegenerateInputError("inpaint_spherical: spherical map has no observed cells");

    Field f;
    f.n_lon = partial.n_lon();
    f.n_lat = partial.n_lat();
    f.value.assign(partial.values().begin(), partial.values().end());
    f.known = partial.mask();
    const auto stats = solve(f, cfg);

    std::vector<float> values = partial.values();
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!partial.mask()[i]) values[i] = static_cast<float>(std::clamp(f.value[i], 0.0, 1.0));
    std::vector<std::uint8_t> mask(values.size(), 1);
    return {SphericalMap(partial.n_lon(), partial.n_lat(), std::move(values), std::move(mask)), stats.converged,
            stats.iterations, stats.residual};
}

}  // namespace sphrecon
